#pragma once

// Runtime checks of the hypotheses behind each envelope certificate. Every
// check records a margin (value minus bound); a negative margin is a
// violation. A pass means no sampled evaluation breached the hypothesis.

#include <cstddef>
#include <string>
#include <vector>

namespace maldens {

struct AuditTally {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst_margin = 1e300;

  void observe(double margin) noexcept;
  void merge(const AuditTally& other) noexcept;
};

struct AuditRecord {
  std::string id;
  std::string description;
  AuditTally tally;

  bool pass() const noexcept { return tally.violations == 0; }
};

class AuditLog {
 public:
  // Declares a hypothesis; records keep declaration order.
  AuditRecord& declare(const std::string& id, const std::string& description);
  AuditRecord* find(const std::string& id);
  const AuditRecord* find(const std::string& id) const;

  void observe(const std::string& id, double margin);
  // Merges per-chunk tallies in chunk order.
  void merge(const std::string& id, const std::vector<AuditTally>& chunks);

  const std::vector<AuditRecord>& records() const noexcept { return records_; }
  bool all_pass() const noexcept;

 private:
  AuditRecord& at(const std::string& id);
  std::vector<AuditRecord> records_;
};

}  // namespace maldens
