#include "maldens/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maldens/error.hpp"

namespace maldens {

void AuditTally::observe(double margin) noexcept {
  ++checked;
  // A NaN margin is a violation and ranks as the worst possible one.
  if (std::isnan(margin)) margin = -std::numeric_limits<double>::infinity();
  if (margin < 0.0) ++violations;
  worst_margin = std::min(worst_margin, margin);
}

void AuditTally::merge(const AuditTally& o) noexcept {
  checked += o.checked;
  violations += o.violations;
  worst_margin = std::min(worst_margin, o.worst_margin);
}

AuditRecord& AuditLog::declare(const std::string& id, const std::string& description) {
  if (find(id)) throw InvalidArgument("audit '" + id + "' declared twice");
  records_.push_back({id, description, {}});
  return records_.back();
}

AuditRecord* AuditLog::find(const std::string& id) {
  auto it = std::find_if(records_.begin(), records_.end(), [&](const AuditRecord& r) { return r.id == id; });
  return it == records_.end() ? nullptr : &*it;
}

const AuditRecord* AuditLog::find(const std::string& id) const {
  return const_cast<AuditLog*>(this)->find(id);
}

AuditRecord& AuditLog::at(const std::string& id) {
  AuditRecord* r = find(id);
  if (!r) throw InvalidArgument("audit '" + id + "' was not declared");
  return *r;
}

void AuditLog::observe(const std::string& id, double margin) { at(id).tally.observe(margin); }

void AuditLog::merge(const std::string& id, const std::vector<AuditTally>& chunks) {
  AuditRecord& r = at(id);
  for (const AuditTally& t : chunks) r.tally.merge(t);
}

bool AuditLog::all_pass() const noexcept {
  return std::all_of(records_.begin(), records_.end(), [](const AuditRecord& r) { return r.pass(); });
}

}  // namespace maldens
