#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "maldens/audit.hpp"
#include "maldens/error.hpp"
#include "maldens/rng.hpp"

using namespace maldens;

TEST_CASE("audit tally") {
  AuditTally t;
  CHECK(t.checked == 0);
  t.observe(0.5);
  t.observe(0.0);
  CHECK(t.violations == 0);
  CHECK(t.worst_margin == 0.0);
  t.observe(-1e-15);
  CHECK(t.violations == 1);
  CHECK(t.worst_margin == -1e-15);
  t.observe(std::numeric_limits<double>::quiet_NaN());
  CHECK(t.violations == 2);
  CHECK(t.worst_margin == -std::numeric_limits<double>::infinity());
  CHECK(t.checked == 4);
}

TEST_CASE("merging tallies does not depend on order") {
  NormalStream s(3, 0);
  std::vector<double> margins(1000);
  for (double& m : margins) m = s.normal() + 2.5;
  AuditTally whole;
  for (double m : margins) whole.observe(m);

  for (std::size_t chunks : {1, 3, 7, 64}) {
    std::vector<AuditTally> parts(chunks);
    for (std::size_t i = 0; i < margins.size(); ++i) parts[i * chunks / margins.size()].observe(margins[i]);
    AuditTally fwd, rev;
    for (const auto& p : parts) fwd.merge(p);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) rev.merge(*it);
    CHECK(fwd.checked == whole.checked);
    CHECK(fwd.violations == whole.violations);
    CHECK(fwd.worst_margin == whole.worst_margin);
    CHECK(rev.violations == whole.violations);
    CHECK(rev.worst_margin == whole.worst_margin);
  }
}

TEST_CASE("audit log") {
  AuditLog log;
  CHECK(log.all_pass());
  log.declare("a", "first");
  log.declare("b", "second");
  CHECK_THROWS_AS(log.declare("a", "again"), InvalidArgument);
  CHECK_THROWS_AS(log.observe("zzz", 1.0), InvalidArgument);
  log.observe("a", 1.0);
  CHECK(log.all_pass());
  std::vector<AuditTally> chunks(2);
  chunks[1].observe(-0.25);
  log.merge("b", chunks);
  CHECK_FALSE(log.all_pass());
  CHECK(log.find("a")->pass());
  CHECK_FALSE(log.find("b")->pass());
  CHECK(log.find("b")->tally.worst_margin == -0.25);
  CHECK(log.records()[0].id == "a");
  CHECK(log.find("c") == nullptr);
}
