#include "doctest.h"
#include "narep/bench.hpp"
#include "narep/connectivity.hpp"
#include "support/models.hpp"

using namespace narep;
using narep::testing::flat_of;

namespace {

// Independent count: for every activity instance, evaluate every mutable
// variable's membership by brute force over the activity's read set.
std::int64_t brute_checks(const FlatModel& fm) {
  std::int64_t n = 0;
  for (const ActivityInstance& a : fm.activities()) {
    for (const CanonicalVar& v : fm.vars()) {
      if (!v.mutable_) continue;
      if (std::find(a.reads.begin(), a.reads.end(), v.id) != a.reads.end()) ++n;
    }
  }
  return n;
}

}  // namespace

TEST_CASE("connectivity: NARep ring needs 3n checks, rep emulation n^2") {
  for (std::int64_t n : {3, 7, 20}) {
    const FlatModel nr = flatten(generate_model(Topology{}, n, BenchMode::NARep));
    const FlatModel re = flatten(generate_model(Topology{}, n, BenchMode::RepEmulated));
    CHECK(build_connectivity(nr).check_count == 3 * n);
    CHECK(build_connectivity(re).check_count == n * n);
    CHECK(brute_checks(nr) == 3 * n);
    CHECK(brute_checks(re) == n * n);
  }
}

TEST_CASE("connectivity: small rings collapse duplicate neighbours") {
  CHECK(build_connectivity(flatten(generate_model(Topology{}, 1, BenchMode::NARep))).check_count == 1);
  CHECK(build_connectivity(flatten(generate_model(Topology{}, 2, BenchMode::NARep))).check_count == 4);
}

TEST_CASE("connectivity: lists are sorted inverse of the read sets") {
  const FlatModel fm = flat_of(R"(
atomic S {
  place Up init 1;
  place Count;
  activity Fail exp(0.1 * (1 + sum(j in repshared(Up): 1 - Up[j]))) when Up == 1 { Up = 0; Count += 1; }
  activity Fix exp(1) when Up == 0 { Up = 1; }
}
compose narep ring 6 { S; Up ring(1); }
)");
  const ConnectivityLists cl = build_connectivity(fm);
  for (std::size_t v = 0; v < fm.vars().size(); ++v) {
    const auto& list = cl.var_to_activities[v];
    CHECK(std::is_sorted(list.begin(), list.end()));
    for (const ActivityInstance& a : fm.activities()) {
      const bool reads = std::find(a.reads.begin(), a.reads.end(), static_cast<int>(v)) != a.reads.end();
      const bool listed = std::find(list.begin(), list.end(), a.id) != list.end();
      CHECK(listed == (reads && fm.vars()[v].mutable_));
    }
  }
  // Count is written but never read
  CHECK(cl.var_to_activities[static_cast<std::size_t>(fm.find_var("ring[0].Count"))].empty());
  CHECK(cl.check_count == 6 * 3 + 6);

  const std::vector<int> changed{fm.find_var("ring[0].Up")};
  const auto affected = affected_activities(cl, changed);
  // Fail of 5, 0, 1 and Fix of 0
  CHECK(affected == std::vector<int>{0, 1, 2, 10});
}

TEST_CASE("connectivity: constants are never examined") {
  const FlatModel fm = flat_of(R"(
atomic S { place C init 3; place X; activity T exp(C) when X < C { X += 1; } }
compose rep r 4 { S; }
)");
  const ConnectivityLists cl = build_connectivity(fm);
  CHECK(cl.check_count == 4);
  const ConnectivityReport r = connectivity_report(fm);
  CHECK(r.checks == 4);
  CHECK(r.vars == 8);
  CHECK(r.activities == 4);
  CHECK(r.density == doctest::Approx(4.0 / 32.0));
}

TEST_CASE("connectivity: text form") {
  const FlatModel fm = flatten(generate_model(Topology{}, 3, BenchMode::NARep));
  const std::string text = format_connectivity(fm, build_connectivity(fm));
  CHECK(text ==
        "checks 9\nvars 3\nactivities 3\ndensity 1\n"
        "var 0 net[0].P: 0 1 2\nvar 1 net[1].P: 0 1 2\nvar 2 net[2].P: 0 1 2\n");
}
