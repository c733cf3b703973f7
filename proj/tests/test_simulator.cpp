#include <cmath>
#include <sstream>

#include "doctest.h"
#include "narep/simulator.hpp"
#include "support/errors.hpp"
#include "support/models.hpp"

using namespace narep;
using narep::testing::error_code;
using narep::testing::flat_of;

namespace {

struct Run {
  FlatModel fm;
  ConnectivityLists cl;
  Trajectory t;
};

Run run(const std::string& text, SimConfig cfg) {
  Run r{flat_of(text), {}, {}};
  r.cl = build_connectivity(r.fm);
  r.t = simulate(r.fm, r.cl, cfg);
  return r;
}

SimConfig events(std::int64_t n, std::uint64_t seed = 1) {
  SimConfig c;
  c.seed = seed;
  c.stop_after_events = n;
  return c;
}

}  // namespace

TEST_CASE("rng: mt19937_64 reference outputs and transforms") {
  Rng r(1);
  CHECK(r.next() == 2469588189546311528ull);
  CHECK(r.next() == 2516265689700432462ull);
  CHECK(r.next() == 8323445853463659930ull);
  CHECK(r.draws() == 3);
  CHECK(Rng::to_unit(2469588189546311528ull) == 0.13387664401253269);
  CHECK(Rng::to_unit(2516265689700432462ull) == 0.13640703636619728);
  CHECK(Rng::to_unit(8323445853463659930ull) == 0.45121490384453816);
  Rng e(1);
  CHECK(e.exponential(1.0) == 2.0108364700839658);
  CHECK(e.exponential(1.0) == 1.9921119486408574);
  CHECK(e.exponential(2.0) == 0.79581154777347651 / 2.0);
  Rng d(5489);
  for (int i = 0; i < 9999; ++i) d.next();
  CHECK(d.next() == 9981545732273789042ull);
  CHECK(Rng::to_unit(0) > 0.0);
  CHECK(Rng::to_unit(~0ull) < 1.0);
}

TEST_CASE("simulate: first exponential firing uses the first draw") {
  const Run r = run(R"(
atomic MM1 {
  place Queue;
  activity Arrive exp(0.5) { Queue += 1; }
  activity Serve exp(1.0) when Queue > 0 { Queue -= 1; }
}
compose MM1;
)",
                    events(1));
  REQUIRE(r.t.events.size() == 1);
  CHECK(r.t.events[0].time == 2.0108364700839658 / 0.5);
  CHECK(r.t.events[0].activity == 0);
  // rescheduled Arrive and newly enabled Serve
  CHECK(r.t.draws == 3);
  CHECK(r.t.status == SimStatus::EventLimit);
  CHECK(r.t.final_marking == Marking{1});
}

TEST_CASE("simulate: deterministic delays, ties and absorption") {
  const Run r = run(R"(
atomic D {
  place A init 2;
  place B init 2;
  activity Second det(1.5) when B > 0 { B -= 1; }
  activity First det(1.5) when A > 0 { A -= 1; }
}
compose D;
)",
                    events(100));
  REQUIRE(r.t.events.size() == 4);
  CHECK(r.t.events[0].activity == 0);
  CHECK(r.t.events[1].activity == 1);
  CHECK(r.t.events[2].time == 3.0);
  CHECK(r.t.status == SimStatus::Absorbed);
  CHECK(r.t.end_time == 3.0);
  CHECK(r.t.draws == 0);
}

TEST_CASE("simulate: time limit") {
  SimConfig cfg;
  cfg.stop_at_time = 4.0;
  const Run r = run("atomic D { place X; activity T det(1.5) { X += 1; } } compose D;", cfg);
  CHECK(r.t.events.size() == 2);
  CHECK(r.t.status == SimStatus::TimeLimit);
  CHECK(r.t.end_time == 4.0);
  CHECK(r.t.final_marking == Marking{2});
  CHECK(error_code([] { run("atomic D { place X; activity T det(1) { X += 1; } } compose D;", SimConfig{}); }) ==
        Errc::InvalidArgument);
}

TEST_CASE("simulate: rate change rescales the residual time") {
  const Run r = run(R"(
atomic R {
  place X;
  place Done;
  activity Bump det(1) when X == 0 { X = 1; }
  activity A exp(if X == 0 then 1 else 2) when Done == 0 { Done = 1; }
}
compose R;
)",
                    events(10));
  REQUIRE(r.t.events.size() == 2);
  CHECK(r.t.events[0].activity == 0);
  CHECK(r.t.events[1].activity == 1);
  CHECK(r.t.events[1].time == 1.0 + (2.0108364700839658 - 1.0) * (1.0 / 2.0));
  CHECK(r.t.draws == 1);
}

TEST_CASE("simulate: instantaneous activities by priority and weight") {
  const Run r = run(R"(
atomic I {
  place Go init 1;
  place Hi;
  place Lo;
  activity Low instant priority 1 when Go > 0 { Go -= 1; Lo += 1; }
  activity High instant priority 2 when Go > 0 { Go -= 1; Hi += 1; }
}
compose I;
)",
                    events(10));
  REQUIRE(r.t.events.size() == 1);
  CHECK(r.t.events[0].activity == 1);
  CHECK(r.t.events[0].time == 0.0);
  CHECK(r.t.draws == 0);

  // equal priority: one draw picks by weight; u = 0.1339 < 1/4 picks the first
  const Run w = run(R"(
atomic I {
  place Go init 1;
  place X;
  activity A instant weight(1) when Go > 0 { Go = 0; X = 1; }
  activity B instant weight(3) when Go > 0 { Go = 0; X = 2; }
}
compose I;
)",
                    events(10));
  REQUIRE(w.t.events.size() == 1);
  CHECK(w.t.events[0].activity == 0);
  CHECK(w.t.draws == 1);
  const Run w2 = run(R"(
atomic I {
  place Go init 1;
  place X;
  activity A instant weight(1) when Go > 0 { Go = 0; X = 1; }
  activity B instant weight(3) when Go > 0 { Go = 0; X = 2; }
}
compose I;
)",
                     events(10, 2));
  // seed 2 first uniform
  const double u = Rng::to_unit(std::mt19937_64(2)());
  CHECK(w2.t.events[0].activity == (u * 4 < 1 ? 0 : 1));
}

TEST_CASE("simulate: cases") {
  const std::string text = R"(
atomic C {
  place X;
  activity T det(1) case(1) { X = 1; } case(0) { X = 2; } case(2) { X = 3; }
}
compose C;
)";
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const Run r = run(text, events(50, seed));
    std::mt19937_64 g(seed);
    for (const Event& e : r.t.events) {
      const double u = Rng::to_unit(g());
      CHECK(e.case_index == (u * 3 < 1 ? 0 : 2));
    }
    CHECK(r.t.draws == 50);
  }
}

TEST_CASE("simulate: error conditions") {
  CHECK(error_code([] { run("atomic L { place X; activity T instant { X = 0; } } compose L;", events(1000000)); }) ==
        Errc::LivelockError);
  CHECK(error_code([] {
          run("atomic N { place X init 1; activity T det(1) { X -= 2; } } compose N;", events(10));
        }) == Errc::NegativeMarking);
  CHECK(error_code([] {
          run("atomic R { place X init 1; activity T exp(X) { X -= 1; } } compose R;", events(10));
        }) == Errc::InvalidRate);
  CHECK(error_code([] {
          run("atomic D { place X; activity T det(1) { X = 5 / X; } } compose D;", events(10));
        }) == Errc::DivisionByZero);
}

TEST_CASE("simulate: changes are merged per variable") {
  const Run r = run(R"(
atomic M { place X; place Y init 4; activity T det(1) { X += 1; Y = 0; X += 1; Y = 4; } }
compose M;
)",
                    events(1));
  const auto ch = r.t.changes_of(r.t.events[0]);
  REQUIRE(ch.size() == 1);
  CHECK(ch[0] == VarChange{0, 0, 2});
  std::ostringstream os;
  write_trace(os, r.t);
  CHECK(os.str() == "1\t0\t0\t0:0->2\n");
}

TEST_CASE("simulate: re-examination follows the connectivity lists") {
  const std::string text = R"(
atomic S {
  place Up init 1;
  activity Flip exp(if Up == 1 then 0.1 * (1 + sum(j in repshared(Up): 1 - Up[j])) else 0.5) { Up = 1 - Up; }
}
compose narep ring 6 { S; Up ring(1); }
)";
  const FlatModel fm = flat_of(text);
  const ConnectivityLists cl = build_connectivity(fm);
  Simulator sim(fm, cl, events(1));
  REQUIRE(sim.step());
  const int a = sim.trajectory().events[0].activity;
  std::vector<int> expected{(a + 5) % 6, a, (a + 1) % 6};
  std::sort(expected.begin(), expected.end());
  CHECK(sim.last_reexamined() == expected);
  CHECK_FALSE(sim.step());
  CHECK(sim.status() == SimStatus::EventLimit);
}

TEST_CASE("simulate: oracle mode gives the same trajectory") {
  const std::string text = R"(
atomic S {
  place Up init 1;
  place N2;
  activity Fail exp(0.2 * (1 + sum(j in repshared(Up): 1 - Up[j]))) when Up == 1 { Up = 0; }
  activity Fix exp(1) when Up == 0 case(1) { Up = 1; } case(Up[(repindex() + 1) % n] + 1) { Up = 1; N2 += 1; }
  activity Sync instant when N2 > 2 { N2 = 0; }
}
compose narep ring 7 { S; Up ring(1); }
)";
  const FlatModel fm = flat_of(text);
  const ConnectivityLists cl = build_connectivity(fm);
  for (std::uint64_t seed : {1u, 9u, 77u}) {
    SimConfig a = events(3000, seed);
    SimConfig b = a;
    b.mode = SimMode::Oracle;
    const Trajectory ta = simulate(fm, cl, a);
    const Trajectory tb = simulate(fm, cl, b);
    CHECK_FALSE(compare_trajectories(ta, tb).has_value());
    CHECK(ta.draws == tb.draws);
    CHECK(ta.final_marking == tb.final_marking);
  }
}

TEST_CASE("compare_trajectories and format_double") {
  Trajectory a;
  a.events = {{1.0, 0, 0, 0, 0}, {2.0, 1, 0, 0, 0}};
  Trajectory b = a;
  CHECK_FALSE(compare_trajectories(a, b).has_value());
  b.events.pop_back();
  CHECK(compare_trajectories(a, b) == 1);
  b = a;
  b.events[0].time = 1.5;
  CHECK(compare_trajectories(a, b) == 0);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0108364700839658 / 0.5) == "4.021672940167932");
  CHECK(std::stod(format_double(2.0108364700839658 / 0.5)) == 2.0108364700839658 / 0.5);
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double(3.0) == "3");
  CHECK(to_string(SimStatus::Absorbed) == "absorbed");
}
