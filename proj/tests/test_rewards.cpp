#include <cmath>

#include "doctest.h"
#include "narep/rewards.hpp"
#include "support/errors.hpp"
#include "support/models.hpp"

using namespace narep;
using narep::testing::error_code;

namespace {

struct Fixture {
  ModelFile file;
  FlatModel fm;
  ConnectivityLists cl;
  Trajectory t;

  Fixture(const std::string& text, SimConfig cfg) : file(parse_model(text)), fm(flatten(file.root)) {
    cl = build_connectivity(fm);
    t = simulate(fm, cl, cfg);
  }

  double value(const std::string& name) const { return evaluate_reward(*file.find_reward(name), fm, t); }
};

SimConfig until(double time) {
  SimConfig c;
  c.stop_at_time = time;
  return c;
}

// X counts up by one at t = 1, 2, 3, ...
const char* kCounter = R"(
atomic C { place X; activity T det(1) { X += 1; } }
compose C;
reward avg { rate X; timeavg 0 10; }
reward avg_end { rate X; timeavg 0 end; }
reward acc { rate X; accumulated 2 5; }
reward acc_half { rate X; impulse T: 1; accumulated 2.5 5; }
reward count { impulse T: 1; accumulated 0 end; }
reward before { impulse T: X; accumulated 0 end; }
reward at3 { rate X; instant 3; }
reward at35 { rate X; instant 3.5; }
reward late { rate X; timeavg 0 20; }
)";

}  // namespace

TEST_CASE("rewards: piecewise-constant integrals computed by hand") {
  const Fixture f(kCounter, until(10));
  CHECK(f.t.events.size() == 10);
  CHECK(f.value("avg") == doctest::Approx(45.0 / 10.0));
  CHECK(f.value("avg_end") == doctest::Approx(4.5));
  CHECK(f.value("acc") == doctest::Approx(2 + 3 + 4));
  CHECK(f.value("acc_half") == doctest::Approx(0.5 * 2 + 3 + 4 + 3));
  CHECK(f.value("count") == doctest::Approx(10));
  CHECK(f.value("before") == doctest::Approx(45));
  CHECK(f.value("at3") == doctest::Approx(3));
  CHECK(f.value("at35") == doctest::Approx(3));
  CHECK(error_code([&] { f.value("late"); }) == Errc::HorizonExceeded);
}

TEST_CASE("rewards: absorbed trajectories extend forever") {
  const Fixture f(R"(
atomic A { place N init 3; activity T det(1) when N > 0 { N -= 1; } }
compose A;
reward avg { rate N; timeavg 0 6; }
reward tail { rate N; accumulated 2.5 100; }
reward at { rate N; instant 50; }
)",
                  until(1000));
  CHECK(f.t.status == SimStatus::Absorbed);
  CHECK(f.value("avg") == doctest::Approx((3 + 2 + 1) / 6.0));
  CHECK(f.value("tail") == doctest::Approx(0.5));
  CHECK(f.value("at") == 0);
}

TEST_CASE("rewards: scope restricts the summed instances") {
  const Fixture f(R"(
atomic A { place N init 2; activity T det(5) { N = N; } }
atomic B { place N init 7; activity U det(5) { N = N; } }
compose join j { A; B; }
reward all { rate N; timeavg 0 1; }
reward only_b { on B; rate N; timeavg 0 1; }
reward fires_a { on A; impulse T: 1; accumulated 0 10; }
)",
                  until(10));
  CHECK(f.value("all") == doctest::Approx(9));
  CHECK(f.value("only_b") == doctest::Approx(7));
  CHECK(f.value("fires_a") == doctest::Approx(2));
}

TEST_CASE("rewards: check_reward") {
  const FlatModel fm = narep::testing::flat_of("atomic A { place N; activity T det(1) { N = 1; } } compose A;");
  RewardVar rv;
  rv.name = "r";
  rv.rate = parse("Missing");
  CHECK(error_code([&] { check_reward(rv, fm); }) == Errc::UnknownPlace);
  rv.rate = parse("N > 0");
  CHECK(error_code([&] { check_reward(rv, fm); }) == Errc::TypeError);
  rv.rate.reset();
  CHECK(error_code([&] { check_reward(rv, fm); }) == Errc::ValidationError);
  rv.impulses.push_back({"Nope", Expr::integer(1)});
  CHECK(error_code([&] { check_reward(rv, fm); }) == Errc::ValidationError);
  rv.impulses[0].activity = "T";
  CHECK_NOTHROW(check_reward(rv, fm));
  rv.scope = "Other";
  CHECK(error_code([&] { check_reward(rv, fm); }) == Errc::UnknownPath);
}

TEST_CASE("rewards: Student-t interval") {
  const std::vector<double> v{1, 2, 3, 4, 5};
  const Estimate e = estimate_from(v);
  CHECK(e.mean == doctest::Approx(3));
  // t(0.975, 4) = 2.7764451051977987, s = sqrt(2.5)
  CHECK(e.half_width == doctest::Approx(2.7764451051977987 * std::sqrt(2.5) / std::sqrt(5.0)).epsilon(1e-12));
  CHECK(e.runs == 5);
  const std::vector<double> same{2, 2, 2};
  CHECK(estimate_from(same).half_width == 0);
  const std::vector<double> one{1};
  CHECK(error_code([&] { estimate_from(one); }) == Errc::InvalidArgument);
}

TEST_CASE("rewards: replications are independent of the thread count") {
  const ModelFile file = parse_model(R"(
atomic MM1 {
  place Queue;
  activity Arrive exp(0.5) { Queue += 1; }
  activity Serve exp(1.0) when Queue > 0 { Queue -= 1; }
}
compose MM1;
reward q { rate Queue; timeavg 0 end; }
)");
  const FlatModel fm = flatten(file.root);
  const ConnectivityLists cl = build_connectivity(fm);
  SimConfig cfg;
  cfg.stop_after_events = 20000;
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6};
  const Estimate one = estimate(file.rewards[0], fm, cl, cfg, seeds, 1);
  const Estimate four = estimate(file.rewards[0], fm, cl, cfg, seeds, 4);
  CHECK(one.mean == four.mean);
  CHECK(one.half_width == four.half_width);
  CHECK(one.mean == doctest::Approx(1.0).epsilon(0.25));
}
