#include "narep/rewards.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace narep {

namespace {

std::vector<int> scope_leaves(const RewardVar& rv, const FlatModel& fm) {
  std::vector<int> out;
  for (std::size_t l = 0; l < fm.leaves().size(); ++l) {
    if (rv.scope.empty() || fm.leaves()[l].model->name == rv.scope) out.push_back(static_cast<int>(l));
  }
  if (out.empty()) fail(Errc::UnknownPath, "reward '" + rv.name + "': no instance of '" + rv.scope + "'");
  return out;
}

double rate_at(const Expr& rate, const FlatModel& fm, const std::vector<int>& leaves, const Marking& m) {
  double total = 0;
  for (int l : leaves) total += evaluate(rate, InstanceContext(fm, l, m)).as_real();
  return total;
}

}  // namespace

void check_reward(const RewardVar& rv, const FlatModel& fm) {
  if (!rv.rate && rv.impulses.empty()) {
    fail(Errc::ValidationError, "reward '" + rv.name + "' has neither rate nor impulse", {}, "EMPTY_REWARD");
  }
  const auto leaves = scope_leaves(rv, fm);
  const auto check = [&](const Expr& e) {
    check_type(e, ExprRole::Numeric);
    for (int l : leaves) {
      const AtomicModel& m = *fm.leaves()[static_cast<std::size_t>(l)].model;
      for_each_subexpression(e, [&](const Expr& sub) {
        if (const auto* r = sub.as<ast::PlaceRead>(); r && m.place_index(r->place) < 0) {
          fail(Errc::UnknownPlace, "reward '" + rv.name + "': unknown place '" + r->place + "'", sub.pos());
        }
      });
    }
  };
  if (rv.rate) check(*rv.rate);
  for (const Impulse& imp : rv.impulses) {
    check(imp.value);
    bool found = false;
    for (int l : leaves) {
      for (const ActivityDecl& a : fm.leaves()[static_cast<std::size_t>(l)].model->activities) {
        found = found || a.name == imp.activity;
      }
    }
    if (!found) {
      fail(Errc::ValidationError, "reward '" + rv.name + "': unknown activity '" + imp.activity + "'", imp.value.pos(),
           "UNKNOWN_ACTIVITY");
    }
  }
}

double evaluate_reward(const RewardVar& rv, const FlatModel& fm, const Trajectory& t) {
  const auto leaves = scope_leaves(rv, fm);
  const bool absorbed = t.status == SimStatus::Absorbed;
  const double a = rv.kind == RewardKind::Instant ? rv.at : rv.from;
  const double b = rv.kind == RewardKind::Instant ? rv.at : rv.to.value_or(t.end_time);
  if (!(a >= 0) || b < a) fail(Errc::InvalidArgument, "reward '" + rv.name + "': bad interval");
  if (rv.kind == RewardKind::TimeAveraged && !(b > a)) {
    fail(Errc::InvalidArgument, "reward '" + rv.name + "': empty averaging interval");
  }
  if (b > t.end_time && !absorbed) {
    fail(Errc::HorizonExceeded, "reward '" + rv.name + "' needs time " + format_double(b) +
                                    " but the trajectory ends at " + format_double(t.end_time));
  }

  // impulse lookup: activity instance -> impulse expressions
  std::vector<std::vector<const Expr*>> impulse_of(fm.activities().size());
  std::vector<char> in_scope(fm.leaves().size(), 0);
  for (int l : leaves) in_scope[static_cast<std::size_t>(l)] = 1;
  for (const ActivityInstance& inst : fm.activities()) {
    if (!in_scope[static_cast<std::size_t>(inst.leaf)]) continue;
    for (const Impulse& imp : rv.impulses) {
      if (fm.decl(inst).name == imp.activity) impulse_of[static_cast<std::size_t>(inst.id)].push_back(&imp.value);
    }
  }

  Marking m = t.initial;
  double prev = 0;
  double integral = 0;
  double impulses = 0;
  for (const Event& e : t.events) {
    if (rv.kind == RewardKind::Instant) {
      if (e.time > a) break;
    } else {
      if (rv.rate) {
        const double lo = std::max(prev, a);
        const double hi = std::min(e.time, b);
        if (hi > lo) integral += rate_at(*rv.rate, fm, leaves, m) * (hi - lo);
      }
      if (e.time > b) {
        prev = e.time;
        break;
      }
      if (e.time >= a) {
        const ActivityInstance& inst = fm.activities()[static_cast<std::size_t>(e.activity)];
        for (const Expr* imp : impulse_of[static_cast<std::size_t>(e.activity)]) {
          impulses += evaluate(*imp, InstanceContext(fm, inst.leaf, m)).as_real();
        }
      }
    }
    for (const VarChange& c : t.changes_of(e)) m[static_cast<std::size_t>(c.var)] = c.new_value;
    prev = e.time;
  }

  if (rv.kind == RewardKind::Instant) return rv.rate ? rate_at(*rv.rate, fm, leaves, m) : 0.0;
  if (rv.rate && prev < b) {
    const double lo = std::max(prev, a);
    if (b > lo) integral += rate_at(*rv.rate, fm, leaves, m) * (b - lo);
  }
  const double total = integral + impulses;
  return rv.kind == RewardKind::TimeAveraged ? total / (b - a) : total;
}

Estimate estimate_from(std::span<const double> values) {
  if (values.size() < 2) fail(Errc::InvalidArgument, "an estimate needs at least two runs");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1));
  const boost::math::students_t dist(n - 1);
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  return {mean, t * sd / std::sqrt(n), static_cast<std::int64_t>(values.size())};
}

Estimate estimate(const RewardVar& rv, const FlatModel& fm, const ConnectivityLists& cl, const SimConfig& base,
                  std::span<const std::uint64_t> seeds, unsigned threads) {
  if (seeds.size() < 2) fail(Errc::InvalidArgument, "an estimate needs at least two seeds");
  check_reward(rv, fm);
  std::vector<double> values(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  const auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < seeds.size();) {
      try {
        SimConfig cfg = base;
        cfg.seed = seeds[i];
        values[i] = evaluate_reward(rv, fm, simulate(fm, cl, cfg));
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(seeds.size())));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < count; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return estimate_from(values);
}

}  // namespace narep
