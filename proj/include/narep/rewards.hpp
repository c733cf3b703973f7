#pragma once

// Rate and impulse reward variables, evaluated over recorded trajectories.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "narep/simulator.hpp"

namespace narep {

enum class RewardKind { TimeAveraged, Accumulated, Instant };

struct Impulse {
  /// Activity name within the scope model; every instance matches.
  std::string activity;
  Expr value;
};

struct RewardVar {
  std::string name;
  /// Atomic model whose instances the expressions are evaluated in. Values
  /// are summed over all instances. Empty: every leaf model must define the
  /// places used.
  std::string scope;
  std::optional<Expr> rate;
  std::vector<Impulse> impulses;
  RewardKind kind = RewardKind::TimeAveraged;
  /// Interval for time-averaged and accumulated variables; `to` unset means
  /// the end of the trajectory.
  double from = 0;
  std::optional<double> to;
  /// Time point for instant-of-time variables.
  double at = 0;
};

/// Rate part: integral of the piecewise-constant rate over the interval.
/// Impulse part: sum over firings in the interval, evaluated on the marking
/// just before the firing. Time-averaged variables divide the total by the
/// interval length. Errors: HorizonExceeded when the trajectory stops early
/// (absorbed trajectories extend forever), InvalidArgument on a bad interval.
double evaluate_reward(const RewardVar& rv, const FlatModel& fm, const Trajectory& t);

struct Estimate {
  double mean = 0;
  double half_width = 0;  // 95% Student-t
  std::int64_t runs = 0;
};

/// Mean and 95% half-width of independent observations. Errors:
/// InvalidArgument with fewer than two values.
Estimate estimate_from(std::span<const double> values);

/// One independent replication per seed, run on up to `threads` threads.
Estimate estimate(const RewardVar& rv, const FlatModel& fm, const ConnectivityLists& cl, const SimConfig& base,
                  std::span<const std::uint64_t> seeds, unsigned threads = 1);

/// Checks the expressions against the scope. Errors: UnknownPlace,
/// ValidationError, TypeError.
void check_reward(const RewardVar& rv, const FlatModel& fm);

}  // namespace narep
