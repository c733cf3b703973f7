#pragma once

// Connectivity lists: for each canonical variable, the activity instances
// whose enabling, rate or weights must be re-evaluated when it changes.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "narep/flatten.hpp"

namespace narep {

struct ConnectivityLists {
  /// var id -> activity instance ids, ascending.
  std::vector<std::vector<int>> var_to_activities;
  /// Examined (activity instance, state variable) pairs. Variables no
  /// activity writes are constants and are never examined.
  std::int64_t check_count = 0;
  std::int64_t build_time_ns = 0;
};

ConnectivityLists build_connectivity(const FlatModel& fm);

/// Union of the lists of `changed`, ascending.
std::vector<int> affected_activities(const ConnectivityLists& cl, std::span<const int> changed);

struct ConnectivityReport {
  std::int64_t checks = 0;
  std::int64_t vars = 0;
  std::int64_t activities = 0;
  /// checks / (vars * activities); 0 for an empty model.
  double density = 0;
  std::int64_t build_ns = 0;
};

ConnectivityReport connectivity_report(const FlatModel& fm);

/// Stable text form (no timing): `checks`, `vars`, `activities`, `density`
/// lines followed by one `var <id> <path>: <ids>` line per non-empty list.
std::string format_connectivity(const FlatModel& fm, const ConnectivityLists& cl);

}  // namespace narep
