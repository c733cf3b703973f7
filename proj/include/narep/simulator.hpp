#pragma once

// Discrete-event simulation of a flat model.
//
// Draw order: an exponential activity takes one sample when it becomes
// enabled; choosing among two or more enabled instantaneous activities of the
// top priority takes one sample; choosing among two or more cases takes one
// sample. Nothing else consumes randomness.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "narep/connectivity.hpp"
#include "narep/flatten.hpp"
#include "narep/rng.hpp"

namespace narep {

enum class SimMode { Connectivity, Oracle };

struct SimConfig {
  std::uint64_t seed = 0;
  std::optional<std::int64_t> stop_after_events;
  std::optional<double> stop_at_time;
  SimMode mode = SimMode::Connectivity;
  std::int64_t max_instantaneous_chain = 100000;
};

struct VarChange {
  int var = 0;
  std::int64_t old_value = 0;
  std::int64_t new_value = 0;

  friend bool operator==(const VarChange&, const VarChange&) = default;
};

struct Event {
  double time = 0;
  int activity = 0;
  int case_index = 0;
  /// Range in Trajectory::changes, ordered by variable id.
  std::uint32_t change_begin = 0;
  std::uint32_t change_count = 0;
};

enum class SimStatus { Running, EventLimit, TimeLimit, Absorbed };

std::string_view to_string(SimStatus s);

struct Trajectory {
  std::vector<Event> events;
  std::vector<VarChange> changes;
  Marking initial;
  Marking final_marking;
  std::uint64_t draws = 0;
  SimStatus status = SimStatus::Running;
  /// Time up to which the trajectory describes the marking.
  double end_time = 0;

  std::span<const VarChange> changes_of(const Event& e) const {
    return {changes.data() + e.change_begin, e.change_count};
  }
};

class Simulator {
 public:
  /// Errors: InvalidArgument when no stop condition is set, plus any error
  /// raised while examining the initial marking.
  Simulator(const FlatModel& fm, const ConnectivityLists& cl, SimConfig cfg);

  /// Fires one activity. Returns false once a stop condition holds or no
  /// activity is enabled; status() tells which. Errors: LivelockError,
  /// NegativeMarking, InvalidRate, and evaluation errors.
  bool step();

  /// Runs until step() returns false.
  void run();

  SimStatus status() const { return traj_.status; }
  double now() const { return now_; }
  const Marking& marking() const { return marking_; }
  const Trajectory& trajectory() const { return traj_; }
  /// Activities examined after the most recent event, ascending.
  const std::vector<int>& last_reexamined() const { return reexamined_; }

  /// Final trajectory; the simulator must not be used afterwards.
  Trajectory take();

 private:
  struct ActState {
    bool enabled = false;
    bool scheduled = false;
    double time = 0;
    double rate = 0;
  };

  void examine(int a);
  void examine_all();
  void fire(int a);
  int pick_instantaneous();
  void finish(SimStatus s, double end);

  const FlatModel& fm_;
  const ConnectivityLists& cl_;
  SimConfig cfg_;
  Rng rng_;
  Marking marking_;
  double now_ = 0;
  std::vector<ActState> state_;
  std::set<std::pair<double, int>> timed_;
  /// (-priority, id) of enabled instantaneous activities.
  std::set<std::pair<int, int>> instant_;
  std::int64_t chain_ = 0;
  std::vector<int> reexamined_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t epoch_ = 0;
  std::vector<std::pair<int, std::int64_t>> touched_;
  Trajectory traj_;
};

Trajectory simulate(const FlatModel& fm, const ConnectivityLists& cl, const SimConfig& cfg);

/// Index of the first differing event; nullopt when equal. A trajectory that
/// is a strict prefix of the other differs at its length.
std::optional<std::size_t> compare_trajectories(const Trajectory& a, const Trajectory& b);

/// Shortest decimal that reads back as `x`.
std::string format_double(double x);

/// One line per event: time, activity, case, `var:old->new` list.
void write_trace(std::ostream& os, const Trajectory& t);

}  // namespace narep
