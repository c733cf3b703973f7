#pragma once

// Flattening: expands a composition tree into canonical state variables and
// activity instances.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "narep/compose.hpp"
#include "narep/san.hpp"

namespace narep {

/// One place entry of one leaf instance, before aliasing.
struct RawSlot {
  std::string path;
  int leaf = 0;
  int place = 0;
  std::int64_t entry = -1;  // -1 for scalar places
  int var = 0;              // canonical variable
};

struct CanonicalVar {
  int id = 0;
  /// Path of the first slot in depth-first order.
  std::string path;
  std::string place;
  std::int64_t entry = -1;
  int leaf = 0;
  std::int64_t owner_replica = 0;
  Expr initial;
  /// Raw slots aliased to this variable, ascending.
  std::vector<int> slots;
  /// Some activity instance may write the variable.
  bool mutable_ = false;
};

enum class AccessMode { Local, PlaceShared, RepShared };

/// How a leaf addresses one of its places by replica index.
struct PlaceAccess {
  AccessMode mode = AccessMode::Local;
  /// Replicas of the innermost NARep this leaf may address, ascending.
  std::vector<std::int64_t> permitted;
};

struct LeafInstance {
  std::string path;
  const AtomicModel* model = nullptr;
  /// First raw slot of each place.
  std::vector<int> slot_base;
  /// Innermost NARep context, or -1.
  int narep = -1;
  /// Position among the leaves of one replica of that NARep.
  int ordinal = 0;
  std::int64_t replica = 0;
  /// Value of `n`, when some replication encloses the leaf.
  std::optional<std::int64_t> n;
  /// Value of repindex() inside initial markings.
  std::optional<std::int64_t> init_index;
  std::vector<PlaceAccess> access;
};

struct NARepContext {
  std::string path;
  std::int64_t n = 1;
  /// replica -> leaves in depth-first order.
  std::vector<std::vector<int>> leaves;
};

struct ActivityInstance {
  int id = 0;
  std::string path;
  int leaf = 0;
  int decl = 0;
  std::int64_t replica = 0;
  std::int64_t n = 1;
  /// Canonical variables read by the enabling predicate, rate or weight, and
  /// case weights. Ascending.
  std::vector<int> reads;
  /// Canonical variables the updates may write. Ascending.
  std::vector<int> writes;
  /// Some read or write index depends on the marking.
  bool dynamic = false;
};

class FlatModel {
 public:
  const std::vector<CanonicalVar>& vars() const { return vars_; }
  const std::vector<RawSlot>& slots() const { return slots_; }
  const std::vector<ActivityInstance>& activities() const { return activities_; }
  const std::vector<LeafInstance>& leaves() const { return leaves_; }
  const std::vector<NARepContext>& nareps() const { return nareps_; }
  const Marking& initial() const { return initial_; }

  const ActivityDecl& decl(const ActivityInstance& a) const;
  const ActivityDecl& decl(int activity) const { return decl(activities_.at(static_cast<std::size_t>(activity))); }

  /// Canonical variable of entry `entry` of `place` in the counterpart of
  /// `leaf` in NARep replica `replica`.
  int var_of(int leaf, int place, std::int64_t replica, std::int64_t entry) const;

  /// Canonical id of a variable by path (any aliased slot path), or -1.
  int find_var(const std::string& path) const;
  /// Activity instance id by path, or -1.
  int find_activity(const std::string& path) const;

  /// Resolves one evaluated read against `leaf`. Errors: UnknownPlace,
  /// IndexOutOfRange, AccessViolation.
  int resolve(int leaf, const ast::PlaceRead& read, std::span<const std::int64_t> indices,
              SourcePos pos) const;

 private:
  friend class Flattener;

  std::vector<CanonicalVar> vars_;
  std::vector<RawSlot> slots_;
  std::vector<ActivityInstance> activities_;
  std::vector<LeafInstance> leaves_;
  std::vector<NARepContext> nareps_;
  Marking initial_;
  // keeps the templates alive after the composition tree is gone
  std::vector<std::shared_ptr<const AtomicModel>> models_;
  std::unordered_map<std::string, int> slot_index_;
  std::unordered_map<std::string, int> activity_index_;
};

/// Errors: UnknownPath, KindMismatch, InvalidSharingSpec, AccessViolation,
/// IndexOutOfRange, NotRepShared, ValidationError, InconsistentInitialization.
FlatModel flatten(const CompositionNode& root);

struct AccessSets {
  std::vector<int> reads;
  std::vector<int> writes;
};

/// Exact canonical read/write sets of one activity instance.
AccessSets resolve_access(const FlatModel& fm, int activity);

/// Every canonical variable the instance may touch under the sharing rules.
std::vector<int> access_grants(const FlatModel& fm, int activity);

/// repshared(place) for the leaf of `activity`: the replicas whose copy it
/// may touch, ascending. Errors: UnknownPlace, NotRepShared.
std::vector<std::int64_t> repshared_list(const FlatModel& fm, int activity, const std::string& place);

/// Initial marking; aliased slots were checked for agreement by flatten.
Marking initial_marking(const FlatModel& fm);

/// Line-oriented listing of variables and activity instances.
std::string dump(const FlatModel& fm);

/// Evaluation context for the expressions of one leaf over a marking.
class InstanceContext final : public EvalContext {
 public:
  InstanceContext(const FlatModel& fm, int leaf, const Marking& marking)
      : fm_(fm), leaf_(fm.leaves()[static_cast<std::size_t>(leaf)]), leaf_id_(leaf), marking_(&marking) {}

  std::int64_t rep_index() const override { return leaf_.replica; }
  std::int64_t size_n() const override { return leaf_.n.value_or(1); }
  std::int64_t read(const ast::PlaceRead& place, std::span<const std::int64_t> indices,
                    SourcePos pos) const override {
    return (*marking_)[static_cast<std::size_t>(fm_.resolve(leaf_id_, place, indices, pos))];
  }
  std::span<const std::int64_t> repshared(std::string_view place, SourcePos pos) const override;

  /// Canonical variable an update target designates.
  int target(const Expr& target) const;

  void rebind(const Marking& marking) { marking_ = &marking; }

 private:
  const FlatModel& fm_;
  const LeafInstance& leaf_;
  int leaf_id_;
  const Marking* marking_;
};

}  // namespace narep
