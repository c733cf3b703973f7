#pragma once

// Composition tree: Atomic leaves combined by Join, Rep and NARep.
//
// Place paths name a place from a node's point of view. Segments are
// separated by '.', a Join child is selected by its label and a replica of a
// Rep/NARep child by a bracket on that child's label: `ring[2].P`. The
// template below a Rep/NARep has no segment of its own, unless it is itself a
// Rep/NARep.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "narep/san.hpp"

namespace narep {

/// Per-replica private copy (the default).
struct Local {
  friend bool operator==(const Local&, const Local&) = default;
};

/// Each group of replicas shares one copy of the place. Replicas outside
/// every group behave as Local.
struct PlaceShared {
  std::vector<std::vector<std::int64_t>> groups;
  friend bool operator==(const PlaceShared&, const PlaceShared&) = default;
};

/// Replica i may read and write the copies of replicas access[i]. A replica
/// missing from the map only sees its own copy.
struct RepShared {
  std::map<std::int64_t, std::set<std::int64_t>> access;
  friend bool operator==(const RepShared&, const RepShared&) = default;

  /// access(i) as an ascending list.
  std::vector<std::int64_t> of(std::int64_t replica) const;
};

using SharingMode = std::variant<Local, PlaceShared, RepShared>;

/// k neighbours on each side: access(i) = {i-k, ..., i+k} mod n.
RepShared ring_access(std::int64_t n, std::int64_t k = 1);
/// The hub sees every replica; every other replica sees itself and the hub.
RepShared star_access(std::int64_t n, std::int64_t hub = 0);
/// Every replica sees every replica.
RepShared full_access(std::int64_t n);

/// Places merged into one variable by a Join, as paths relative to the Join.
struct JoinSpec {
  std::vector<std::string> members;
};

/// Aliases replica r's scalar `place` with entry `entry_map[r]` of the array
/// place `outer_path`, which is resolved relative to the Join that directly
/// contains the NARep.
struct UpShareSpec {
  std::string place;
  std::set<std::int64_t> replicas;
  std::string outer_path;
  std::map<std::int64_t, std::int64_t> entry_map;
};

class CompositionNode {
 public:
  enum class Kind { Atomic, Join, Rep, NARep };

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }

  /// Atomic only.
  const AtomicModel& model() const { return *model_; }
  const std::shared_ptr<const AtomicModel>& shared_model() const { return model_; }
  /// Join: the members. Rep/NARep: the single template.
  const std::vector<CompositionNode>& children() const { return *children_; }
  const CompositionNode& child() const { return children_->front(); }
  /// Join only.
  const std::vector<JoinSpec>& joins() const { return joins_; }
  /// Rep/NARep only.
  std::int64_t n() const { return n_; }
  /// Rep only: paths, relative to the template, shared by all replicas.
  const std::set<std::string>& shared_places() const { return shared_; }
  /// NARep only: paths relative to the template. Unlisted places are Local.
  const std::map<std::string, SharingMode>& sharing() const { return sharing_; }
  const std::vector<UpShareSpec>& up_shared() const { return up_; }

  SharingMode mode_of(const std::string& path) const;

 private:
  friend CompositionNode atomic(std::shared_ptr<const AtomicModel>, std::string);
  friend CompositionNode join(std::vector<CompositionNode>, std::vector<JoinSpec>, std::string);
  friend CompositionNode rep(CompositionNode, std::int64_t, std::set<std::string>, std::string);
  friend CompositionNode narep(CompositionNode, std::int64_t, std::map<std::string, SharingMode>,
                               std::vector<UpShareSpec>, std::string);

  Kind kind_ = Kind::Atomic;
  std::string label_;
  std::shared_ptr<const AtomicModel> model_;
  std::shared_ptr<const std::vector<CompositionNode>> children_;
  std::vector<JoinSpec> joins_;
  std::int64_t n_ = 1;
  std::set<std::string> shared_;
  std::map<std::string, SharingMode> sharing_;
  std::vector<UpShareSpec> up_;
};

/// Leaf node. The model is validated; the label defaults to its name.
/// Errors: ValidationError.
CompositionNode atomic(std::shared_ptr<const AtomicModel> model, std::string label = {});
CompositionNode atomic(AtomicModel model, std::string label = {});

/// Errors: InvalidArgument (duplicate child labels), UnknownPath, KindMismatch.
CompositionNode join(std::vector<CompositionNode> children, std::vector<JoinSpec> joins,
                     std::string label = "join");

/// Anonymous replication. Errors: InvalidArgument (n < 1), UnknownPlace.
CompositionNode rep(CompositionNode child, std::int64_t n, std::set<std::string> shared_places,
                    std::string label = "rep");

/// Non-anonymous replication. Errors: InvalidArgument (n < 1), UnknownPlace,
/// InvalidSharingSpec (rule ids GROUP_EMPTY, GROUP_OVERLAP,
/// REPLICA_OUT_OF_RANGE, OWNER_NOT_IN_ACCESS, UPSHARE_NOT_SCALAR,
/// UPSHARE_MAP, UPSHARE_NOT_INJECTIVE, UPSHARE_CONFLICT).
CompositionNode narep(CompositionNode child, std::int64_t n,
                      std::map<std::string, SharingMode> sharing,
                      std::vector<UpShareSpec> up_shared = {}, std::string label = "narep");

bool is_replication(const CompositionNode& node);

struct PathSegment {
  std::string name;
  std::optional<std::int64_t> index;
};

/// Splits `a.b[3].P` into segments. Errors: UnknownPath on malformed text.
std::vector<PathSegment> parse_path(const std::string& path);

/// Declaration of the place a path names, relative to `node`. Errors:
/// UnknownPath.
const PlaceDecl& resolve_place(const CompositionNode& node, const std::string& path);

}  // namespace narep
