#include "narep/compose.hpp"

#include <algorithm>
#include <cctype>

namespace narep {

std::vector<std::int64_t> RepShared::of(std::int64_t replica) const {
  const auto it = access.find(replica);
  if (it == access.end()) return {replica};
  return {it->second.begin(), it->second.end()};
}

RepShared ring_access(std::int64_t n, std::int64_t k) {
  if (n < 1 || k < 0) fail(Errc::InvalidArgument, "ring needs n >= 1 and k >= 0");
  RepShared out;
  for (std::int64_t i = 0; i < n; ++i) {
    auto& s = out.access[i];
    for (std::int64_t d = -k; d <= k; ++d) s.insert(mod_euclid(i + d, n));
  }
  return out;
}

RepShared star_access(std::int64_t n, std::int64_t hub) {
  if (n < 1 || hub < 0 || hub >= n) fail(Errc::InvalidArgument, "star hub outside 0..n-1");
  RepShared out;
  for (std::int64_t i = 0; i < n; ++i) {
    auto& s = out.access[i];
    if (i == hub) {
      for (std::int64_t j = 0; j < n; ++j) s.insert(j);
    } else {
      s = {hub, i};
    }
  }
  return out;
}

RepShared full_access(std::int64_t n) {
  if (n < 1) fail(Errc::InvalidArgument, "full needs n >= 1");
  RepShared out;
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) out.access[i].insert(j);
  }
  return out;
}

SharingMode CompositionNode::mode_of(const std::string& path) const {
  const auto it = sharing_.find(path);
  return it == sharing_.end() ? SharingMode{Local{}} : it->second;
}

std::vector<PathSegment> parse_path(const std::string& path) {
  std::vector<PathSegment> out;
  std::size_t i = 0;
  const auto bad = [&] { fail(Errc::UnknownPath, "malformed path '" + path + "'"); };
  const auto ident_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  while (true) {
    PathSegment seg;
    const std::size_t start = i;
    while (i < path.size() && ident_char(path[i])) ++i;
    if (i == start) bad();
    seg.name = path.substr(start, i - start);
    if (i < path.size() && path[i] == '[') {
      const std::size_t num = ++i;
      while (i < path.size() && std::isdigit(static_cast<unsigned char>(path[i]))) ++i;
      if (i == num || i >= path.size() || path[i] != ']') bad();
      seg.index = std::stoll(path.substr(num, i - num));
      ++i;
    }
    out.push_back(std::move(seg));
    if (i == path.size()) break;
    if (path[i] != '.') bad();
    ++i;
  }
  return out;
}

bool is_replication(const CompositionNode& node) {
  return node.kind() == CompositionNode::Kind::Rep || node.kind() == CompositionNode::Kind::NARep;
}

namespace {

const PlaceDecl& resolve_segments(const CompositionNode& node, const std::vector<PathSegment>& segs,
                                  std::size_t k, std::optional<std::int64_t> index,
                                  const std::string& path) {
  using Kind = CompositionNode::Kind;
  const auto bad = [&](const std::string& why) -> const PlaceDecl& {
    fail(Errc::UnknownPath, "path '" + path + "': " + why);
  };
  switch (node.kind()) {
    case Kind::Atomic: {
      if (index) return bad("'" + node.label() + "' is not replicated");
      if (k + 1 != segs.size()) return bad("expected a place of '" + node.label() + "'");
      if (segs[k].index) return bad("place segment cannot be indexed");
      const PlaceDecl* p = node.model().find_place(segs[k].name);
      if (!p) return bad("no place '" + segs[k].name + "' in '" + node.label() + "'");
      return *p;
    }
    case Kind::Join: {
      if (index) return bad("'" + node.label() + "' is not replicated");
      if (k >= segs.size()) return bad("path ends at join '" + node.label() + "'");
      for (const CompositionNode& c : node.children()) {
        if (c.label() == segs[k].name) return resolve_segments(c, segs, k + 1, segs[k].index, path);
      }
      return bad("no member '" + segs[k].name + "' in '" + node.label() + "'");
    }
    case Kind::Rep:
    case Kind::NARep:
      if (index && *index >= node.n()) {
        return bad("replica " + std::to_string(*index) + " of '" + node.label() + "' out of range");
      }
      if (is_replication(node.child())) {
        // a directly nested replication keeps its own indexed segment
        if (k >= segs.size() || segs[k].name != node.child().label()) {
          return bad("expected '" + node.child().label() + "'");
        }
        return resolve_segments(node.child(), segs, k + 1, segs[k].index, path);
      }
      return resolve_segments(node.child(), segs, k, std::nullopt, path);
  }
  return bad("unreachable");
}

bool same_kind(const PlaceDecl& a, const PlaceDecl& b) { return a.length == b.length; }

std::string kind_name(const PlaceDecl& p) {
  return p.length ? "array[" + std::to_string(*p.length) + "]" : "scalar";
}

const PlaceDecl& resolve_in_template(const CompositionNode& child, const std::string& path) {
  try {
    return resolve_place(child, path);
  } catch (const Error& err) {
    fail(Errc::UnknownPlace, err.detail());
  }
}

void sharing_error(const std::string& place, const std::string& rule, const std::string& msg) {
  fail(Errc::InvalidSharingSpec, "place '" + place + "': " + msg, {}, rule);
}

void check_replica(const std::string& place, std::int64_t j, std::int64_t n) {
  if (j < 0 || j >= n) {
    sharing_error(place, "REPLICA_OUT_OF_RANGE",
                  "replica " + std::to_string(j) + " outside 0.." + std::to_string(n - 1));
  }
}

void check_mode(const std::string& place, const SharingMode& mode, std::int64_t n) {
  if (const auto* ps = std::get_if<PlaceShared>(&mode)) {
    std::set<std::int64_t> seen;
    for (const auto& g : ps->groups) {
      if (g.empty()) sharing_error(place, "GROUP_EMPTY", "empty place-shared group");
      for (std::int64_t j : g) {
        check_replica(place, j, n);
        if (!seen.insert(j).second) {
          sharing_error(place, "GROUP_OVERLAP",
                        "replica " + std::to_string(j) + " appears in two groups");
        }
      }
    }
  } else if (const auto* rs = std::get_if<RepShared>(&mode)) {
    for (const auto& [i, set] : rs->access) {
      check_replica(place, i, n);
      for (std::int64_t j : set) check_replica(place, j, n);
      if (!set.count(i)) {
        sharing_error(place, "OWNER_NOT_IN_ACCESS",
                      "access(" + std::to_string(i) + ") does not contain " + std::to_string(i));
      }
    }
  }
}

}  // namespace

const PlaceDecl& resolve_place(const CompositionNode& node, const std::string& path) {
  return resolve_segments(node, parse_path(path), 0, std::nullopt, path);
}

CompositionNode atomic(std::shared_ptr<const AtomicModel> model, std::string label) {
  if (!model) fail(Errc::InvalidArgument, "null atomic model");
  require_valid(*model);
  CompositionNode node;
  node.kind_ = CompositionNode::Kind::Atomic;
  node.label_ = label.empty() ? model->name : std::move(label);
  node.model_ = std::move(model);
  return node;
}

CompositionNode atomic(AtomicModel model, std::string label) {
  return atomic(std::make_shared<const AtomicModel>(std::move(model)), std::move(label));
}

CompositionNode join(std::vector<CompositionNode> children, std::vector<JoinSpec> joins,
                     std::string label) {
  if (children.empty()) fail(Errc::InvalidArgument, "join '" + label + "' has no members");
  std::set<std::string> labels;
  for (const CompositionNode& c : children) {
    if (!labels.insert(c.label()).second) {
      fail(Errc::InvalidArgument, "duplicate member label '" + c.label() + "' in join '" + label + "'",
           {}, "DUPLICATE_LABEL");
    }
  }
  CompositionNode node;
  node.kind_ = CompositionNode::Kind::Join;
  node.label_ = std::move(label);
  node.children_ = std::make_shared<const std::vector<CompositionNode>>(std::move(children));
  for (const JoinSpec& spec : joins) {
    if (spec.members.empty()) fail(Errc::InvalidArgument, "empty join group");
    const PlaceDecl& first = resolve_place(node, spec.members.front());
    for (const std::string& m : spec.members) {
      const PlaceDecl& p = resolve_place(node, m);
      if (!same_kind(first, p)) {
        fail(Errc::KindMismatch, "join of " + spec.members.front() + " (" + kind_name(first) +
                                     ") with " + m + " (" + kind_name(p) + ")");
      }
    }
  }
  node.joins_ = std::move(joins);
  return node;
}

CompositionNode rep(CompositionNode child, std::int64_t n, std::set<std::string> shared_places,
                    std::string label) {
  if (n < 1) fail(Errc::InvalidArgument, "rep '" + label + "' needs n >= 1");
  for (const std::string& p : shared_places) resolve_in_template(child, p);
  CompositionNode node;
  node.kind_ = CompositionNode::Kind::Rep;
  node.label_ = std::move(label);
  node.n_ = n;
  node.children_ = std::make_shared<const std::vector<CompositionNode>>(1, std::move(child));
  node.shared_ = std::move(shared_places);
  return node;
}

CompositionNode narep(CompositionNode child, std::int64_t n,
                      std::map<std::string, SharingMode> sharing, std::vector<UpShareSpec> up_shared,
                      std::string label) {
  if (n < 1) fail(Errc::InvalidArgument, "narep '" + label + "' needs n >= 1");
  for (const auto& [place, mode] : sharing) {
    resolve_in_template(child, place);
    check_mode(place, mode, n);
  }
  std::set<std::pair<std::string, std::int64_t>> upshared_slots;
  for (const UpShareSpec& u : up_shared) {
    const PlaceDecl& p = resolve_in_template(child, u.place);
    if (p.is_array()) sharing_error(u.place, "UPSHARE_NOT_SCALAR", "up-shared place must be scalar");
    if (const auto it = sharing.find(u.place);
        it != sharing.end() && !std::holds_alternative<Local>(it->second)) {
      sharing_error(u.place, "UPSHARE_CONFLICT", "up-shared place must otherwise be local");
    }
    std::set<std::int64_t> keys;
    std::set<std::int64_t> targets;
    for (const auto& [r, e] : u.entry_map) {
      check_replica(u.place, r, n);
      keys.insert(r);
      if (e < 0) sharing_error(u.place, "UPSHARE_MAP", "negative outer entry");
      if (!targets.insert(e).second) {
        sharing_error(u.place, "UPSHARE_NOT_INJECTIVE",
                      "outer entry " + std::to_string(e) + " used twice");
      }
    }
    if (keys != u.replicas) {
      sharing_error(u.place, "UPSHARE_MAP", "entry map must cover exactly the shared replicas");
    }
    for (std::int64_t r : u.replicas) {
      if (!upshared_slots.emplace(u.place, r).second) {
        sharing_error(u.place, "UPSHARE_CONFLICT",
                      "replica " + std::to_string(r) + " up-shared twice");
      }
    }
  }
  CompositionNode node;
  node.kind_ = CompositionNode::Kind::NARep;
  node.label_ = std::move(label);
  node.n_ = n;
  node.children_ = std::make_shared<const std::vector<CompositionNode>>(1, std::move(child));
  node.sharing_ = std::move(sharing);
  node.up_ = std::move(up_shared);
  return node;
}

}  // namespace narep
