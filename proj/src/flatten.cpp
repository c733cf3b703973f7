#include "narep/flatten.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace narep {

namespace {

std::string child_path(const std::string& prefix, const std::string& seg) {
  return prefix.empty() ? seg : prefix + "." + seg;
}

std::string segments_text(const std::vector<PathSegment>& segs, std::size_t k) {
  std::string out;
  for (std::size_t i = k; i < segs.size(); ++i) {
    if (i > k) out += '.';
    out += segs[i].name;
    if (segs[i].index) out += "[" + std::to_string(*segs[i].index) + "]";
  }
  return out;
}

struct SlotRange {
  int leaf;
  int place;
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      auto& p = parent_[static_cast<std::size_t>(x)];
      p = parent_[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  }

  // the smaller slot id always becomes the representative
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

class Flattener {
 public:
  explicit Flattener(const CompositionNode& root) : root_(root) {}

  FlatModel run() {
    Context ctx;
    build(root_, root_.label(), ctx);
    UnionFind uf(fm_.slots_.size());
    for (std::size_t i = 0; i < insts_.size(); ++i) merge(static_cast<int>(i), uf);
    for (const auto& [inst, done] : upshare_pending_) {
      if (!done) {
        fail(Errc::InvalidSharingSpec,
             "up-shared places of '" + insts_[static_cast<std::size_t>(inst)].node->label() +
                 "' need a directly enclosing join",
             {}, "UPSHARE_NO_PARENT");
      }
    }
    assign_vars(uf);
    initialize();
    for (std::size_t l = 0; l < fm_.leaves_.size(); ++l) instantiate(static_cast<int>(l));
    for (const ActivityInstance& a : fm_.activities_) {
      for (int v : a.writes) fm_.vars_[static_cast<std::size_t>(v)].mutable_ = true;
    }
    return std::move(fm_);
  }

 private:
  struct Context {
    int narep = -1;
    const CompositionNode* narep_node = nullptr;
    std::int64_t replica = 0;
    std::optional<std::int64_t> n;
    std::optional<std::int64_t> init_index;
    std::string key_prefix;
  };

  struct Inst {
    const CompositionNode* node;
    std::vector<int> kids;
    int leaf = -1;
  };

  // ---------------------------------------------------------------- build

  int build(const CompositionNode& node, const std::string& path, const Context& ctx) {
    using Kind = CompositionNode::Kind;
    const int id = static_cast<int>(insts_.size());
    insts_.push_back({&node, {}, -1});
    switch (node.kind()) {
      case Kind::Atomic: insts_[static_cast<std::size_t>(id)].leaf = add_leaf(node, path, ctx); break;
      case Kind::Join:
        for (const CompositionNode& c : node.children()) {
          Context sub = ctx;
          sub.key_prefix += c.label() + ".";
          const int kid = build(c, child_path(path, c.label()), sub);
          insts_[static_cast<std::size_t>(id)].kids.push_back(kid);
        }
        break;
      case Kind::Rep:
      case Kind::NARep: {
        const bool na = node.kind() == Kind::NARep;
        int context = -1;
        if (na) {
          context = static_cast<int>(fm_.nareps_.size());
          fm_.nareps_.push_back({path, node.n(), std::vector<std::vector<int>>(static_cast<std::size_t>(node.n()))});
          if (!node.up_shared().empty()) upshare_pending_.emplace_back(id, false);
        }
        for (std::int64_t r = 0; r < node.n(); ++r) {
          Context sub = ctx;
          if (na) {
            sub.narep = context;
            sub.narep_node = &node;
            sub.replica = r;
            sub.n = node.n();
            sub.init_index = r;
            sub.key_prefix.clear();
          } else if (ctx.narep < 0) {
            sub.n = node.n();
            sub.init_index = r;
          }
          const std::string rpath = path + "[" + std::to_string(r) + "]";
          const std::size_t first_leaf = fm_.leaves_.size();
          int kid;
          if (is_replication(node.child())) {
            sub.key_prefix += node.child().label() + ".";
            kid = build(node.child(), child_path(rpath, node.child().label()), sub);
          } else {
            kid = build(node.child(), rpath, sub);
          }
          insts_[static_cast<std::size_t>(id)].kids.push_back(kid);
          if (na) {
            auto& list = fm_.nareps_[static_cast<std::size_t>(context)].leaves[static_cast<std::size_t>(r)];
            for (std::size_t l = first_leaf; l < fm_.leaves_.size(); ++l) {
              // only leaves whose innermost NARep is this one
              if (fm_.leaves_[l].narep == context) list.push_back(static_cast<int>(l));
            }
          }
        }
        break;
      }
    }
    return id;
  }

  int add_leaf(const CompositionNode& node, const std::string& path, const Context& ctx) {
    const int id = static_cast<int>(fm_.leaves_.size());
    LeafInstance leaf;
    leaf.path = path;
    leaf.model = &node.model();
    if (fm_.models_.empty() || fm_.models_.back() != node.shared_model()) fm_.models_.push_back(node.shared_model());
    leaf.narep = ctx.narep;
    leaf.replica = ctx.narep >= 0 ? ctx.replica : 0;
    leaf.n = ctx.n;
    leaf.init_index = ctx.init_index;
    if (ctx.narep >= 0) {
      leaf.ordinal = ordinal_counter_[{ctx.narep, ctx.replica}]++;
    }
    for (std::size_t p = 0; p < leaf.model->places.size(); ++p) {
      const PlaceDecl& decl = leaf.model->places[p];
      leaf.slot_base.push_back(static_cast<int>(fm_.slots_.size()));
      for (std::int64_t e = 0; e < decl.entries(); ++e) {
        RawSlot s;
        s.path = child_path(path, decl.name);
        if (decl.is_array()) s.path += "[" + std::to_string(e) + "]";
        s.leaf = id;
        s.place = static_cast<int>(p);
        s.entry = decl.is_array() ? e : -1;
        fm_.slots_.push_back(std::move(s));
      }
      PlaceAccess acc;
      if (ctx.narep >= 0) {
        const SharingMode mode = ctx.narep_node->mode_of(ctx.key_prefix + decl.name);
        acc.permitted = {ctx.replica};
        if (const auto* ps = std::get_if<PlaceShared>(&mode)) {
          acc.mode = AccessMode::PlaceShared;
          for (const auto& g : ps->groups) {
            if (std::find(g.begin(), g.end(), ctx.replica) != g.end()) {
              acc.permitted.assign(g.begin(), g.end());
              std::sort(acc.permitted.begin(), acc.permitted.end());
            }
          }
        } else if (const auto* rs = std::get_if<RepShared>(&mode)) {
          acc.mode = AccessMode::RepShared;
          acc.permitted = rs->of(ctx.replica);
        }
      }
      leaf.access.push_back(std::move(acc));
    }
    fm_.leaves_.push_back(std::move(leaf));
    return id;
  }

  // ---------------------------------------------------------------- paths

  SlotRange resolve_inst(int inst, const std::vector<PathSegment>& segs, std::size_t k,
                         std::optional<std::int64_t> index, const std::string& path) const {
    using Kind = CompositionNode::Kind;
    const Inst& in = insts_[static_cast<std::size_t>(inst)];
    const CompositionNode& node = *in.node;
    const auto bad = [&](const std::string& why) -> SlotRange {
      fail(Errc::UnknownPath, "path '" + path + "': " + why);
    };
    switch (node.kind()) {
      case Kind::Atomic: {
        if (index) return bad("'" + node.label() + "' is not replicated");
        if (k + 1 != segs.size() || segs[k].index) return bad("expected a place of '" + node.label() + "'");
        const int p = node.model().place_index(segs[k].name);
        if (p < 0) return bad("no place '" + segs[k].name + "' in '" + node.label() + "'");
        return {in.leaf, p};
      }
      case Kind::Join: {
        if (index) return bad("'" + node.label() + "' is not replicated");
        if (k >= segs.size()) return bad("path ends at join '" + node.label() + "'");
        for (int kid : in.kids) {
          if (insts_[static_cast<std::size_t>(kid)].node->label() == segs[k].name) {
            return resolve_inst(kid, segs, k + 1, segs[k].index, path);
          }
        }
        return bad("no member '" + segs[k].name + "' in '" + node.label() + "'");
      }
      case Kind::Rep:
      case Kind::NARep: {
        std::int64_t r = 0;
        if (index) {
          if (*index >= node.n()) return bad("replica " + std::to_string(*index) + " out of range");
          r = *index;
        } else if (node.n() > 1) {
          const std::string rest = segments_text(segs, k);
          bool whole = false;
          if (node.kind() == Kind::Rep) {
            whole = node.shared_places().count(rest) > 0;
          } else {
            const SharingMode mode = node.mode_of(rest);
            if (const auto* ps = std::get_if<PlaceShared>(&mode)) {
              whole = ps->groups.size() == 1 &&
                      static_cast<std::int64_t>(ps->groups.front().size()) == node.n();
            }
          }
          if (!whole) return bad("'" + node.label() + "' needs a replica index for '" + rest + "'");
        }
        const int kid = in.kids[static_cast<std::size_t>(r)];
        if (is_replication(node.child())) {
          if (k >= segs.size() || segs[k].name != node.child().label()) {
            return bad("expected '" + node.child().label() + "'");
          }
          return resolve_inst(kid, segs, k + 1, segs[k].index, path);
        }
        return resolve_inst(kid, segs, k, std::nullopt, path);
      }
    }
    return bad("unreachable");
  }

  SlotRange resolve_inst(int inst, const std::string& path) const {
    return resolve_inst(inst, parse_path(path), 0, std::nullopt, path);
  }

  const PlaceDecl& decl_of(SlotRange s) const {
    const LeafInstance& l = fm_.leaves_[static_cast<std::size_t>(s.leaf)];
    return l.model->places[static_cast<std::size_t>(s.place)];
  }

  int base_of(SlotRange s) const {
    return fm_.leaves_[static_cast<std::size_t>(s.leaf)].slot_base[static_cast<std::size_t>(s.place)];
  }

  void merge_places(SlotRange a, SlotRange b, UnionFind& uf, const std::string& what) {
    const PlaceDecl& pa = decl_of(a);
    const PlaceDecl& pb = decl_of(b);
    if (pa.length != pb.length) fail(Errc::KindMismatch, what + ": places differ in kind");
    for (std::int64_t e = 0; e < pa.entries(); ++e) {
      uf.unite(base_of(a) + static_cast<int>(e), base_of(b) + static_cast<int>(e));
    }
  }

  // ---------------------------------------------------------------- aliasing

  void merge(int id, UnionFind& uf) {
    using Kind = CompositionNode::Kind;
    const Inst& in = insts_[static_cast<std::size_t>(id)];
    const CompositionNode& node = *in.node;
    switch (node.kind()) {
      case Kind::Atomic: break;
      case Kind::Rep:
        for (const std::string& p : node.shared_places()) {
          const SlotRange first = resolve_inst(in.kids.front(), p);
          for (std::size_t r = 1; r < in.kids.size(); ++r) {
            merge_places(first, resolve_inst(in.kids[r], p), uf, "rep-shared place " + p);
          }
        }
        break;
      case Kind::NARep:
        for (const auto& [p, mode] : node.sharing()) {
          const auto* ps = std::get_if<PlaceShared>(&mode);
          if (!ps) continue;
          for (const auto& g : ps->groups) {
            const SlotRange first = resolve_inst(in.kids[static_cast<std::size_t>(g.front())], p);
            for (std::size_t m = 1; m < g.size(); ++m) {
              merge_places(first, resolve_inst(in.kids[static_cast<std::size_t>(g[m])], p), uf,
                           "place-shared place " + p);
            }
          }
        }
        break;
      case Kind::Join:
        for (const JoinSpec& spec : node.joins()) {
          const SlotRange first = resolve_inst(id, spec.members.front());
          for (std::size_t m = 1; m < spec.members.size(); ++m) {
            merge_places(first, resolve_inst(id, spec.members[m]), uf, "join of " + spec.members[m]);
          }
        }
        for (int kid : in.kids) up_share(id, kid, uf);
        break;
    }
  }

  void up_share(int join, int kid, UnionFind& uf) {
    const Inst& k = insts_[static_cast<std::size_t>(kid)];
    if (k.node->kind() != CompositionNode::Kind::NARep || k.node->up_shared().empty()) return;
    for (auto& [inst, done] : upshare_pending_) {
      if (inst == kid) done = true;
    }
    for (const UpShareSpec& u : k.node->up_shared()) {
      const SlotRange outer = resolve_inst(join, u.outer_path);
      const PlaceDecl& q = decl_of(outer);
      if (!q.is_array()) {
        fail(Errc::KindMismatch, "up-share target '" + u.outer_path + "' is not an array place");
      }
      for (std::int64_t r : u.replicas) {
        const SlotRange inner = resolve_inst(k.kids[static_cast<std::size_t>(r)], u.place);
        const std::int64_t e = u.entry_map.at(r);
        if (e >= *q.length) {
          fail(Errc::InvalidSharingSpec,
               "place '" + u.place + "': entry " + std::to_string(e) + " outside '" + u.outer_path + "'",
               {}, "UPSHARE_MAP");
        }
        uf.unite(base_of(inner), base_of(outer) + static_cast<int>(e));
      }
    }
  }

  void assign_vars(UnionFind& uf) {
    std::vector<int> var_of_root(fm_.slots_.size(), -1);
    for (std::size_t s = 0; s < fm_.slots_.size(); ++s) {
      const int root = uf.find(static_cast<int>(s));
      RawSlot& slot = fm_.slots_[s];
      if (root == static_cast<int>(s)) {
        CanonicalVar v;
        v.id = static_cast<int>(fm_.vars_.size());
        v.path = slot.path;
        const LeafInstance& leaf = fm_.leaves_[static_cast<std::size_t>(slot.leaf)];
        const PlaceDecl& decl = leaf.model->places[static_cast<std::size_t>(slot.place)];
        v.place = decl.name;
        v.entry = slot.entry;
        v.leaf = slot.leaf;
        v.owner_replica = leaf.replica;
        v.initial = decl.initial_for(std::max<std::int64_t>(slot.entry, 0));
        var_of_root[s] = v.id;
        fm_.vars_.push_back(std::move(v));
      }
      slot.var = var_of_root[static_cast<std::size_t>(root)];
      fm_.vars_[static_cast<std::size_t>(slot.var)].slots.push_back(static_cast<int>(s));
    }
    for (std::size_t s = 0; s < fm_.slots_.size(); ++s) {
      fm_.slot_index_.emplace(fm_.slots_[s].path, static_cast<int>(s));
    }
  }

  // ---------------------------------------------------------------- marking

  void initialize() {
    fm_.initial_.assign(fm_.vars_.size(), 0);
    std::vector<int> first(fm_.vars_.size(), -1);
    for (std::size_t s = 0; s < fm_.slots_.size(); ++s) {
      const RawSlot& slot = fm_.slots_[s];
      const LeafInstance& leaf = fm_.leaves_[static_cast<std::size_t>(slot.leaf)];
      const PlaceDecl& decl = leaf.model->places[static_cast<std::size_t>(slot.place)];
      const Expr e = decl.initial_for(std::max<std::int64_t>(slot.entry, 0));
      if (uses_rep_index(e) && !leaf.init_index) {
        fail(Errc::ValidationError, "repindex() outside a replication in the initial marking of " + slot.path,
             e.pos(), "REPINDEX_OUTSIDE_REPLICATION");
      }
      if (uses_size_n(e) && !leaf.n) {
        fail(Errc::ValidationError, "n outside a replication in the initial marking of " + slot.path, e.pos(),
             "N_OUTSIDE_REPLICATION");
      }
      const std::int64_t value = evaluate(e, leaf.init_index.value_or(0), leaf.n.value_or(1), {}).as_int();
      if (value < 0) {
        fail(Errc::NegativeMarking, "initial marking of " + slot.path + " is " + std::to_string(value), e.pos());
      }
      auto& owner = first[static_cast<std::size_t>(slot.var)];
      if (owner < 0) {
        owner = static_cast<int>(s);
        fm_.initial_[static_cast<std::size_t>(slot.var)] = value;
      } else if (fm_.initial_[static_cast<std::size_t>(slot.var)] != value) {
        fail(Errc::InconsistentInitialization,
             fm_.slots_[static_cast<std::size_t>(owner)].path + " starts at " +
                 std::to_string(fm_.initial_[static_cast<std::size_t>(slot.var)]) + " but aliased " + slot.path +
                 " starts at " + std::to_string(value));
      }
    }
  }

  // ---------------------------------------------------------------- activities

  struct LeafScope final : DependencyScope {
    const FlatModel& fm;
    const LeafInstance& leaf;
    LeafScope(const FlatModel& f, const LeafInstance& l) : fm(f), leaf(l) {}

    std::optional<int> index(std::string_view place) const {
      const int p = leaf.model->place_index(place);
      if (p < 0) return std::nullopt;
      return p;
    }
    PlaceShape shape(std::string_view place) const override {
      PlaceShape s;
      s.replicated = leaf.narep >= 0;
      s.replicas = s.replicated ? fm.nareps()[static_cast<std::size_t>(leaf.narep)].n : 1;
      if (const auto p = index(place)) s.length = leaf.model->places[static_cast<std::size_t>(*p)].length;
      return s;
    }
    std::vector<std::int64_t> dynamic_replicas(std::string_view place) const override {
      const auto p = index(place);
      if (!p || leaf.narep < 0) return {leaf.replica};
      return leaf.access[static_cast<std::size_t>(*p)].permitted;
    }
    std::optional<std::vector<std::int64_t>> repshared(std::string_view place) const override {
      const auto p = index(place);
      if (!p) return std::nullopt;
      const PlaceAccess& a = leaf.access[static_cast<std::size_t>(*p)];
      if (a.mode != AccessMode::RepShared) return std::nullopt;
      return a.permitted;
    }
  };

  void check_expression(const LeafInstance& leaf, const Expr& e, const std::string& where) {
    const LeafScope scope(fm_, leaf);
    if (leaf.narep < 0 && uses_rep_index(e)) {
      fail(Errc::ValidationError, "repindex() outside a NARep in " + where, e.pos(), "REPINDEX_OUTSIDE_NAREP");
    }
    if (!leaf.n && uses_size_n(e)) {
      fail(Errc::ValidationError, "n outside a replication in " + where, e.pos(), "N_OUTSIDE_REPLICATION");
    }
    for_each_subexpression(e, [&](const Expr& sub) {
      if (const auto* r = sub.as<ast::PlaceRead>()) {
        if (leaf.model->place_index(r->place) < 0) {
          fail(Errc::UnknownPlace, "unknown place '" + r->place + "' in " + where, sub.pos());
        }
        if (!split_indices(*r, scope.shape(r->place))) {
          fail(Errc::ValidationError,
               "wrong number of indices for '" + r->place + "' in " + where, sub.pos(), "BAD_ARITY");
        }
      } else if (const auto* q = sub.as<ast::RepSharedQuery>()) {
        if (leaf.model->place_index(q->place) < 0) {
          fail(Errc::UnknownPlace, "unknown place '" + q->place + "' in " + where, sub.pos());
        }
        if (!scope.repshared(q->place)) {
          fail(Errc::NotRepShared, "place '" + q->place + "' is not rep-shared in " + where, sub.pos());
        }
      }
    });
  }

  int var_for(const LeafInstance& leaf, int leaf_id, const PlaceRef& ref, const std::string& where,
              SourcePos pos) const {
    const int p = leaf.model->place_index(ref.place);
    const PlaceDecl& decl = leaf.model->places[static_cast<std::size_t>(p)];
    if (leaf.narep >= 0) {
      const std::int64_t n = fm_.nareps_[static_cast<std::size_t>(leaf.narep)].n;
      if (ref.replica < 0 || ref.replica >= n) {
        fail(Errc::IndexOutOfRange, where + " addresses replica " + std::to_string(ref.replica) + " of '" +
                                        ref.place + "' outside 0.." + std::to_string(n - 1), pos);
      }
      const auto& permitted = leaf.access[static_cast<std::size_t>(p)].permitted;
      if (!std::binary_search(permitted.begin(), permitted.end(), ref.replica)) {
        fail(Errc::AccessViolation, where + " reads " + to_string(ref) + " without access", pos);
      }
    }
    if (decl.is_array() && (ref.entry < 0 || ref.entry >= *decl.length)) {
      fail(Errc::IndexOutOfRange, where + " addresses entry " + std::to_string(ref.entry) + " of '" + ref.place +
                                      "' of length " + std::to_string(*decl.length), pos);
    }
    return fm_.var_of(leaf_id, p, ref.replica, ref.entry);
  }

  void instantiate(int leaf_id) {
    const LeafInstance& leaf = fm_.leaves_[static_cast<std::size_t>(leaf_id)];
    const LeafScope scope(fm_, leaf);
    const std::int64_t n = leaf.n.value_or(1);
    for (std::size_t d = 0; d < leaf.model->activities.size(); ++d) {
      const ActivityDecl& decl = leaf.model->activities[d];
      ActivityInstance inst;
      inst.id = static_cast<int>(fm_.activities_.size());
      inst.path = child_path(leaf.path, decl.name);
      inst.leaf = leaf_id;
      inst.decl = static_cast<int>(d);
      inst.replica = leaf.replica;
      inst.n = n;

      std::vector<const Expr*> observed = {&decl.enabling, decl.timed() ? &decl.rate : &decl.weight};
      for (const Case& c : decl.cases) observed.push_back(&c.weight);

      std::set<int> reads;
      std::set<int> writes;
      for (const Expr* e : observed) {
        check_expression(leaf, *e, inst.path);
        const DependencySet deps = extract_dependencies(*e, leaf.replica, n, scope);
        inst.dynamic = inst.dynamic || deps.dynamic;
        for (const PlaceRef& ref : deps.reads) reads.insert(var_for(leaf, leaf_id, ref, inst.path, e->pos()));
      }
      for (const Case& c : decl.cases) {
        for (const UpdateStmt& u : c.updates) {
          check_expression(leaf, u.target, inst.path);
          check_expression(leaf, u.value, inst.path);
          DependencySet deps;
          extract_update_dependencies(u, leaf.replica, n, scope, deps);
          inst.dynamic = inst.dynamic || deps.dynamic;
          for (const PlaceRef& ref : deps.reads) var_for(leaf, leaf_id, ref, inst.path, u.value.pos());
          for (const PlaceRef& ref : deps.writes) {
            writes.insert(var_for(leaf, leaf_id, ref, inst.path, u.target.pos()));
          }
        }
      }
      inst.reads.assign(reads.begin(), reads.end());
      inst.writes.assign(writes.begin(), writes.end());
      fm_.activity_index_.emplace(inst.path, inst.id);
      fm_.activities_.push_back(std::move(inst));
    }
  }

  const CompositionNode& root_;
  FlatModel fm_;
  std::vector<Inst> insts_;
  std::vector<std::pair<int, bool>> upshare_pending_;
  std::map<std::pair<int, std::int64_t>, int> ordinal_counter_;
};

// ------------------------------------------------------------------ FlatModel

const ActivityDecl& FlatModel::decl(const ActivityInstance& a) const {
  return leaves_[static_cast<std::size_t>(a.leaf)].model->activities[static_cast<std::size_t>(a.decl)];
}

int FlatModel::var_of(int leaf, int place, std::int64_t replica, std::int64_t entry) const {
  const LeafInstance* l = &leaves_[static_cast<std::size_t>(leaf)];
  if (l->narep >= 0 && replica != l->replica) {
    const int other = nareps_[static_cast<std::size_t>(l->narep)]
                          .leaves[static_cast<std::size_t>(replica)][static_cast<std::size_t>(l->ordinal)];
    l = &leaves_[static_cast<std::size_t>(other)];
  }
  const int slot = l->slot_base[static_cast<std::size_t>(place)] + static_cast<int>(std::max<std::int64_t>(entry, 0));
  return slots_[static_cast<std::size_t>(slot)].var;
}

int FlatModel::find_var(const std::string& path) const {
  const auto it = slot_index_.find(path);
  return it == slot_index_.end() ? -1 : slots_[static_cast<std::size_t>(it->second)].var;
}

int FlatModel::find_activity(const std::string& path) const {
  const auto it = activity_index_.find(path);
  return it == activity_index_.end() ? -1 : it->second;
}

int FlatModel::resolve(int leaf_id, const ast::PlaceRead& read, std::span<const std::int64_t> indices,
                       SourcePos pos) const {
  const LeafInstance& leaf = leaves_[static_cast<std::size_t>(leaf_id)];
  const int p = leaf.model->place_index(read.place);
  if (p < 0) fail(Errc::UnknownPlace, "unknown place '" + read.place + "'", pos);
  const PlaceDecl& decl = leaf.model->places[static_cast<std::size_t>(p)];
  const std::size_t base = decl.is_array() ? 1 : 0;
  std::int64_t replica = leaf.replica;
  std::int64_t entry = -1;
  if (indices.size() == base) {
    if (base) entry = indices[0];
  } else if (leaf.narep >= 0 && indices.size() == base + 1) {
    replica = indices[0];
    if (base) entry = indices[1];
  } else {
    fail(Errc::ValidationError, "wrong number of indices for '" + read.place + "'", pos, "BAD_ARITY");
  }
  if (replica != leaf.replica) {
    const std::int64_t n = nareps_[static_cast<std::size_t>(leaf.narep)].n;
    if (replica < 0 || replica >= n) {
      fail(Errc::IndexOutOfRange, "replica " + std::to_string(replica) + " of '" + read.place + "' outside 0.." +
                                      std::to_string(n - 1), pos);
    }
    const auto& permitted = leaf.access[static_cast<std::size_t>(p)].permitted;
    if (!std::binary_search(permitted.begin(), permitted.end(), replica)) {
      fail(Errc::AccessViolation,
           leaf.path + " accessed " + to_string(PlaceRef{read.place, replica, entry}) + " without access", pos);
    }
  }
  if (base && (entry < 0 || entry >= *decl.length)) {
    fail(Errc::IndexOutOfRange, "entry " + std::to_string(entry) + " of '" + read.place + "' outside 0.." +
                                    std::to_string(*decl.length - 1), pos);
  }
  return var_of(leaf_id, p, replica, entry);
}

FlatModel flatten(const CompositionNode& root) { return Flattener(root).run(); }

AccessSets resolve_access(const FlatModel& fm, int activity) {
  const ActivityInstance& a = fm.activities().at(static_cast<std::size_t>(activity));
  return {a.reads, a.writes};
}

std::vector<int> access_grants(const FlatModel& fm, int activity) {
  const ActivityInstance& a = fm.activities().at(static_cast<std::size_t>(activity));
  const LeafInstance& leaf = fm.leaves()[static_cast<std::size_t>(a.leaf)];
  std::set<int> out;
  for (std::size_t p = 0; p < leaf.model->places.size(); ++p) {
    const PlaceDecl& decl = leaf.model->places[p];
    const std::vector<std::int64_t> own = {leaf.replica};
    const auto& replicas = leaf.narep >= 0 ? leaf.access[p].permitted : own;
    for (std::int64_t j : replicas) {
      for (std::int64_t e = 0; e < decl.entries(); ++e) out.insert(fm.var_of(a.leaf, static_cast<int>(p), j, e));
    }
  }
  return {out.begin(), out.end()};
}

std::vector<std::int64_t> repshared_list(const FlatModel& fm, int activity, const std::string& place) {
  const ActivityInstance& a = fm.activities().at(static_cast<std::size_t>(activity));
  const LeafInstance& leaf = fm.leaves()[static_cast<std::size_t>(a.leaf)];
  const int p = leaf.model->place_index(place);
  if (p < 0) fail(Errc::UnknownPlace, "unknown place '" + place + "'");
  const PlaceAccess& acc = leaf.access[static_cast<std::size_t>(p)];
  if (acc.mode != AccessMode::RepShared) fail(Errc::NotRepShared, "place '" + place + "' is not rep-shared");
  return acc.permitted;
}

Marking initial_marking(const FlatModel& fm) { return fm.initial(); }

namespace {

template <class T>
std::string id_list(const std::vector<T>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ids[i]);
  }
  return out.empty() ? "-" : out;
}

}  // namespace

std::string dump(const FlatModel& fm) {
  std::ostringstream os;
  os << "vars " << fm.vars().size() << '\n';
  for (const CanonicalVar& v : fm.vars()) {
    os << v.id << '\t' << v.path << "\tinit=" << fm.initial()[static_cast<std::size_t>(v.id)];
    os << "\towner=" << v.owner_replica << (v.mutable_ ? "\tmutable" : "\tconst");
    if (v.slots.size() > 1) {
      os << "\taliases=";
      for (std::size_t i = 1; i < v.slots.size(); ++i) {
        if (i > 1) os << ',';
        os << fm.slots()[static_cast<std::size_t>(v.slots[i])].path;
      }
    }
    os << '\n';
  }
  os << "activities " << fm.activities().size() << '\n';
  for (const ActivityInstance& a : fm.activities()) {
    const ActivityDecl& d = fm.decl(a);
    os << a.id << '\t' << a.path << '\t' << to_string(d.timing) << "\treplica=" << a.replica << "\tn=" << a.n
       << "\treads=" << id_list(a.reads) << "\twrites=" << id_list(a.writes);
    if (a.dynamic) os << "\tdynamic";
    os << '\n';
  }
  return os.str();
}

// ------------------------------------------------------------------ InstanceContext

std::span<const std::int64_t> InstanceContext::repshared(std::string_view place, SourcePos pos) const {
  const int p = leaf_.model->place_index(place);
  if (p < 0) fail(Errc::UnknownPlace, "unknown place '" + std::string(place) + "'", pos);
  const PlaceAccess& acc = leaf_.access[static_cast<std::size_t>(p)];
  if (acc.mode != AccessMode::RepShared) {
    fail(Errc::NotRepShared, "place '" + std::string(place) + "' is not rep-shared", pos);
  }
  return acc.permitted;
}

int InstanceContext::target(const Expr& target) const {
  const auto* r = target.as<ast::PlaceRead>();
  if (!r) fail(Errc::ValidationError, "update target must be a place", target.pos(), "BAD_TARGET");
  std::int64_t idx[2] = {0, 0};
  const std::size_t count = r->indices.size();
  if (count > 2) fail(Errc::ValidationError, "too many indices", target.pos(), "BAD_ARITY");
  for (std::size_t i = 0; i < count; ++i) idx[i] = evaluate(r->indices[i], *this).as_int();
  return fm_.resolve(leaf_id_, *r, std::span<const std::int64_t>(idx, count), target.pos());
}

}  // namespace narep
