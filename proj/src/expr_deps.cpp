#include <map>

#include "expr_eval.hpp"
#include "narep/expr.hpp"

namespace narep {

std::string to_string(const PlaceRef& ref) {
  std::string s = ref.place + "@" + std::to_string(ref.replica);
  if (ref.entry >= 0) s += "[" + std::to_string(ref.entry) + "]";
  return s;
}

std::vector<std::int64_t> DependencyScope::dynamic_replicas(std::string_view place) const {
  const PlaceShape s = shape(place);
  std::vector<std::int64_t> all(static_cast<std::size_t>(s.replicas));
  for (std::int64_t j = 0; j < s.replicas; ++j) all[static_cast<std::size_t>(j)] = j;
  return all;
}

std::optional<std::vector<std::int64_t>> DependencyScope::repshared(std::string_view) const {
  return std::nullopt;
}

std::optional<ResolvedIndices> split_indices(const ast::PlaceRead& read, const PlaceShape& shape) {
  const std::size_t base = shape.length ? 1 : 0;
  const std::size_t count = read.indices.size();
  ResolvedIndices out;
  if (count == base) {
    if (base) out.entry = &read.indices[0];
    return out;
  }
  if (shape.replicated && count == base + 1) {
    out.replica = &read.indices[0];
    if (base) out.entry = &read.indices[1];
    return out;
  }
  return std::nullopt;
}

namespace {

struct AnyVisitor {
  bool (*pred)(const ast::Node&);

  bool operator()(const Expr& e) const {
    if (pred(e.node())) return true;
    return std::visit([&](const auto& n) { return children(n); }, e.node().base());
  }

  template <class T>
  bool children(const T&) const {
    return false;
  }
  bool children(const ast::Unary& n) const { return (*this)(n.operand); }
  bool children(const ast::Binary& n) const { return (*this)(n.lhs) || (*this)(n.rhs); }
  bool children(const ast::Cond& n) const {
    return (*this)(n.cond) || (*this)(n.then_branch) || (*this)(n.else_branch);
  }
  bool children(const ast::PlaceRead& n) const {
    for (const Expr& i : n.indices) {
      if ((*this)(i)) return true;
    }
    return false;
  }
  bool children(const ast::Range& n) const { return (*this)(n.count); }
  bool children(const ast::ListIndex& n) const { return (*this)(n.list) || (*this)(n.index); }
  bool children(const ast::Call& n) const {
    for (const Expr& a : n.args) {
      if ((*this)(a)) return true;
    }
    return false;
  }
  bool children(const ast::Sum& n) const { return (*this)(n.list) || (*this)(n.body); }
};

}  // namespace

namespace {

struct ChildVisitor {
  const std::function<void(const Expr&)>& fn;

  template <class T>
  void operator()(const T&) const {}
  void operator()(const ast::Unary& n) const { for_each_subexpression(n.operand, fn); }
  void operator()(const ast::Binary& n) const {
    for_each_subexpression(n.lhs, fn);
    for_each_subexpression(n.rhs, fn);
  }
  void operator()(const ast::Cond& n) const {
    for_each_subexpression(n.cond, fn);
    for_each_subexpression(n.then_branch, fn);
    for_each_subexpression(n.else_branch, fn);
  }
  void operator()(const ast::PlaceRead& n) const {
    for (const Expr& i : n.indices) for_each_subexpression(i, fn);
  }
  void operator()(const ast::Range& n) const { for_each_subexpression(n.count, fn); }
  void operator()(const ast::ListIndex& n) const {
    for_each_subexpression(n.list, fn);
    for_each_subexpression(n.index, fn);
  }
  void operator()(const ast::Call& n) const {
    for (const Expr& a : n.args) for_each_subexpression(a, fn);
  }
  void operator()(const ast::Sum& n) const {
    for_each_subexpression(n.list, fn);
    for_each_subexpression(n.body, fn);
  }
};

}  // namespace

void for_each_subexpression(const Expr& e, const std::function<void(const Expr&)>& fn) {
  fn(e);
  std::visit(ChildVisitor{fn}, e.node().base());
}

bool reads_places(const Expr& e) {
  return AnyVisitor{[](const ast::Node& n) {
    return std::holds_alternative<ast::PlaceRead>(n.base());
  }}(e);
}

bool uses_rep_index(const Expr& e) {
  return AnyVisitor{[](const ast::Node& n) {
    return std::holds_alternative<ast::RepIndex>(n.base());
  }}(e);
}

bool uses_size_n(const Expr& e) {
  return AnyVisitor{[](const ast::Node& n) {
    return std::holds_alternative<ast::SizeN>(n.base());
  }}(e);
}

namespace {

struct DefaultScope final : DependencyScope {
  std::int64_t n;
  explicit DefaultScope(std::int64_t n_) : n(n_) {}
  PlaceShape shape(std::string_view) const override { return {true, n, std::nullopt}; }
};

class FoldContext final : public EvalContext {
 public:
  FoldContext(const DependencyScope* scope, std::int64_t rep, std::int64_t n)
      : scope_(scope), rep_(rep), n_(n) {}

  std::int64_t rep_index() const override { return rep_; }
  std::int64_t size_n() const override { return n_; }
  std::int64_t read(const ast::PlaceRead&, std::span<const std::int64_t>, SourcePos) const override {
    throw detail::NotStatic{};
  }
  std::span<const std::int64_t> repshared(std::string_view place, SourcePos) const override {
    auto it = lists_.find(std::string(place));
    if (it == lists_.end()) {
      std::optional<std::vector<std::int64_t>> l;
      if (scope_) l = scope_->repshared(place);
      if (!l) throw detail::NotStatic{};
      it = lists_.emplace(std::string(place), std::move(*l)).first;
    }
    return it->second;
  }

 private:
  const DependencyScope* scope_;
  std::int64_t rep_;
  std::int64_t n_;
  mutable std::map<std::string, std::vector<std::int64_t>> lists_;
};

class Collector {
 public:
  Collector(const DependencyScope& scope, std::int64_t rep, std::int64_t n, DependencySet& deps)
      : scope_(scope), fold_ctx_(&scope, rep, n), rep_(rep), deps_(deps) {}

  void collect(const Expr& e) {
    std::visit([&](const auto& node) { collect_node(node); }, e.node().base());
  }

  void collect_write(const Expr& target) {
    const auto* r = target.as<ast::PlaceRead>();
    if (!r) return;
    for (const Expr& i : r->indices) collect(i);
    for (PlaceRef& ref : refs_of(*r)) deps_.writes.insert(std::move(ref));
  }

 private:
  std::optional<Value> fold(const Expr& e) {
    if (reads_places(e)) return std::nullopt;
    detail::Evaluator ev(fold_ctx_);
    for (const auto& [name, v] : env_) ev.push_var(name, v);
    try {
      return ev.eval(e);
    } catch (const detail::NotStatic&) {
      return std::nullopt;
    } catch (const Error&) {
      // an index that fails to evaluate is treated as unknown
      return std::nullopt;
    }
  }

  std::optional<std::vector<std::int64_t>> fold_list(const Expr& list) {
    if (const auto* q = list.as<ast::RepSharedQuery>()) return scope_.repshared(q->place);
    if (const auto* r = list.as<ast::Range>()) {
      const auto count = fold(r->count);
      if (!count) return std::nullopt;
      std::vector<std::int64_t> out;
      for (std::int64_t j = 0; j < count->as_int(); ++j) out.push_back(j);
      return out;
    }
    return std::nullopt;
  }

  std::vector<PlaceRef> refs_of(const ast::PlaceRead& r) {
    const PlaceShape shape = scope_.shape(r.place);
    std::vector<std::int64_t> replicas;
    std::vector<std::int64_t> entries;
    const auto all_entries = [&] {
      std::vector<std::int64_t> out;
      if (shape.length) {
        for (std::int64_t k = 0; k < *shape.length; ++k) out.push_back(k);
      } else {
        out.push_back(-1);
      }
      return out;
    };

    const auto split = split_indices(r, shape);
    if (!split) {
      deps_.dynamic = true;
      replicas = scope_.dynamic_replicas(r.place);
      entries = all_entries();
    } else {
      if (split->replica) {
        if (const auto v = fold(*split->replica)) {
          replicas.push_back(v->as_int());
        } else {
          deps_.dynamic = true;
          replicas = scope_.dynamic_replicas(r.place);
        }
      } else {
        replicas.push_back(rep_);
      }
      if (split->entry) {
        if (const auto v = fold(*split->entry)) {
          entries.push_back(v->as_int());
        } else {
          deps_.dynamic = true;
          entries = all_entries();
        }
      } else {
        entries.push_back(-1);
      }
    }

    std::vector<PlaceRef> out;
    out.reserve(replicas.size() * entries.size());
    for (std::int64_t j : replicas) {
      for (std::int64_t k : entries) out.push_back(PlaceRef{r.place, j, k});
    }
    return out;
  }

  template <class T>
  void collect_node(const T&) {}

  void collect_node(const ast::Unary& n) { collect(n.operand); }

  void collect_node(const ast::Binary& n) {
    collect(n.lhs);
    if (n.op == BinaryOp::And || n.op == BinaryOp::Or) {
      // the right operand is skipped when the left one decides the result
      if (const auto v = fold(n.lhs)) {
        if (v->as_bool() == (n.op == BinaryOp::Or)) return;
      }
    }
    collect(n.rhs);
  }

  void collect_node(const ast::Cond& n) {
    collect(n.cond);
    if (const auto v = fold(n.cond)) {
      collect(v->as_bool() ? n.then_branch : n.else_branch);
      return;
    }
    collect(n.then_branch);
    collect(n.else_branch);
  }

  void collect_node(const ast::PlaceRead& n) {
    for (const Expr& i : n.indices) collect(i);
    for (PlaceRef& ref : refs_of(n)) deps_.reads.insert(std::move(ref));
  }

  void collect_node(const ast::Range& n) { collect(n.count); }

  void collect_node(const ast::ListIndex& n) {
    collect(n.list);
    collect(n.index);
  }

  void collect_node(const ast::Call& n) {
    for (const Expr& a : n.args) collect(a);
  }

  void collect_node(const ast::Sum& n) {
    collect(n.list);
    if (const auto values = fold_list(n.list)) {
      for (std::int64_t j : *values) {
        env_.emplace_back(n.var, j);
        collect(n.body);
        env_.pop_back();
      }
      return;
    }
    env_.emplace_back(n.var, std::nullopt);
    collect(n.body);
    env_.pop_back();
  }

  const DependencyScope& scope_;
  FoldContext fold_ctx_;
  std::int64_t rep_;
  DependencySet& deps_;
  std::vector<std::pair<std::string, std::optional<std::int64_t>>> env_;
};

}  // namespace

DependencySet extract_dependencies(const Expr& e, std::int64_t replica_index, std::int64_t n,
                                   const DependencyScope& scope) {
  DependencySet deps;
  Collector(scope, replica_index, n, deps).collect(e);
  return deps;
}

DependencySet extract_dependencies(const Expr& e, std::int64_t replica_index, std::int64_t n) {
  return extract_dependencies(e, replica_index, n, DefaultScope(n));
}

void extract_update_dependencies(const UpdateStmt& u, std::int64_t replica_index, std::int64_t n,
                                 const DependencyScope& scope, DependencySet& deps) {
  Collector c(scope, replica_index, n, deps);
  c.collect_write(u.target);
  c.collect(u.value);
}

std::optional<Value> try_fold(const Expr& e, std::int64_t replica_index, std::int64_t n) {
  if (reads_places(e)) return std::nullopt;
  FoldContext ctx(nullptr, replica_index, n);
  detail::Evaluator ev(ctx);
  try {
    return evaluate(e, ctx);
  } catch (const detail::NotStatic&) {
    return std::nullopt;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace narep
