#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "narep/expr.hpp"

namespace narep::detail {

/// Thrown while folding when a value depends on the marking.
struct NotStatic {};

class Evaluator {
 public:
  explicit Evaluator(const EvalContext& ctx) : ctx_(ctx) {}

  Value eval(const Expr& e);

  /// Binds a comprehension variable; nullopt marks it as unknown (folding).
  void push_var(std::string_view name, std::optional<std::int64_t> value) {
    vars_.emplace_back(name, value);
  }
  void pop_var() { vars_.pop_back(); }

  std::int64_t list_size(const Expr& list);
  std::int64_t list_at(const Expr& list, std::int64_t k);

  template <class F>
  void for_each_in_list(const Expr& list, F&& fn) {
    if (const auto* q = list.as<ast::RepSharedQuery>()) {
      for (std::int64_t j : ctx_.repshared(q->place, list.pos())) fn(j);
      return;
    }
    const std::int64_t len = list_size(list);
    for (std::int64_t j = 0; j < len; ++j) fn(j);
  }

 private:
  Value eval_node(const ast::IntLit& n, const Expr& self);
  Value eval_node(const ast::RealLit& n, const Expr& self);
  Value eval_node(const ast::BoolLit& n, const Expr& self);
  Value eval_node(const ast::RepIndex& n, const Expr& self);
  Value eval_node(const ast::SizeN& n, const Expr& self);
  Value eval_node(const ast::Var& n, const Expr& self);
  Value eval_node(const ast::Unary& n, const Expr& self);
  Value eval_node(const ast::Binary& n, const Expr& self);
  Value eval_node(const ast::Cond& n, const Expr& self);
  Value eval_node(const ast::PlaceRead& n, const Expr& self);
  Value eval_node(const ast::RepSharedQuery& n, const Expr& self);
  Value eval_node(const ast::Range& n, const Expr& self);
  Value eval_node(const ast::ListIndex& n, const Expr& self);
  Value eval_node(const ast::Call& n, const Expr& self);
  Value eval_node(const ast::Sum& n, const Expr& self);

  const EvalContext& ctx_;
  std::vector<std::pair<std::string_view, std::optional<std::int64_t>>> vars_;
};

}  // namespace narep::detail
