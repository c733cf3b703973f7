#pragma once

// Random well-typed expression generator for property tests.

#include <random>
#include <string>
#include <vector>

#include "narep/expr.hpp"

namespace narep::testing {

class RandomExpr {
 public:
  RandomExpr(std::uint64_t seed, std::vector<std::string> places, int max_depth = 4)
      : rng_(seed), places_(std::move(places)), max_depth_(max_depth) {}

  /// Set when generated expressions may index places by two brackets.
  std::vector<std::string> array_places;
  /// Places that may appear in repshared().
  std::vector<std::string> repshared_places;
  /// Allow repindex() and n.
  bool replica_symbols = true;
  /// Index expressions are biased towards small in-range values.
  std::int64_t index_bound = 4;

  Expr boolean(int depth = 0) {
    const int pick = leaf(depth) ? choose(2) : choose(7);
    switch (pick) {
      case 0: return Expr::boolean(choose(2) == 0);
      case 1:
      case 2: return cmp(depth);
      case 3: return Expr(ast::Unary{UnaryOp::Not, boolean(depth + 1)});
      case 4: return Expr(ast::Binary{BinaryOp::And, boolean(depth + 1), boolean(depth + 1)});
      case 5: return Expr(ast::Binary{BinaryOp::Or, boolean(depth + 1), boolean(depth + 1)});
      default:
        return Expr(ast::Cond{boolean(depth + 1), boolean(depth + 1), boolean(depth + 1)});
    }
  }

  Expr integer(int depth = 0) {
    if (leaf(depth)) return int_leaf();
    switch (choose(12)) {
      case 0: return int_leaf();
      case 1: return place_read(depth);
      case 2: return place_read(depth);
      case 3: return bin(BinaryOp::Add, depth);
      case 4: return bin(BinaryOp::Sub, depth);
      case 5: return bin(BinaryOp::Mul, depth);
      case 6: return bin(choose(2) ? BinaryOp::Div : BinaryOp::Mod, depth);
      case 7: return Expr(ast::Unary{UnaryOp::Neg, integer(depth + 1)});
      case 8: return Expr(ast::Cond{boolean(depth + 1), integer(depth + 1), integer(depth + 1)});
      case 9:
        return Expr(ast::Call{choose(2) ? Builtin::Min : Builtin::Max,
                              {integer(depth + 1), integer(depth + 1)}});
      case 10: return sum(depth, false);
      default: return list_expr(depth);
    }
  }

  Expr real(int depth = 0) {
    if (leaf(depth)) {
      static constexpr double kReals[] = {0.5, 1.25, 2.0, 0.1, 3.75};
      return Expr::real(kReals[choose(5)]);
    }
    switch (choose(6)) {
      case 0: return Expr(ast::Binary{BinaryOp::Add, real(depth + 1), integer(depth + 1)});
      case 1: return Expr(ast::Binary{BinaryOp::Mul, integer(depth + 1), real(depth + 1)});
      case 2: return Expr(ast::Binary{BinaryOp::Div, real(depth + 1), real(depth + 1)});
      case 3: return Expr(ast::Cond{boolean(depth + 1), real(depth + 1), integer(depth + 1)});
      case 4: return sum(depth, true);
      default: return Expr(ast::Unary{UnaryOp::Neg, real(depth + 1)});
    }
  }

 private:
  int choose(int k) { return std::uniform_int_distribution<int>(0, k - 1)(rng_); }
  bool leaf(int depth) { return depth >= max_depth_ || choose(4) == 0; }

  Expr int_leaf() {
    const int pick = choose(var_stack_.empty() ? 4 : 5);
    if (pick == 0 && replica_symbols) return Expr(ast::RepIndex{});
    if (pick == 1 && replica_symbols) return Expr(ast::SizeN{});
    if (pick == 4) return Expr(ast::Var{var_stack_[choose(static_cast<int>(var_stack_.size()))]});
    return Expr::integer(choose(10));
  }

  Expr index(int depth) {
    // mostly well-behaved indices so that reads succeed
    switch (choose(5)) {
      case 0: return Expr::integer(choose(static_cast<int>(index_bound)));
      case 1:
        if (replica_symbols) {
          return Expr(ast::Binary{
              BinaryOp::Mod,
              Expr(ast::Binary{choose(2) ? BinaryOp::Add : BinaryOp::Sub, Expr(ast::RepIndex{}),
                               Expr::integer(choose(3))}),
              Expr(ast::SizeN{})});
        }
        return Expr::integer(0);
      case 2:
        return Expr(ast::Binary{BinaryOp::Mod, integer(depth + 1),
                                Expr::integer(index_bound)});
      default: return Expr(ast::Binary{BinaryOp::Mod, int_leaf(), Expr::integer(index_bound)});
    }
  }

  Expr place_read(int depth) {
    if (!array_places.empty() && choose(4) == 0) {
      ast::PlaceRead r{array_places[static_cast<std::size_t>(choose(static_cast<int>(array_places.size())))], {}};
      if (choose(2)) r.indices.push_back(index(depth));
      r.indices.push_back(index(depth));
      return Expr(std::move(r));
    }
    ast::PlaceRead r{places_[static_cast<std::size_t>(choose(static_cast<int>(places_.size())))], {}};
    if (choose(2)) r.indices.push_back(index(depth));
    return Expr(std::move(r));
  }

  Expr bin(BinaryOp op, int depth) { return Expr(ast::Binary{op, integer(depth + 1), integer(depth + 1)}); }

  Expr cmp(int depth) {
    static constexpr BinaryOp kOps[] = {BinaryOp::Lt, BinaryOp::Le, BinaryOp::Gt,
                                        BinaryOp::Ge, BinaryOp::Eq, BinaryOp::Ne};
    if (choose(3) == 0) return Expr(ast::Binary{kOps[choose(6)], real(depth + 1), integer(depth + 1)});
    return Expr(ast::Binary{kOps[choose(6)], integer(depth + 1), integer(depth + 1)});
  }

  Expr list(int depth) {
    if (!repshared_places.empty() && choose(2) == 0) {
      return Expr(ast::RepSharedQuery{
          repshared_places[static_cast<std::size_t>(choose(static_cast<int>(repshared_places.size())))]});
    }
    if (choose(3) == 0) return Expr(ast::Range{Expr(ast::Binary{BinaryOp::Mod, integer(depth + 1), Expr::integer(5)})});
    return Expr(ast::Range{Expr::integer(choose(5))});
  }

  Expr list_expr(int depth) {
    if (choose(2)) return Expr(ast::Call{Builtin::Size, {list(depth)}});
    return Expr(ast::ListIndex{list(depth), index(depth)});
  }

  Expr sum(int depth, bool real_body) {
    std::string var = "j" + std::to_string(var_stack_.size());
    Expr l = list(depth);
    var_stack_.push_back(var);
    Expr body = real_body ? real(depth + 1) : integer(depth + 1);
    var_stack_.pop_back();
    return Expr(ast::Sum{std::move(var), std::move(l), std::move(body)});
  }

  std::mt19937_64 rng_;
  std::vector<std::string> places_;
  int max_depth_;
  std::vector<std::string> var_stack_;
};

}  // namespace narep::testing
