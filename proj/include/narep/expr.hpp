#pragma once

// Expression language used by gates, rates, case weights, updates and initial
// markings. See docs/grammar.md for the concrete syntax.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "narep/error.hpp"

namespace narep {

enum class UnaryOp { Neg, Not };

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

enum class Builtin { Min, Max, Size };

namespace ast {
struct Node;
}

/// Immutable expression handle. Copies share the underlying tree.
class Expr {
 public:
  Expr();  // integer literal 0
  Expr(ast::Node node, SourcePos pos = {});

  const ast::Node& node() const { return *node_; }
  SourcePos pos() const { return pos_; }
  /// Type inferred at construction; nullopt when the tree is ill-typed.
  std::optional<int> cached_type() const { return type_; }

  template <class T>
  const T* as() const;

  static Expr integer(std::int64_t v);
  static Expr real(double v);
  static Expr boolean(bool v);

 private:
  std::shared_ptr<const ast::Node> node_;
  SourcePos pos_;
  std::optional<int> type_;
};

namespace ast {

struct IntLit {
  std::int64_t value;
};
struct RealLit {
  double value;
};
struct BoolLit {
  bool value;
};
/// `repindex()`: index of the executing replica in the innermost NARep.
struct RepIndex {};
/// `n`: size of the enclosing replication.
struct SizeN {};
/// Variable bound by a `sum` comprehension.
struct Var {
  std::string name;
};
struct Unary {
  UnaryOp op;
  Expr operand;
};
struct Binary {
  BinaryOp op;
  Expr lhs;
  Expr rhs;
};
struct Cond {
  Expr cond;
  Expr then_branch;
  Expr else_branch;
};
/// `P`, `P[i]` or `P[j][k]`. Which bracket addresses the replica and which the
/// array entry depends on the place's shape; see PlaceShape.
struct PlaceRead {
  std::string place;
  std::vector<Expr> indices;
};
/// `repshared(P)`: list of replica indices.
struct RepSharedQuery {
  std::string place;
};
/// `range(e)`: the list 0, 1, ..., e-1.
struct Range {
  Expr count;
};
/// `L[k]` on a list-valued expression.
struct ListIndex {
  Expr list;
  Expr index;
};
struct Call {
  Builtin fn;
  std::vector<Expr> args;
};
/// `sum(j in L: body)`.
struct Sum {
  std::string var;
  Expr list;
  Expr body;
};

using NodeVariant = std::variant<IntLit, RealLit, BoolLit, RepIndex, SizeN, Var, Unary, Binary,
                                 Cond, PlaceRead, RepSharedQuery, Range, ListIndex, Call, Sum>;

struct Node : NodeVariant {
  using NodeVariant::NodeVariant;
  const NodeVariant& base() const { return *this; }
};

}  // namespace ast

template <class T>
const T* Expr::as() const {
  return std::get_if<T>(&node_->base());
}

/// Structural equality; source positions are ignored.
bool structurally_equal(const Expr& a, const Expr& b);

struct UpdateStmt {
  Expr target;  // always an ast::PlaceRead
  Expr value;
};

// ---------------------------------------------------------------------------
// Parsing and printing

/// Parses a whole expression. Throws Error(SyntaxError) with line/column.
Expr parse(std::string_view source);

/// Re-parseable text form with minimal parentheses.
std::string pretty_print(const Expr& e);

// ---------------------------------------------------------------------------
// Types

enum class ExprType { Int, Real, Bool, List };

std::string_view to_string(ExprType t);

/// Static type of `e`; throws Error(TypeError) on ill-typed input.
ExprType type_of(const Expr& e);

enum class ExprRole {
  Predicate,  // boolean
  Numeric,    // rate or weight: int or real
  Integer,    // update value, index, initial marking
};

/// Type-checks `e` for use in `role`.
void check_type(const Expr& e, ExprRole role);

// ---------------------------------------------------------------------------
// Evaluation

/// Scalar result of evaluation. Lists never escape the evaluator.
class Value {
 public:
  Value(std::int64_t v) : v_(v) {}
  Value(double v) : v_(v) {}
  Value(bool v) : v_(v) {}

  bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_real() const { return std::holds_alternative<double>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }

  std::int64_t as_int() const;
  double as_real() const;  // ints promote
  bool as_bool() const;

  friend bool operator==(const Value&, const Value&) = default;

 private:
  std::variant<std::int64_t, double, bool> v_;
};

/// Supplies everything an expression can observe.
class EvalContext {
 public:
  virtual ~EvalContext() = default;
  virtual std::int64_t rep_index() const = 0;
  virtual std::int64_t size_n() const = 0;
  /// Reads a place; `indices` are the already-evaluated bracket values.
  virtual std::int64_t read(const ast::PlaceRead& place, std::span<const std::int64_t> indices,
                            SourcePos pos) const = 0;
  virtual std::span<const std::int64_t> repshared(std::string_view place, SourcePos pos) const = 0;
};

/// Pure function of (e, ctx). Errors: DivisionByZero, Overflow,
/// IndexOutOfRange, AccessViolation (raised by the context).
Value evaluate(const Expr& e, const EvalContext& ctx);

/// Stand-alone context: `marking` maps a place name to its values. For
/// one-bracket reads the bracket selects the entry; for no-bracket reads the
/// entry at `replica_index` is used when the place has more than one value.
struct SimpleContext final : EvalContext {
  std::int64_t replica_index = 0;
  std::int64_t n = 1;
  std::vector<std::pair<std::string, std::vector<std::int64_t>>> marking;
  std::vector<std::pair<std::string, std::vector<std::int64_t>>> repshared_lists;

  std::int64_t rep_index() const override { return replica_index; }
  std::int64_t size_n() const override { return n; }
  std::int64_t read(const ast::PlaceRead& place, std::span<const std::int64_t> indices,
                    SourcePos pos) const override;
  std::span<const std::int64_t> repshared(std::string_view place, SourcePos pos) const override;
};

Value evaluate(const Expr& e, std::int64_t replica_index, std::int64_t n,
               const std::vector<std::pair<std::string, std::vector<std::int64_t>>>& marking);

/// Euclidean division and remainder: 0 <= mod(a, b) < |b| and
/// b * div(a, b) + mod(a, b) == a. Throw DivisionByZero when b == 0.
std::int64_t div_euclid(std::int64_t a, std::int64_t b);
std::int64_t mod_euclid(std::int64_t a, std::int64_t b);

// ---------------------------------------------------------------------------
// Static dependency extraction

/// A place replica (and array entry) an expression can touch. `entry` is -1
/// for scalar places.
struct PlaceRef {
  std::string place;
  std::int64_t replica = 0;
  std::int64_t entry = -1;

  friend bool operator==(const PlaceRef&, const PlaceRef&) = default;
  friend auto operator<=>(const PlaceRef&, const PlaceRef&) = default;
};

std::string to_string(const PlaceRef& ref);

struct DependencySet {
  std::set<PlaceRef> reads;
  std::set<PlaceRef> writes;
  /// Some index depended on the marking, so a whole place was included.
  bool dynamic = false;
};

/// How a place name is addressed from the expression's scope.
struct PlaceShape {
  /// Addressable by replica index (the scope is a NARep template).
  bool replicated = false;
  std::int64_t replicas = 1;
  /// Array length; nullopt for scalar places.
  std::optional<std::int64_t> length;
};

/// Index selection for one read: which replica and which entry.
struct ResolvedIndices {
  const Expr* replica = nullptr;  // nullptr: the executing replica
  const Expr* entry = nullptr;    // nullptr: scalar
};

/// Splits a read's brackets into replica/entry positions according to
/// `shape`. Returns nullopt when the bracket count does not fit the shape.
std::optional<ResolvedIndices> split_indices(const ast::PlaceRead& read, const PlaceShape& shape);

class DependencyScope {
 public:
  virtual ~DependencyScope() = default;
  virtual PlaceShape shape(std::string_view place) const = 0;
  /// Replicas included when a replica index is marking-dependent.
  virtual std::vector<std::int64_t> dynamic_replicas(std::string_view place) const;
  /// Value of repshared(place) for the executing replica; nullopt if unknown.
  virtual std::optional<std::vector<std::int64_t>> repshared(std::string_view place) const;
};

/// Partially evaluates with RepIndex := replica_index and N := n. Constant
/// indices yield exact references, marking-dependent ones set `dynamic` and
/// include every replica/entry of the place. Never throws for well-typed
/// input.
DependencySet extract_dependencies(const Expr& e, std::int64_t replica_index, std::int64_t n,
                                   const DependencyScope& scope);

/// Same, under the default scope: every place is a replicated scalar over n
/// replicas, and repshared() is unknown.
DependencySet extract_dependencies(const Expr& e, std::int64_t replica_index, std::int64_t n);

/// Adds the reads and writes of an update statement to `deps`.
void extract_update_dependencies(const UpdateStmt& u, std::int64_t replica_index, std::int64_t n,
                                 const DependencyScope& scope, DependencySet& deps);

/// Value of `e` if it does not depend on the marking.
std::optional<Value> try_fold(const Expr& e, std::int64_t replica_index, std::int64_t n);

/// Calls `fn` on `e` and every subexpression, parents first.
void for_each_subexpression(const Expr& e, const std::function<void(const Expr&)>& fn);

/// True when `e` contains a place read.
bool reads_places(const Expr& e);
/// True when `e` mentions repindex().
bool uses_rep_index(const Expr& e);
/// True when `e` mentions n.
bool uses_size_n(const Expr& e);

}  // namespace narep
