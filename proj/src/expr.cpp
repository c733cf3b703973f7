#include <algorithm>
#include <cmath>

#include "expr_eval.hpp"
#include "narep/expr.hpp"

namespace narep {

Expr::Expr() : Expr(ast::IntLit{0}) {}

namespace {
std::optional<int> infer_type(const Expr& e);
}

Expr::Expr(ast::Node node, SourcePos pos)
    : node_(std::make_shared<const ast::Node>(std::move(node))), pos_(pos) {
  type_ = infer_type(*this);
}

Expr Expr::integer(std::int64_t v) { return Expr(ast::IntLit{v}); }
Expr Expr::real(double v) { return Expr(ast::RealLit{v}); }
Expr Expr::boolean(bool v) { return Expr(ast::BoolLit{v}); }

// ---------------------------------------------------------------------------

namespace {

struct EqualVisitor {
  const ast::Node& other;

  template <class T>
  bool operator()(const T& a) const {
    const T* b = std::get_if<T>(&other.base());
    return b && same(a, *b);
  }

  static bool same(const ast::IntLit& a, const ast::IntLit& b) { return a.value == b.value; }
  static bool same(const ast::RealLit& a, const ast::RealLit& b) {
    return a.value == b.value || (std::isnan(a.value) && std::isnan(b.value));
  }
  static bool same(const ast::BoolLit& a, const ast::BoolLit& b) { return a.value == b.value; }
  static bool same(const ast::RepIndex&, const ast::RepIndex&) { return true; }
  static bool same(const ast::SizeN&, const ast::SizeN&) { return true; }
  static bool same(const ast::Var& a, const ast::Var& b) { return a.name == b.name; }
  static bool same(const ast::Unary& a, const ast::Unary& b) {
    return a.op == b.op && structurally_equal(a.operand, b.operand);
  }
  static bool same(const ast::Binary& a, const ast::Binary& b) {
    return a.op == b.op && structurally_equal(a.lhs, b.lhs) && structurally_equal(a.rhs, b.rhs);
  }
  static bool same(const ast::Cond& a, const ast::Cond& b) {
    return structurally_equal(a.cond, b.cond) &&
           structurally_equal(a.then_branch, b.then_branch) &&
           structurally_equal(a.else_branch, b.else_branch);
  }
  static bool same_list(const std::vector<Expr>& a, const std::vector<Expr>& b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                      [](const Expr& x, const Expr& y) { return structurally_equal(x, y); });
  }
  static bool same(const ast::PlaceRead& a, const ast::PlaceRead& b) {
    return a.place == b.place && same_list(a.indices, b.indices);
  }
  static bool same(const ast::RepSharedQuery& a, const ast::RepSharedQuery& b) {
    return a.place == b.place;
  }
  static bool same(const ast::Range& a, const ast::Range& b) {
    return structurally_equal(a.count, b.count);
  }
  static bool same(const ast::ListIndex& a, const ast::ListIndex& b) {
    return structurally_equal(a.list, b.list) && structurally_equal(a.index, b.index);
  }
  static bool same(const ast::Call& a, const ast::Call& b) {
    return a.fn == b.fn && same_list(a.args, b.args);
  }
  static bool same(const ast::Sum& a, const ast::Sum& b) {
    return a.var == b.var && structurally_equal(a.list, b.list) &&
           structurally_equal(a.body, b.body);
  }
};

}  // namespace

bool structurally_equal(const Expr& a, const Expr& b) {
  return std::visit(EqualVisitor{b.node()}, a.node().base());
}

// ---------------------------------------------------------------------------
// Types

std::string_view to_string(ExprType t) {
  switch (t) {
    case ExprType::Int: return "int";
    case ExprType::Real: return "real";
    case ExprType::Bool: return "bool";
    case ExprType::List: return "list";
  }
  return "?";
}

namespace {

bool numeric(ExprType t) { return t == ExprType::Int || t == ExprType::Real; }

ExprType promote(ExprType a, ExprType b) {
  return a == ExprType::Int && b == ExprType::Int ? ExprType::Int : ExprType::Real;
}

[[noreturn]] void type_error(const Expr& e, const std::string& msg) {
  fail(Errc::TypeError, msg + " in '" + pretty_print(e) + "'", e.pos());
}

struct TypeVisitor {
  const Expr& self;

  ExprType expect(const Expr& e, ExprType want) const {
    const ExprType t = type_of(e);
    if (t != want) {
      type_error(e, "expected " + std::string(to_string(want)) + ", got " +
                        std::string(to_string(t)));
    }
    return t;
  }
  ExprType expect_numeric(const Expr& e) const {
    const ExprType t = type_of(e);
    if (!numeric(t)) type_error(e, "expected a number, got " + std::string(to_string(t)));
    return t;
  }

  ExprType operator()(const ast::IntLit&) const { return ExprType::Int; }
  ExprType operator()(const ast::RealLit&) const { return ExprType::Real; }
  ExprType operator()(const ast::BoolLit&) const { return ExprType::Bool; }
  ExprType operator()(const ast::RepIndex&) const { return ExprType::Int; }
  ExprType operator()(const ast::SizeN&) const { return ExprType::Int; }
  ExprType operator()(const ast::Var&) const { return ExprType::Int; }

  ExprType operator()(const ast::Unary& n) const {
    if (n.op == UnaryOp::Not) return expect(n.operand, ExprType::Bool);
    return expect_numeric(n.operand);
  }

  ExprType operator()(const ast::Binary& n) const {
    switch (n.op) {
      case BinaryOp::Add:
      case BinaryOp::Sub:
      case BinaryOp::Mul:
      case BinaryOp::Div: return promote(expect_numeric(n.lhs), expect_numeric(n.rhs));
      case BinaryOp::Mod:
        expect(n.lhs, ExprType::Int);
        expect(n.rhs, ExprType::Int);
        return ExprType::Int;
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge:
        expect_numeric(n.lhs);
        expect_numeric(n.rhs);
        return ExprType::Bool;
      case BinaryOp::Eq:
      case BinaryOp::Ne: {
        const ExprType a = type_of(n.lhs);
        const ExprType b = type_of(n.rhs);
        if (!((numeric(a) && numeric(b)) || (a == ExprType::Bool && b == ExprType::Bool))) {
          type_error(self, "cannot compare " + std::string(to_string(a)) + " with " +
                               std::string(to_string(b)));
        }
        return ExprType::Bool;
      }
      case BinaryOp::And:
      case BinaryOp::Or:
        expect(n.lhs, ExprType::Bool);
        expect(n.rhs, ExprType::Bool);
        return ExprType::Bool;
    }
    return ExprType::Int;
  }

  ExprType operator()(const ast::Cond& n) const {
    expect(n.cond, ExprType::Bool);
    const ExprType a = type_of(n.then_branch);
    const ExprType b = type_of(n.else_branch);
    if (numeric(a) && numeric(b)) return promote(a, b);
    if (a == ExprType::Bool && b == ExprType::Bool) return ExprType::Bool;
    type_error(self, "branches have incompatible types " + std::string(to_string(a)) + " and " +
                         std::string(to_string(b)));
  }

  ExprType operator()(const ast::PlaceRead& n) const {
    for (const Expr& i : n.indices) expect(i, ExprType::Int);
    return ExprType::Int;
  }
  ExprType operator()(const ast::RepSharedQuery&) const { return ExprType::List; }
  ExprType operator()(const ast::Range& n) const {
    expect(n.count, ExprType::Int);
    return ExprType::List;
  }
  ExprType operator()(const ast::ListIndex& n) const {
    expect(n.list, ExprType::List);
    expect(n.index, ExprType::Int);
    return ExprType::Int;
  }
  ExprType operator()(const ast::Call& n) const {
    if (n.fn == Builtin::Size) {
      expect(n.args.at(0), ExprType::List);
      return ExprType::Int;
    }
    return promote(expect_numeric(n.args.at(0)), expect_numeric(n.args.at(1)));
  }
  ExprType operator()(const ast::Sum& n) const {
    expect(n.list, ExprType::List);
    return expect_numeric(n.body);
  }
};

std::optional<int> infer_type(const Expr& e) {
  try {
    return static_cast<int>(std::visit(TypeVisitor{e}, e.node().base()));
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

ExprType type_of(const Expr& e) {
  if (const auto t = e.cached_type()) return static_cast<ExprType>(*t);
  return std::visit(TypeVisitor{e}, e.node().base());
}

void check_type(const Expr& e, ExprRole role) {
  const ExprType t = type_of(e);
  switch (role) {
    case ExprRole::Predicate:
      if (t != ExprType::Bool) type_error(e, "predicate must be bool, got " + std::string(to_string(t)));
      break;
    case ExprRole::Numeric:
      if (!numeric(t)) type_error(e, "expected a number, got " + std::string(to_string(t)));
      break;
    case ExprRole::Integer:
      if (t != ExprType::Int) type_error(e, "expected int, got " + std::string(to_string(t)));
      break;
  }
}

// ---------------------------------------------------------------------------
// Values and arithmetic

std::int64_t Value::as_int() const {
  if (const auto* v = std::get_if<std::int64_t>(&v_)) return *v;
  fail(Errc::TypeError, "value is not an integer");
}

double Value::as_real() const {
  if (const auto* v = std::get_if<double>(&v_)) return *v;
  if (const auto* v = std::get_if<std::int64_t>(&v_)) return static_cast<double>(*v);
  fail(Errc::TypeError, "value is not a number");
}

bool Value::as_bool() const {
  if (const auto* v = std::get_if<bool>(&v_)) return *v;
  fail(Errc::TypeError, "value is not a boolean");
}

std::int64_t div_euclid(std::int64_t a, std::int64_t b) {
  if (b == 0) fail(Errc::DivisionByZero, "integer division by zero");
  if (a == INT64_MIN && b == -1) fail(Errc::Overflow, "integer division overflow");
  std::int64_t q = a / b;
  const std::int64_t r = a % b;
  if (r < 0) q += b > 0 ? -1 : 1;
  return q;
}

std::int64_t mod_euclid(std::int64_t a, std::int64_t b) {
  if (b == 0) fail(Errc::DivisionByZero, "modulo by zero");
  if (b == -1) return 0;
  const std::int64_t r = a % b;
  if (r < 0) return b > 0 ? r + b : r - b;
  return r;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

namespace {

std::int64_t checked(bool overflowed, std::int64_t v, SourcePos pos) {
  if (overflowed) fail(Errc::Overflow, "integer overflow", pos);
  return v;
}

}  // namespace

Value Evaluator::eval(const Expr& e) {
  return std::visit([&](const auto& n) { return eval_node(n, e); }, e.node().base());
}

Value Evaluator::eval_node(const ast::IntLit& n, const Expr&) { return n.value; }
Value Evaluator::eval_node(const ast::RealLit& n, const Expr&) { return n.value; }
Value Evaluator::eval_node(const ast::BoolLit& n, const Expr&) { return n.value; }
Value Evaluator::eval_node(const ast::RepIndex&, const Expr&) { return ctx_.rep_index(); }
Value Evaluator::eval_node(const ast::SizeN&, const Expr&) { return ctx_.size_n(); }

Value Evaluator::eval_node(const ast::Var& n, const Expr& self) {
  for (auto it = vars_.rbegin(); it != vars_.rend(); ++it) {
    if (it->first == n.name) {
      if (!it->second) throw NotStatic{};
      return *it->second;
    }
  }
  fail(Errc::TypeError, "unbound variable '" + n.name + "'", self.pos());
}

Value Evaluator::eval_node(const ast::Unary& n, const Expr& self) {
  const Value v = eval(n.operand);
  if (n.op == UnaryOp::Not) return !v.as_bool();
  if (v.is_int()) {
    std::int64_t out;
    const bool ovf = __builtin_sub_overflow(std::int64_t{0}, v.as_int(), &out);
    return checked(ovf, out, self.pos());
  }
  return -v.as_real();
}

Value Evaluator::eval_node(const ast::Binary& n, const Expr& self) {
  if (n.op == BinaryOp::And) {
    if (!eval(n.lhs).as_bool()) return false;
    return eval(n.rhs).as_bool();
  }
  if (n.op == BinaryOp::Or) {
    if (eval(n.lhs).as_bool()) return true;
    return eval(n.rhs).as_bool();
  }

  const Value a = eval(n.lhs);
  const Value b = eval(n.rhs);

  if (n.op == BinaryOp::Eq || n.op == BinaryOp::Ne) {
    bool eq;
    if (a.is_bool() || b.is_bool()) {
      eq = a.as_bool() == b.as_bool();
    } else if (a.is_int() && b.is_int()) {
      eq = a.as_int() == b.as_int();
    } else {
      eq = a.as_real() == b.as_real();
    }
    return n.op == BinaryOp::Eq ? eq : !eq;
  }

  const bool ints = a.is_int() && b.is_int();
  switch (n.op) {
    case BinaryOp::Add:
    case BinaryOp::Sub:
    case BinaryOp::Mul: {
      if (ints) {
        std::int64_t out;
        bool ovf;
        if (n.op == BinaryOp::Add) {
          ovf = __builtin_add_overflow(a.as_int(), b.as_int(), &out);
        } else if (n.op == BinaryOp::Sub) {
          ovf = __builtin_sub_overflow(a.as_int(), b.as_int(), &out);
        } else {
          ovf = __builtin_mul_overflow(a.as_int(), b.as_int(), &out);
        }
        return checked(ovf, out, self.pos());
      }
      const double x = a.as_real();
      const double y = b.as_real();
      if (n.op == BinaryOp::Add) return x + y;
      if (n.op == BinaryOp::Sub) return x - y;
      return x * y;
    }
    case BinaryOp::Div:
      if (ints) {
        if (b.as_int() == 0) fail(Errc::DivisionByZero, "division by zero", self.pos());
        return div_euclid(a.as_int(), b.as_int());
      }
      if (b.as_real() == 0.0) fail(Errc::DivisionByZero, "division by zero", self.pos());
      return a.as_real() / b.as_real();
    case BinaryOp::Mod:
      if (b.as_int() == 0) fail(Errc::DivisionByZero, "modulo by zero", self.pos());
      return mod_euclid(a.as_int(), b.as_int());
    case BinaryOp::Lt:
      return ints ? a.as_int() < b.as_int() : a.as_real() < b.as_real();
    case BinaryOp::Le:
      return ints ? a.as_int() <= b.as_int() : a.as_real() <= b.as_real();
    case BinaryOp::Gt:
      return ints ? a.as_int() > b.as_int() : a.as_real() > b.as_real();
    case BinaryOp::Ge:
      return ints ? a.as_int() >= b.as_int() : a.as_real() >= b.as_real();
    default: break;
  }
  fail(Errc::TypeError, "bad operator", self.pos());
}

Value Evaluator::eval_node(const ast::Cond& n, const Expr& self) {
  const Value v = eval(n.cond).as_bool() ? eval(n.then_branch) : eval(n.else_branch);
  if (v.is_int() && self.cached_type() == static_cast<int>(ExprType::Real)) return v.as_real();
  return v;
}

Value Evaluator::eval_node(const ast::PlaceRead& n, const Expr& self) {
  std::int64_t idx[4];
  if (n.indices.size() > 4) fail(Errc::IndexOutOfRange, "too many indices", self.pos());
  for (std::size_t i = 0; i < n.indices.size(); ++i) idx[i] = eval(n.indices[i]).as_int();
  return ctx_.read(n, std::span<const std::int64_t>(idx, n.indices.size()), self.pos());
}

Value Evaluator::eval_node(const ast::RepSharedQuery&, const Expr& self) {
  fail(Errc::TypeError, "list used as a value", self.pos());
}
Value Evaluator::eval_node(const ast::Range&, const Expr& self) {
  fail(Errc::TypeError, "list used as a value", self.pos());
}

Value Evaluator::eval_node(const ast::ListIndex& n, const Expr& self) {
  const std::int64_t k = eval(n.index).as_int();
  const std::int64_t len = list_size(n.list);
  if (k < 0 || k >= len) {
    fail(Errc::IndexOutOfRange,
         "list index " + std::to_string(k) + " outside [0, " + std::to_string(len) + ")", self.pos());
  }
  return list_at(n.list, k);
}

Value Evaluator::eval_node(const ast::Call& n, const Expr& self) {
  if (n.fn == Builtin::Size) return list_size(n.args[0]);
  const Value a = eval(n.args[0]);
  const Value b = eval(n.args[1]);
  if (a.is_int() && b.is_int() && self.cached_type() == static_cast<int>(ExprType::Int)) {
    return n.fn == Builtin::Min ? std::min(a.as_int(), b.as_int())
                                : std::max(a.as_int(), b.as_int());
  }
  return n.fn == Builtin::Min ? std::min(a.as_real(), b.as_real())
                              : std::max(a.as_real(), b.as_real());
}

Value Evaluator::eval_node(const ast::Sum& n, const Expr& self) {
  const bool real = self.cached_type() == static_cast<int>(ExprType::Real);
  std::int64_t isum = 0;
  double rsum = 0.0;
  for_each_in_list(n.list, [&](std::int64_t j) {
    vars_.emplace_back(n.var, j);
    const Value v = eval(n.body);
    vars_.pop_back();
    if (real) {
      rsum += v.as_real();
    } else {
      const bool ovf = __builtin_add_overflow(isum, v.as_int(), &isum);
      checked(ovf, isum, self.pos());
    }
  });
  if (real) return rsum;
  return isum;
}

std::int64_t Evaluator::list_size(const Expr& list) {
  if (const auto* q = list.as<ast::RepSharedQuery>()) {
    return static_cast<std::int64_t>(ctx_.repshared(q->place, list.pos()).size());
  }
  if (const auto* r = list.as<ast::Range>()) return std::max<std::int64_t>(0, eval(r->count).as_int());
  fail(Errc::TypeError, "expected a list", list.pos());
}

std::int64_t Evaluator::list_at(const Expr& list, std::int64_t k) {
  if (const auto* q = list.as<ast::RepSharedQuery>()) {
    return ctx_.repshared(q->place, list.pos())[static_cast<std::size_t>(k)];
  }
  if (list.as<ast::Range>()) return k;
  fail(Errc::TypeError, "expected a list", list.pos());
}

}  // namespace detail

Value evaluate(const Expr& e, const EvalContext& ctx) {
  detail::Evaluator ev(ctx);
  Value v = ev.eval(e);
  // mixed int/real conditionals and sums produce reals
  if (v.is_int() && type_of(e) == ExprType::Real) return v.as_real();
  return v;
}

std::int64_t SimpleContext::read(const ast::PlaceRead& place, std::span<const std::int64_t> indices,
                                 SourcePos pos) const {
  for (const auto& [name, values] : marking) {
    if (name != place.place) continue;
    std::int64_t k = 0;
    if (indices.empty()) {
      k = values.size() > 1 ? replica_index : 0;
    } else if (indices.size() == 1) {
      k = indices[0];
    } else {
      fail(Errc::IndexOutOfRange, "too many indices for '" + name + "'", pos);
    }
    if (k < 0 || k >= static_cast<std::int64_t>(values.size())) {
      fail(Errc::IndexOutOfRange,
           "index " + std::to_string(k) + " outside '" + name + "' of size " +
               std::to_string(values.size()),
           pos);
    }
    return values[static_cast<std::size_t>(k)];
  }
  fail(Errc::UnknownPlace, "unknown place '" + place.place + "'", pos);
}

std::span<const std::int64_t> SimpleContext::repshared(std::string_view place, SourcePos pos) const {
  for (const auto& [name, values] : repshared_lists) {
    if (name == place) return values;
  }
  fail(Errc::NotRepShared, "place '" + std::string(place) + "' is not rep-shared", pos);
}

Value evaluate(const Expr& e, std::int64_t replica_index, std::int64_t n,
               const std::vector<std::pair<std::string, std::vector<std::int64_t>>>& marking) {
  SimpleContext ctx;
  ctx.replica_index = replica_index;
  ctx.n = n;
  ctx.marking = marking;
  return evaluate(e, ctx);
}

}  // namespace narep
