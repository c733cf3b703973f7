#include <map>
#include <random>

#include "doctest.h"
#include "narep/expr.hpp"
#include "support/errors.hpp"
#include "support/random_expr.hpp"

using namespace narep;
using narep::testing::error_code;

namespace {

using Marking = std::vector<std::pair<std::string, std::vector<std::int64_t>>>;

struct ListScope final : DependencyScope {
  std::int64_t n;
  std::vector<std::pair<std::string, std::vector<std::int64_t>>> lists;
  PlaceShape shape(std::string_view) const override { return {true, n, std::nullopt}; }
  std::optional<std::vector<std::int64_t>> repshared(std::string_view p) const override {
    for (const auto& [name, l] : lists) {
      if (name == p) return l;
    }
    return std::nullopt;
  }
};

}  // namespace

TEST_CASE("parse: constant arithmetic") {
  const Expr e = parse("3 + 4");
  const auto* add = e.as<ast::Binary>();
  REQUIRE(add);
  CHECK(add->op == BinaryOp::Add);
  CHECK(add->lhs.as<ast::IntLit>()->value == 3);
  CHECK(add->rhs.as<ast::IntLit>()->value == 4);
  CHECK(evaluate(e, 0, 1, {}).as_int() == 7);
}

TEST_CASE("parse: neighbour read builds the expected tree") {
  const Expr e = parse("P[(repindex()-1) % n]");
  const Expr expected(ast::PlaceRead{
      "P",
      {Expr(ast::Binary{BinaryOp::Mod,
                        Expr(ast::Binary{BinaryOp::Sub, Expr(ast::RepIndex{}), Expr::integer(1)}),
                        Expr(ast::SizeN{})})}});
  CHECK(structurally_equal(e, expected));
}

TEST_CASE("parse: errors carry line and column") {
  try {
    parse("P[");
    FAIL("expected a syntax error");
  } catch (const Error& err) {
    CHECK(err.code() == Errc::SyntaxError);
    CHECK(err.pos().line == 1);
    CHECK(err.pos().column == 3);
  }
  CHECK(error_code([] { parse("1 +\n  * 2"); }) == Errc::SyntaxError);
  try {
    parse("1 +\n  * 2");
  } catch (const Error& err) {
    CHECK(err.pos().line == 2);
    CHECK(err.pos().column == 3);
  }
  CHECK(error_code([] { parse(""); }) == Errc::SyntaxError);
  CHECK(error_code([] { parse("a < b < c"); }) == Errc::SyntaxError);
  CHECK(error_code([] { parse("(P)[1]"); }) == Errc::SyntaxError);
}

TEST_CASE("evaluate: reference examples") {
  CHECK(evaluate(parse("(repindex()-1) % n"), 0, 5, {}).as_int() == 4);
  CHECK(evaluate(parse("P[repindex()]"), 2, 3, {{"P", {7, 8, 9}}}).as_int() == 9);
  CHECK(error_code([] { evaluate(parse("1/0"), 0, 1, {}); }) == Errc::DivisionByZero);
  CHECK(error_code([] { evaluate(parse("1.0/0.0"), 0, 1, {}); }) == Errc::DivisionByZero);
  CHECK(error_code([] { evaluate(parse("3 % 0"), 0, 1, {}); }) == Errc::DivisionByZero);
  CHECK(error_code([] { evaluate(parse("P[5]"), 0, 3, {{"P", {1, 2, 3}}}); }) ==
        Errc::IndexOutOfRange);
}

TEST_CASE("evaluate: typing and promotion") {
  CHECK(evaluate(parse("7 / 2"), 0, 1, {}).as_int() == 3);
  CHECK(evaluate(parse("-7 / 2"), 0, 1, {}).as_int() == -4);
  CHECK(evaluate(parse("7.0 / 2"), 0, 1, {}).as_real() == doctest::Approx(3.5));
  const Value v = evaluate(parse("if true then 1 else 2.5"), 0, 1, {});
  CHECK(v.is_real());
  CHECK(v.as_real() == 1.0);
  CHECK(evaluate(parse("sum(j in range(4): j * j)"), 0, 1, {}).as_int() == 14);
  CHECK(evaluate(parse("min(3, 2) + max(1, 5)"), 0, 1, {}).as_int() == 7);
  CHECK(evaluate(parse("!(1 < 2) || 2 >= 2 && true"), 0, 1, {}).as_bool());
  CHECK(error_code([] { check_type(parse("1 + true"), ExprRole::Numeric); }) == Errc::TypeError);
  CHECK(error_code([] { check_type(parse("1 + 2"), ExprRole::Predicate); }) == Errc::TypeError);
  CHECK(error_code([] { check_type(parse("1.5 % 2"), ExprRole::Integer); }) == Errc::TypeError);
  CHECK(error_code([] { check_type(parse("P[1.5]"), ExprRole::Integer); }) == Errc::TypeError);
  CHECK(error_code([] { check_type(parse("range(3)"), ExprRole::Integer); }) == Errc::TypeError);
  CHECK_NOTHROW(check_type(parse("size(repshared(P)) > 0"), ExprRole::Predicate));
  CHECK(error_code([] { evaluate(parse("9223372036854775807 + 1"), 0, 1, {}); }) ==
        Errc::Overflow);
}

TEST_CASE("evaluate: repshared lists") {
  SimpleContext ctx;
  ctx.replica_index = 0;
  ctx.n = 5;
  ctx.marking = {{"P", {1, 2, 3, 4, 5}}};
  ctx.repshared_lists = {{"P", {0, 1, 4}}};
  CHECK(evaluate(parse("sum(j in repshared(P): P[j])"), ctx).as_int() == 1 + 2 + 5);
  CHECK(evaluate(parse("size(repshared(P))"), ctx).as_int() == 3);
  CHECK(evaluate(parse("repshared(P)[2]"), ctx).as_int() == 4);
  CHECK(error_code([&] { evaluate(parse("repshared(P)[3]"), ctx); }) == Errc::IndexOutOfRange);
  CHECK(error_code([&] { evaluate(parse("size(repshared(Q))"), ctx); }) == Errc::NotRepShared);
}

TEST_CASE("euclidean division and modulo") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> dist(-1000, 1000);
  for (int i = 0; i < 2000; ++i) {
    const std::int64_t a = dist(rng);
    std::int64_t b = dist(rng);
    if (b == 0) b = 1;
    const std::int64_t q = div_euclid(a, b);
    const std::int64_t r = mod_euclid(a, b);
    CHECK(r >= 0);
    CHECK(r < (b > 0 ? b : -b));
    CHECK(b * q + r == a);
  }
  CHECK(mod_euclid(-1, 5) == 4);
  CHECK(div_euclid(-1, 5) == -1);
  CHECK(error_code([] { div_euclid(1, 0); }) == Errc::DivisionByZero);
}

TEST_CASE("extract_dependencies: exact neighbour read") {
  const Expr e = parse("P[(repindex()+1) % n]");
  const DependencySet deps = extract_dependencies(e, 3, 10);
  CHECK_FALSE(deps.dynamic);
  REQUIRE(deps.reads.size() == 1);
  CHECK(*deps.reads.begin() == PlaceRef{"P", 4, -1});

  // Oracle: only P@4 influences the value for replica 3.
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::int64_t> values(10);
    for (auto& v : values) v = static_cast<std::int64_t>(rng() % 7);
    const auto base = evaluate(e, 3, 10, {{"P", values}}).as_int();
    for (int k = 0; k < 10; ++k) {
      auto changed = values;
      changed[static_cast<std::size_t>(k)] += 1;
      const auto v = evaluate(e, 3, 10, {{"P", changed}}).as_int();
      CHECK((v != base) == (k == 4));
    }
  }
}

TEST_CASE("extract_dependencies: marking-dependent index is conservative") {
  const DependencySet deps = extract_dependencies(parse("P[Q]"), 2, 4);
  CHECK(deps.dynamic);
  const std::set<PlaceRef> expected = {
      {"Q", 2, -1}, {"P", 0, -1}, {"P", 1, -1}, {"P", 2, -1}, {"P", 3, -1}};
  CHECK(deps.reads == expected);
}

TEST_CASE("extract_dependencies: constants and branches") {
  const DependencySet none = extract_dependencies(parse("5 > 3"), 0, 1);
  CHECK(none.reads.empty());
  CHECK_FALSE(none.dynamic);

  // a statically decided condition contributes only the taken branch
  const auto taken = extract_dependencies(parse("if repindex() == 0 then A else B"), 0, 3);
  CHECK(taken.reads == std::set<PlaceRef>{{"A", 0, -1}});
  const auto both = extract_dependencies(parse("if C > 0 then A else B"), 1, 3);
  CHECK(both.reads == std::set<PlaceRef>{{"A", 1, -1}, {"B", 1, -1}, {"C", 1, -1}});
  CHECK_FALSE(both.dynamic);

  const auto short_circuit = extract_dependencies(parse("false && A > 0"), 0, 2);
  CHECK(short_circuit.reads.empty());

  ListScope scope;
  scope.n = 5;
  scope.lists = {{"P", {0, 1, 4}}};
  const auto ring = extract_dependencies(parse("sum(j in repshared(P): P[j])"), 0, 5, scope);
  CHECK(ring.reads == std::set<PlaceRef>{{"P", 0, -1}, {"P", 1, -1}, {"P", 4, -1}});
  CHECK_FALSE(ring.dynamic);
}

TEST_CASE("property: pretty_print round-trips") {
  narep::testing::RandomExpr gen(2024, {"A", "B", "C"});
  gen.repshared_places = {"A"};
  for (int i = 0; i < 500; ++i) {
    const Expr e = (i % 3 == 0) ? gen.boolean() : (i % 3 == 1 ? gen.integer() : gen.real());
    const std::string text = pretty_print(e);
    const Expr back = parse(text);
    INFO(text);
    CHECK(structurally_equal(e, back));
    CHECK(pretty_print(back) == text);
  }
}

TEST_CASE("property: extraction is sound") {
  // Two markings that agree on the extracted reads evaluate identically.
  const std::int64_t n = 4;
  narep::testing::RandomExpr gen(99, {"A", "B", "C"});
  gen.repshared_places = {"A"};
  std::mt19937_64 rng(5);
  ListScope scope;
  scope.n = n;
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const Expr e = i % 2 ? gen.boolean() : gen.real();
    const std::int64_t replica = static_cast<std::int64_t>(rng() % n);
    scope.lists = {{"A", {replica, (replica + 1) % n}}};
    std::sort(scope.lists[0].second.begin(), scope.lists[0].second.end());
    const DependencySet deps = extract_dependencies(e, replica, n, scope);

    SimpleContext m1;
    m1.replica_index = replica;
    m1.n = n;
    m1.repshared_lists = scope.lists;
    for (const char* p : {"A", "B", "C"}) {
      std::vector<std::int64_t> v(n);
      for (auto& x : v) x = static_cast<std::int64_t>(rng() % 4);
      m1.marking.emplace_back(p, v);
    }
    SimpleContext m2 = m1;
    for (auto& [name, values] : m2.marking) {
      for (std::int64_t j = 0; j < n; ++j) {
        if (!deps.reads.count(PlaceRef{name, j, -1})) values[static_cast<std::size_t>(j)] += 1 + static_cast<std::int64_t>(rng() % 5);
      }
    }
    auto outcome = [&](const SimpleContext& ctx) -> std::string {
      try {
        const Value v = evaluate(e, ctx);
        if (v.is_bool()) return v.as_bool() ? "true" : "false";
        return std::to_string(v.as_real());
      } catch (const Error& err) {
        return std::string(to_string(err.code()));
      }
    };
    if (outcome(m1) != outcome(m2)) {
      ++violations;
      MESSAGE(pretty_print(e));
    }
  }
  CHECK(violations == 0);
}
