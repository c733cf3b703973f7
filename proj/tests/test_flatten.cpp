#include "doctest.h"
#include "narep/flatten.hpp"
#include "narep/simulator.hpp"
#include "support/errors.hpp"
#include "support/models.hpp"

using namespace narep;
using narep::testing::error_code;
using narep::testing::flat_of;

namespace {

std::string rule_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.rule();
  }
  return "<none>";
}

// Fires activity `a` once on `m` (case 0), as the simulator would.
void fire(const FlatModel& fm, int a, Marking& m) {
  const ActivityInstance& inst = fm.activities()[static_cast<std::size_t>(a)];
  const InstanceContext ctx(fm, inst.leaf, m);
  for (const UpdateStmt& u : fm.decl(inst).cases[0].updates) {
    const int v = ctx.target(u.target);
    m[static_cast<std::size_t>(v)] = evaluate(u.value, ctx).as_int();
  }
}

Value eval_in(const FlatModel& fm, int leaf, const Marking& m, const std::string& text) {
  return evaluate(parse(text), InstanceContext(fm, leaf, m));
}

const char* kCell = R"(
atomic Cell {
  place P;
  place Q init repindex() + 10;
  activity Inc exp(1) { P += 1; }
}
)";

}  // namespace

TEST_CASE("flatten: single atomic model") {
  const FlatModel fm = flat_of("atomic Cell { place P; place Q init 10; activity Inc exp(1) { P += 1; } } compose Cell as c;");
  REQUIRE(fm.vars().size() == 2);
  CHECK(fm.vars()[0].path == "c.P");
  CHECK(fm.vars()[1].path == "c.Q");
  CHECK(fm.vars()[0].mutable_);
  CHECK_FALSE(fm.vars()[1].mutable_);
  REQUIRE(fm.activities().size() == 1);
  CHECK(fm.activities()[0].path == "c.Inc");
  CHECK(fm.activities()[0].writes == std::vector<int>{0});
  CHECK(fm.find_var("c.Q") == 1);
  CHECK(fm.find_var("c.R") == -1);
  CHECK(fm.find_activity("c.Inc") == 0);
}

TEST_CASE("flatten: places without replication cannot use repindex()") {
  CHECK(rule_of([] { flat_of(std::string(kCell) + "compose Cell;"); }) == "REPINDEX_OUTSIDE_REPLICATION");
}

TEST_CASE("flatten: all-local NARep is isomorphic to an anonymous Rep") {
  const FlatModel a = flat_of(std::string(kCell) + "compose narep r 3 { Cell; };");
  const FlatModel b = flat_of(std::string(kCell) + "compose rep r 3 { Cell; };");
  REQUIRE(a.vars().size() == 6);
  REQUIRE(b.vars().size() == 6);
  for (std::size_t v = 0; v < a.vars().size(); ++v) {
    CHECK(a.vars()[v].path == b.vars()[v].path);
    CHECK(a.initial()[v] == b.initial()[v]);
    CHECK(a.vars()[v].mutable_ == b.vars()[v].mutable_);
  }
  CHECK(a.vars()[2].path == "r[1].P");
  CHECK(a.initial() == Marking{0, 10, 0, 11, 0, 12});
  REQUIRE(a.activities().size() == b.activities().size());
  for (std::size_t i = 0; i < a.activities().size(); ++i) {
    CHECK(a.activities()[i].reads == b.activities()[i].reads);
    CHECK(a.activities()[i].writes == b.activities()[i].writes);
    CHECK(a.activities()[i].path == b.activities()[i].path);
  }
}

TEST_CASE("flatten: Rep shared place becomes one variable") {
  const FlatModel fm = flat_of(std::string(kCell) + "compose rep r 3 { Cell; share P; }");
  CHECK(fm.vars().size() == 4);
  const int p = fm.find_var("r[0].P");
  CHECK(fm.find_var("r[2].P") == p);
  CHECK(fm.vars()[static_cast<std::size_t>(p)].slots.size() == 3);
  for (const ActivityInstance& a : fm.activities()) CHECK(a.writes == std::vector<int>{p});
}

TEST_CASE("flatten: Join merges places") {
  const FlatModel fm = flat_of(R"(
atomic A { place X init 2; activity T exp(1) when X > 0 { X -= 1; } }
atomic B { place Y init 2; place Z; activity U exp(1) { Y += 1; Z = Y; } }
compose join j { A; B; share A.X, B.Y; }
)");
  CHECK(fm.vars().size() == 2);
  CHECK(fm.find_var("j.A.X") == fm.find_var("j.B.Y"));
  CHECK(fm.vars()[0].slots.size() == 2);
  CHECK(dump(fm).find("aliases=j.B.Y") != std::string::npos);
  CHECK(fm.activities()[1].reads.empty());
  CHECK(fm.activities()[1].writes == std::vector<int>{0, 1});
}

TEST_CASE("flatten: aliased places must agree on initial values") {
  CHECK(error_code([] {
          flat_of(R"(
atomic A { place X init 2; activity T exp(1) { X = 0; } }
atomic B { place Y init 3; activity U exp(1) { Y = 0; } }
compose join j { A; B; share A.X, B.Y; }
)");
        }) == Errc::InconsistentInitialization);
  CHECK(error_code([] {
          flat_of(R"(
atomic A { place X init repindex(); activity T exp(1) { X = 0; } }
compose rep r 2 { A; share X; }
)");
        }) == Errc::InconsistentInitialization);
  CHECK(error_code([] {
          flat_of(R"(
atomic A { place X init repindex() - 1; activity T exp(1) { X = 0; } }
compose rep r 2 { A; }
)");
        }) == Errc::NegativeMarking);
}

TEST_CASE("semantics: PlaceShared write is read back by the group") {
  const FlatModel fm = flat_of(R"(
atomic W { place Pool init 1; activity Take exp(1) when Pool > 0 { Pool -= 1; } activity Put exp(1) { Pool += 5; } }
compose narep w 4 { W; Pool placeshared {{0, 1}}; }
)");
  CHECK(fm.vars().size() == 3);
  CHECK(fm.find_var("w[0].Pool") == fm.find_var("w[1].Pool"));
  CHECK(fm.find_var("w[2].Pool") != fm.find_var("w[3].Pool"));
  Marking m = fm.initial();
  const int put0 = fm.find_activity("w[0].Put");
  fire(fm, put0, m);
  const int leaf1 = fm.activities()[static_cast<std::size_t>(fm.find_activity("w[1].Take"))].leaf;
  const int leaf2 = fm.activities()[static_cast<std::size_t>(fm.find_activity("w[2].Take"))].leaf;
  CHECK(eval_in(fm, leaf1, m, "Pool").as_int() == 6);
  CHECK(eval_in(fm, leaf2, m, "Pool").as_int() == 1);
  // a replica may address its own group by index, but not other groups
  CHECK(eval_in(fm, leaf1, m, "Pool[0]").as_int() == 6);
  CHECK(error_code([&] { eval_in(fm, leaf1, m, "Pool[2]"); }) == Errc::AccessViolation);
}

TEST_CASE("semantics: RepShared ring neighbours and access violations") {
  const FlatModel fm = flat_of(R"(
atomic S {
  place Up init repindex() + 1;
  activity Look exp(1) when Up[(repindex() - 1) % n] + Up[(repindex() + 1) % n] > 0 { Up = Up; }
}
compose narep ring 5 { S; Up ring(1); }
)");
  REQUIRE(fm.vars().size() == 5);
  const Marking& m = fm.initial();
  const int leaf0 = fm.activities()[0].leaf;
  CHECK(eval_in(fm, leaf0, m, "Up[4]").as_int() == 5);
  CHECK(eval_in(fm, leaf0, m, "Up[1]").as_int() == 2);
  CHECK(eval_in(fm, leaf0, m, "Up").as_int() == 1);
  CHECK(eval_in(fm, leaf0, m, "sum(j in repshared(Up): Up[j])").as_int() == 1 + 2 + 5);
  CHECK(error_code([&] { eval_in(fm, leaf0, m, "Up[2]"); }) == Errc::AccessViolation);
  CHECK(error_code([&] { eval_in(fm, leaf0, m, "Up[5]"); }) == Errc::IndexOutOfRange);
  CHECK(fm.activities()[0].reads == std::vector<int>{1, 4});
  CHECK(repshared_list(fm, 2, "Up") == std::vector<std::int64_t>{1, 2, 3});

  // a static out-of-access reference is rejected when flattening
  CHECK(error_code([] {
          flat_of(R"(
atomic S { place Up; activity Look exp(1) when Up[(repindex() + 2) % n] > 0 { Up = 1; } }
compose narep ring 5 { S; Up ring(1); }
)");
        }) == Errc::AccessViolation);
  CHECK(error_code([] {
          flat_of(R"(
atomic S { place Up; activity Look exp(1) when Up[7] > 0 { Up = 1; } }
compose narep ring 5 { S; Up ring(1); }
)");
        }) == Errc::IndexOutOfRange);
}

TEST_CASE("semantics: repshared on a non-rep-shared place") {
  const FlatModel fm = flat_of(R"(
atomic S { place Up; place L; activity Look exp(1) { Up = 1; } }
compose narep ring 3 { S; Up ring(1); }
)");
  CHECK(error_code([&] { repshared_list(fm, 0, "L"); }) == Errc::NotRepShared);
  CHECK(error_code([] {
          flat_of(R"(
atomic S { place Up; place L; activity Look exp(sum(j in repshared(L): 1)) { Up = 1; } }
compose narep ring 3 { S; Up ring(1); }
)");
        }) == Errc::NotRepShared);
}

TEST_CASE("semantics: UpShared aliases inner and outer places with write-through") {
  const FlatModel fm = flat_of(R"(
atomic Ctrl { place Q[4] init {5, 6, 7, 8}; activity Clear exp(1) { Q[2] = 0; } }
atomic Cell { place P init repindex() + 5; activity Set exp(1) { P = 9; } }
compose join sys {
  Ctrl;
  narep cells 3 { Cell; P upshared {0, 1, 2} -> Ctrl.Q; };
}
)");
  CHECK(fm.vars().size() == 4);
  for (int k = 0; k < 3; ++k) {
    CHECK(fm.find_var("sys.Ctrl.Q[" + std::to_string(k) + "]") == fm.find_var("sys.cells[" + std::to_string(k) + "].P"));
  }
  Marking m = fm.initial();
  CHECK(m == Marking{5, 6, 7, 8});
  const int ctrl = fm.activities()[0].leaf;
  const int cell1 = fm.activities()[static_cast<std::size_t>(fm.find_activity("sys.cells[1].Set"))].leaf;
  const int cell2 = fm.activities()[static_cast<std::size_t>(fm.find_activity("sys.cells[2].Set"))].leaf;
  fire(fm, fm.find_activity("sys.cells[1].Set"), m);
  CHECK(eval_in(fm, ctrl, m, "Q[1]").as_int() == 9);
  fire(fm, fm.find_activity("sys.Ctrl.Clear"), m);
  CHECK(eval_in(fm, cell2, m, "P").as_int() == 0);
  CHECK(eval_in(fm, cell1, m, "P").as_int() == 9);
}

TEST_CASE("semantics: UpShared entry map and errors") {
  const std::string models = R"(
atomic Ctrl { place Q[4]; activity Clear exp(1) { Q[2] = 0; } }
atomic Cell { place P; activity Set exp(1) { P = 1; } }
)";
  const FlatModel fm = flat_of(models + R"(
compose join sys { Ctrl; narep cells 2 { Cell; P upshared {0, 1} -> Ctrl.Q {0: 3, 1: 1}; }; }
)");
  CHECK(fm.find_var("sys.cells[0].P") == fm.find_var("sys.Ctrl.Q[3]"));
  CHECK(fm.find_var("sys.cells[1].P") == fm.find_var("sys.Ctrl.Q[1]"));
  CHECK(rule_of([&] {
          flat_of(models + "compose join sys { Ctrl; narep cells 2 { Cell; P upshared {0, 1} -> Ctrl.Q {0: 4, 1: 1}; }; }");
        }) == "UPSHARE_MAP");
  CHECK(rule_of([&] { flat_of(models + "compose narep cells 2 { Cell; P upshared {0} -> Ctrl.Q; };"); }) ==
        "UPSHARE_NO_PARENT");
}

TEST_CASE("flatten: nested replication paths") {
  const FlatModel fm = flat_of(R"(
atomic S { place X init repindex(); activity T exp(1) { X = X + 1; } }
compose rep outer 2 { narep inner 3 { S; X ring(1); }; }
)");
  CHECK(fm.vars().size() == 6);
  CHECK(fm.vars()[4].path == "outer[1].inner[1].X");
  CHECK(fm.initial() == Marking{0, 1, 2, 0, 1, 2});
  CHECK(fm.activities()[5].path == "outer[1].inner[2].T");
  CHECK(fm.activities()[5].n == 3);
}

TEST_CASE("flatten: dynamic indices read the permitted replicas") {
  const FlatModel fm = flat_of(R"(
atomic S { place Up; place K; activity T exp(1) when Up[(repindex() + K) % n] > 0 { K = 1 - K; } }
compose narep ring 5 { S; Up ring(1); }
)");
  const ActivityInstance& a = fm.activities()[0];
  CHECK(a.dynamic);
  // Up of replicas 0, 1, 4 (ids 0, 2, 8) and K of replica 0 (id 1)
  CHECK(a.reads == std::vector<int>{0, 1, 2, 8});
  CHECK(access_grants(fm, 0) == std::vector<int>{0, 1, 2, 8});
}

TEST_CASE("flatten: dump is stable") {
  const std::string text = std::string(kCell) + "compose narep r 2 { Cell; P placeshared {{0, 1}}; };";
  CHECK(dump(flat_of(text)) == dump(flat_of(text)));
  const std::string d = dump(flat_of(text));
  CHECK(d.rfind("vars 3\n0\tr[0].P\tinit=0\towner=0\tmutable\taliases=r[1].P\n", 0) == 0);
}
