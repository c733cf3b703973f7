#include "narep/bench.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

#include "narep/connectivity.hpp"
#include "narep/flatten.hpp"
#include "narep/model_file.hpp"

namespace narep {

std::string Topology::name() const {
  switch (kind) {
    case Kind::Ring: return k == 1 ? "ring" : "ring(" + std::to_string(k) + ")";
    case Kind::Star: return "star";
    case Kind::Full: return "full";
  }
  return "?";
}

Topology Topology::parse(const std::string& text) {
  Topology t;
  if (text == "ring") return t;
  if (text == "star") {
    t.kind = Kind::Star;
    return t;
  }
  if (text == "full") {
    t.kind = Kind::Full;
    return t;
  }
  if (text.size() > 6 && text.starts_with("ring(") && text.back() == ')') {
    const std::string digits = text.substr(5, text.size() - 6);
    if (!digits.empty() && digits.size() < 10 && std::all_of(digits.begin(), digits.end(), ::isdigit)) {
      t.k = std::stoll(digits);
      return t;
    }
  }
  fail(Errc::InvalidArgument, "unknown topology '" + text + "' (ring, ring(k), star, full)");
}

std::string_view to_string(BenchMode m) { return m == BenchMode::NARep ? "narep" : "rep-emulated"; }

namespace {

std::string link_predicate(const Topology& t) {
  switch (t.kind) {
    case Topology::Kind::Ring:
      return "min((j - Idx) % n, (Idx - j) % n) <= " + std::to_string(t.k);
    case Topology::Kind::Star: return "Idx == 0 || j == 0 || j == Idx";
    case Topology::Kind::Full: return "true";
  }
  return "true";
}

std::string access_clause(const Topology& t) {
  switch (t.kind) {
    case Topology::Kind::Ring: return "ring(" + std::to_string(t.k) + ")";
    case Topology::Kind::Star: return "star(0)";
    case Topology::Kind::Full: return "full";
  }
  return "full";
}

}  // namespace

std::string generate_model_text(const Topology& t, std::int64_t n, BenchMode mode) {
  if (n < 1) fail(Errc::InvalidArgument, "bench model needs n >= 1");
  const std::string ns = std::to_string(n);
  std::string s = "# " + t.name() + " topology, n = " + ns + ", " + std::string(to_string(mode)) + "\n";
  if (mode == BenchMode::NARep) {
    s += "atomic Node {\n"
         "  place P;\n"
         "  activity Flip exp(if P == 0 then 0.1 * (1 + sum(j in repshared(P): P[j])) else 1.0) {\n"
         "    P = 1 - P;\n"
         "  }\n"
         "}\n";
    s += "compose narep net " + ns + " {\n  Node;\n  P " + access_clause(t) + ";\n}\n";
  } else {
    s += "atomic Node {\n"
         "  place P[" + ns + "];\n"
         "  place Idx init repindex();\n"
         "  activity Flip exp(if P[Idx] == 0 then 0.1 * (1 + sum(j in range(n): if " + link_predicate(t) +
         " then P[j] else 0)) else 1.0) {\n"
         "    P[Idx] = 1 - P[Idx];\n"
         "  }\n"
         "}\n";
    s += "compose rep net " + ns + " {\n  Node;\n  share P;\n}\n";
  }
  return s;
}

CompositionNode generate_model(const Topology& t, std::int64_t n, BenchMode mode) {
  return parse_model(generate_model_text(t, n, mode)).root;
}

std::vector<BenchRow> run_bench(const BenchSpec& spec) {
  if (spec.repeats < 1) fail(Errc::InvalidArgument, "repeats must be >= 1");
  if (spec.n_list.empty()) fail(Errc::InvalidArgument, "empty n list");
  if (!std::is_sorted(spec.n_list.begin(), spec.n_list.end())) {
    fail(Errc::InvalidArgument, "n list must be ascending");
  }
  std::vector<BenchRow> rows;
  for (std::int64_t n : spec.n_list) {
    for (BenchMode mode : spec.modes) {
      const FlatModel fm = flatten(generate_model(spec.topology, n, mode));
      BenchRow row;
      row.topology = spec.topology.name();
      row.n = n;
      row.mode = mode;
      row.vars = static_cast<std::int64_t>(fm.vars().size());
      row.activities = static_cast<std::int64_t>(fm.activities().size());
      row.build_ns_min = std::numeric_limits<std::int64_t>::max();
      for (int r = 0; r < spec.repeats; ++r) {
        const ConnectivityLists cl = build_connectivity(fm);
        row.checks = cl.check_count;
        row.build_ns_min = std::min(row.build_ns_min, cl.build_time_ns);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << kBenchCsvHeader << '\n';
  for (const BenchRow& r : rows) {
    os << r.topology << ',' << r.n << ',' << to_string(r.mode) << ',' << r.vars << ',' << r.activities << ','
       << r.checks << ',' << r.build_ns_min << '\n';
  }
}

}  // namespace narep
