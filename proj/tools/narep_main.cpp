// narep: command-line front end.
//
//   narep check FILE
//   narep flatten FILE [--dump] [--out F]
//   narep connectivity FILE [--count] [--csv F]
//   narep simulate FILE --seed S (--max-events N | --max-time T) [--oracle]
//                  [--trace F] [--reward NAME --runs K]
//   narep bench --topology ring --n 10,50 --mode both --repeats 5 [--csv F]
//
// Exit status: 0 success, 1 model error, 2 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "narep/bench.hpp"
#include "narep/connectivity.hpp"
#include "narep/flatten.hpp"
#include "narep/model_file.hpp"
#include "narep/rewards.hpp"
#include "narep/simulator.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Writes to `path`, or standard output when empty or "-".
template <class F>
void emit(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) narep::fail(narep::Errc::IoError, "cannot write '" + path + "'");
  write(out);
  out.close();
  if (!out) narep::fail(narep::Errc::IoError, "cannot write '" + path + "'");
}

struct Loaded {
  narep::ModelFile file;
  narep::FlatModel flat;
};

Loaded load_flat(const std::string& path) {
  Loaded l{narep::load(path), {}};
  try {
    l.flat = narep::flatten(l.file.root);
    for (const narep::RewardVar& rv : l.file.rewards) narep::check_reward(rv, l.flat);
  } catch (const narep::Error& e) {
    throw narep::Error(e.code(), path + ": " + e.detail(), e.pos(), e.rule());
  }
  return l;
}

// Replica count and kind of the outermost replication in the tree.
std::pair<std::int64_t, std::string> replication_of(const narep::CompositionNode& node) {
  using K = narep::CompositionNode::Kind;
  if (node.kind() == K::NARep) return {node.n(), "narep"};
  if (node.kind() == K::Rep) return {node.n(), "rep"};
  for (const auto& c : node.children()) {
    auto r = replication_of(c);
    if (r.second != "flat") return r;
  }
  return {1, "flat"};
}

std::vector<std::int64_t> parse_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, comma - start);
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("--n: '" + item + "' is not a positive integer");
    }
    start = comma + 1;
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Non-anonymous replication of stochastic activity networks"};
  app.set_version_flag("--version", std::string("narep ") + NAREP_VERSION);
  app.require_subcommand(1);

  std::string model;

  auto* check = app.add_subcommand("check", "parse, validate and flatten a model file");
  check->add_option("model", model, "model file")->required();

  bool dump = false;
  std::string flat_out;
  auto* flat = app.add_subcommand("flatten", "flatten a model and print its state variables and activities");
  flat->add_option("model", model, "model file")->required();
  flat->add_flag("--dump", dump, "print the full canonical tables");
  flat->add_option("--out", flat_out, "output file (default: standard output)");

  bool count = false;
  std::string conn_csv;
  auto* conn = app.add_subcommand("connectivity", "build connectivity lists");
  conn->add_option("model", model, "model file")->required();
  conn->add_flag("--count", count, "print check counts and the lists");
  conn->add_option("--csv", conn_csv, "write a CSV report to this file");

  std::uint64_t seed = 0;
  std::optional<std::int64_t> max_events;
  std::optional<double> max_time;
  bool oracle = false;
  std::string trace;
  std::string reward;
  std::int64_t runs = 1;
  auto* sim = app.add_subcommand("simulate", "simulate a model");
  sim->add_option("model", model, "model file")->required();
  sim->add_option("--seed", seed, "random seed")->required();
  sim->add_option("--max-events", max_events, "stop after this many events")->check(CLI::NonNegativeNumber);
  sim->add_option("--max-time", max_time, "stop at this simulated time")->check(CLI::NonNegativeNumber);
  sim->add_flag("--oracle", oracle, "re-examine every activity after each event");
  sim->add_option("--trace", trace, "write the event trace to this file");
  auto* reward_opt = sim->add_option("--reward", reward, "reward variable to estimate");
  sim->add_option("--runs", runs, "independent replications (seeds S, S+1, ...)")
      ->check(CLI::PositiveNumber)
      ->needs(reward_opt);

  std::string topology = "ring";
  std::string n_text;
  std::string mode = "both";
  int repeats = 5;
  std::string bench_csv;
  auto* bench = app.add_subcommand("bench", "connectivity construction scaling benchmark");
  bench->add_option("--topology", topology, "ring, ring(k), star or full");
  bench->add_option("--n", n_text, "comma-separated replica counts, ascending")->required();
  bench->add_option("--mode", mode, "narep, rep-emulated or both")
      ->check(CLI::IsMember({"narep", "rep-emulated", "both"}));
  bench->add_option("--repeats", repeats, "construction repeats per row")->check(CLI::PositiveNumber);
  bench->add_option("--csv", bench_csv, "output file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (check->parsed()) {
    const Loaded l = load_flat(model);
    std::cout << "ok " << l.flat.vars().size() << " vars " << l.flat.activities().size() << " activities "
              << l.file.rewards.size() << " rewards\n";
    return 0;
  }

  if (flat->parsed()) {
    const Loaded l = load_flat(model);
    emit(flat_out, [&](std::ostream& os) {
      if (dump) {
        os << narep::dump(l.flat);
      } else {
        os << "vars " << l.flat.vars().size() << "\nactivities " << l.flat.activities().size() << '\n';
      }
    });
    return 0;
  }

  if (conn->parsed()) {
    const Loaded l = load_flat(model);
    const narep::ConnectivityLists cl = narep::build_connectivity(l.flat);
    if (count || conn_csv.empty()) std::cout << narep::format_connectivity(l.flat, cl);
    if (!conn_csv.empty()) {
      const auto [n, kind] = replication_of(l.file.root);
      const std::string name = std::filesystem::path(model).stem().string();
      emit(conn_csv, [&](std::ostream& os) {
        os << "model,n,mode,vars,activities,checks,build_ns\n"
           << name << ',' << n << ',' << kind << ',' << l.flat.vars().size() << ',' << l.flat.activities().size()
           << ',' << cl.check_count << ',' << cl.build_time_ns << '\n';
      });
    }
    return 0;
  }

  if (sim->parsed()) {
    if (!max_events && !max_time) throw UsageError("simulate needs --max-events or --max-time");
    const Loaded l = load_flat(model);
    const narep::ConnectivityLists cl = narep::build_connectivity(l.flat);
    narep::SimConfig cfg;
    cfg.seed = seed;
    cfg.stop_after_events = max_events;
    cfg.stop_at_time = max_time;
    cfg.mode = oracle ? narep::SimMode::Oracle : narep::SimMode::Connectivity;

    const narep::RewardVar* rv = nullptr;
    if (!reward.empty()) {
      rv = l.file.find_reward(reward);
      if (!rv) throw UsageError("no reward named '" + reward + "' in " + model);
    }

    if (!rv || !trace.empty()) {
      const narep::Trajectory t = narep::simulate(l.flat, cl, cfg);
      if (!trace.empty()) emit(trace, [&](std::ostream& os) { narep::write_trace(os, t); });
      if (!rv) {
        std::cout << "events " << t.events.size() << "\nend_time " << narep::format_double(t.end_time)
                  << "\nstatus " << narep::to_string(t.status) << "\ndraws " << t.draws << '\n';
        return 0;
      }
    }

    std::vector<std::uint64_t> seeds;
    for (std::int64_t i = 0; i < runs; ++i) seeds.push_back(seed + static_cast<std::uint64_t>(i));
    narep::Estimate est;
    if (runs == 1) {
      est.mean = narep::evaluate_reward(*rv, l.flat, narep::simulate(l.flat, cl, cfg));
      est.half_width = std::numeric_limits<double>::quiet_NaN();
      est.runs = 1;
    } else {
      const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
      const unsigned threads = static_cast<unsigned>(std::min<std::int64_t>(runs, hw));
      est = narep::estimate(*rv, l.flat, cl, cfg, seeds, threads);
    }
    std::cout << rv->name << ' ' << narep::format_double(est.mean) << ' ' << narep::format_double(est.half_width)
              << ' ' << est.runs << '\n';
    return 0;
  }

  if (bench->parsed()) {
    narep::BenchSpec spec;
    try {
      spec.topology = narep::Topology::parse(topology);
    } catch (const narep::Error& e) {
      throw UsageError(e.detail());
    }
    spec.n_list = parse_list(n_text);
    if (!std::is_sorted(spec.n_list.begin(), spec.n_list.end())) throw UsageError("--n must be ascending");
    spec.repeats = repeats;
    if (mode == "narep") spec.modes = {narep::BenchMode::NARep};
    if (mode == "rep-emulated") spec.modes = {narep::BenchMode::RepEmulated};
    const auto rows = narep::run_bench(spec);
    emit(bench_csv, [&](std::ostream& os) { narep::write_bench_csv(os, rows); });
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "narep: " << e.what() << '\n';
    return 2;
  } catch (const narep::Error& e) {
    std::cerr << "narep: " << e.what();
    std::cerr << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "narep: " << e.what() << '\n';
    return 1;
  }
}
