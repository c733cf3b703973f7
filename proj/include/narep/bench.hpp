#pragma once

// Scaling benchmark for connectivity construction: each topology is built
// once as a NARep with rep-shared access and once as an anonymous Rep that
// emulates the indices with a shared state array.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "narep/compose.hpp"

namespace narep {

struct Topology {
  enum class Kind { Ring, Star, Full };
  Kind kind = Kind::Ring;
  /// Neighbours on each side for a ring.
  std::int64_t k = 1;

  std::string name() const;
  /// "ring", "ring(2)", "star", "full". Errors: InvalidArgument.
  static Topology parse(const std::string& text);
};

enum class BenchMode { NARep, RepEmulated };

std::string_view to_string(BenchMode m);

/// Model file text for the topology; both modes give the same canonical ids
/// to the state array (0..n-1) and to the activities.
std::string generate_model_text(const Topology& t, std::int64_t n, BenchMode mode);

/// Errors: InvalidArgument (n < 1).
CompositionNode generate_model(const Topology& t, std::int64_t n, BenchMode mode);

struct BenchSpec {
  Topology topology;
  std::vector<std::int64_t> n_list;
  std::vector<BenchMode> modes{BenchMode::NARep, BenchMode::RepEmulated};
  int repeats = 5;
};

struct BenchRow {
  std::string topology;
  std::int64_t n = 0;
  BenchMode mode = BenchMode::NARep;
  std::int64_t vars = 0;
  std::int64_t activities = 0;
  std::int64_t checks = 0;
  std::int64_t build_ns_min = 0;
};

/// One row per (n, mode), in the order given. Errors: InvalidArgument
/// (n_list not ascending, repeats < 1).
std::vector<BenchRow> run_bench(const BenchSpec& spec);

inline constexpr const char* kBenchCsvHeader = "topology,n,mode,vars,activities,checks,build_ns_min";

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

}  // namespace narep
