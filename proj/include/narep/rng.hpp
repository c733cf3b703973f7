#pragma once

// Portable random stream: 64-bit Mersenne Twister (std::mt19937_64) with a
// fixed transform to doubles, so trajectories are reproducible everywhere.

#include <cstdint>
#include <random>

namespace narep {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Raw 64-bit output.
  std::uint64_t next() {
    ++draws_;
    return gen_();
  }

  /// ((x >> 11) + 0.5) * 2^-53: uniform on (0, 1), never 0 or 1.
  double uniform() { return to_unit(next()); }

  /// -ln(u) / rate.
  double exponential(double rate);

  std::uint64_t draws() const { return draws_; }

  static double to_unit(std::uint64_t x) {
    // the top value rounds up to 1.0; keep it inside the interval
    const double u = (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
    return u < 1.0 ? u : 0x1.fffffffffffffp-1;
  }

 private:
  std::mt19937_64 gen_;
  std::uint64_t draws_ = 0;
};

}  // namespace narep
