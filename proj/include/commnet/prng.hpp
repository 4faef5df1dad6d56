#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace commnet {

/// SplitMix64: a counter-based mix of a golden-ratio-stepped state. Chosen
/// over std::mt19937 + std distributions because its output stream is
/// bit-identical across platforms and standard libraries, which the
/// byte-identical-export contract requires.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [lo, hi] inclusive. Multiply-shift bounded
  /// sampling; the bias is below 2^-64 per range unit.
  std::int64_t next_in(std::int64_t lo, std::int64_t hi) {
    const auto range = static_cast<std::uint64_t>(hi - lo) + 1;
    const auto v = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * range) >> 64);
    return lo + static_cast<std::int64_t>(v);
  }

  /// Index sampled from (unnormalized, nonnegative) weights.
  std::size_t next_weighted(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double x = next_double() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      x -= weights[i];
      if (x < 0.0) return i;
    }
    return weights.size() - 1;
  }

  /// Exponential inter-arrival gap for a rate per minute, in ms.
  double next_exp_gap_ms(double events_per_minute) {
    const double u = 1.0 - next_double();  // (0, 1]
    return -std::log(u) / events_per_minute * 60000.0;
  }
};

/// Deterministic sub-seed for stream `index` of a corpus seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 rng(seed ^ (0xA0761D6478BD642FULL * (index + 1)));
  return rng.next();
}

}  // namespace commnet
