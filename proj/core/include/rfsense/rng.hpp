/*
 * rfsense - deterministic random streams.
 *
 * std::normal_distribution and std::uniform_int_distribution are
 * implementation-defined, so traces built with them would not reproduce
 * bit-for-bit across standard libraries. These samplers pin the exact draw
 * sequence to the mt19937_64 output stream, which the standard fully
 * specifies.
 */
#pragma once

#include <cstdint>
#include <random>

namespace rfsense {

/// Identifies independent sub-streams derived from one scenario seed.
/// Keeping noise and schedule draws on separate streams makes paired runs
/// (same seed, different tx regime) share identical noise realizations.
enum class RngStream : std::uint32_t {
  tx_schedule = 1,
  cell_noise = 2,
  corruption = 3,
};

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, RngStream stream);

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform01();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  /// Standard normal via Box-Muller (both branches cached).
  double gaussian();

  /// Normal with the given standard deviation.
  double gaussian(double stddev) { return stddev * gaussian(); }

  /// Unbiased index pick in [0, n). n must be >= 1.
  std::size_t pick_index(std::size_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rfsense
