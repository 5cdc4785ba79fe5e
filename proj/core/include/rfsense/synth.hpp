/*
 * rfsense - synthetic trace generator.
 *
 * Channel model per packet n, pair j, subcarrier k:
 *
 *   H(n,j,k) = tx(n) - baseline_loss(j,k) - dip(j, t_n) + noise
 *
 * where dip is a raised-cosine attenuation centered at the per-pair crossing
 * time and tx follows one of three transmit-power regimes: fixed power,
 * crossing-shaped strategic excursions, or a random level per packet.
 */
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rfsense/trace.hpp"

namespace rfsense {

struct TxNormal {
  friend bool operator==(const TxNormal&, const TxNormal&) = default;
};

/// Crossing-shaped power dips at random intervals; the dip reuses the
/// scenario's depth/width so the excursion mimics a genuine crossing.
struct TxLineCross {
  double period_min_s = 3.0;
  double period_max_s = 10.0;
  friend bool operator==(const TxLineCross&, const TxLineCross&) = default;
};

/// Uniform pick from a fixed set of levels (dBm) each packet.
struct TxRandom {
  std::vector<double> levels_db;
  friend bool operator==(const TxRandom&, const TxRandom&) = default;
};

using TxRegime = std::variant<TxNormal, TxLineCross, TxRandom>;

struct Crossing {
  double center_time_s = 0.0;
  int direction = +1;
  friend bool operator==(const Crossing&, const Crossing&) = default;
};

struct ScenarioConfig {
  TraceMeta meta;
  double duration_s = 0.0;
  /// Baseline path loss per cell, row-major J x N.
  std::vector<double> baseline_loss_db;
  /// Crossing-time offset between adjacent spatial indexes, seconds.
  double antenna_spacing_s = 0.5;
  std::vector<Crossing> crossings;
  double dip_depth_db = 5.0;
  double dip_width_s = 2.0;
  double noise_std_db = 0.0;
  TxRegime tx_regime = TxNormal{};
  std::uint64_t rng_seed = 1;

  void validate() const;  // throws ConfigError

  /// JSON round-trip; accepts a scalar or a J x N array for
  /// baseline_loss_db, always emits the resolved array.
  static ScenarioConfig from_json_text(const std::string& text);
  std::string to_json_text(int indent = 2) const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct SynthResult {
  Trace trace;
  GroundTruth truth;
  std::vector<double> tx_schedule;  // per-packet tx power in dB
};

/// Raised-cosine attenuation, depth dB at the center, zero outside
/// |dt| > width/2.
double crossing_dip_db(double dt_s, double depth_db, double width_s);

/// Deterministic for a given (config, rng_seed).
SynthResult gen_trace(const ScenarioConfig& config);

/// Adds schedule[n] plus fresh Gaussian noise to every present cell of frame
/// n. Throws DataError when schedule length != frame count.
Trace apply_tx_schedule(const Trace& trace, std::span<const double> schedule,
                        double noise_std_db, std::uint64_t rng_seed);

}  // namespace rfsense
