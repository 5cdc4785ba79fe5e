/*
 * rfsense - scoring against ground truth.
 *
 * False alarms are counted per sample point (so FA% values are tiny by
 * construction); missed detections per true crossing. Matching is greedy
 * chronological one-to-one within a time tolerance.
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rfsense/pipeline.hpp"
#include "rfsense/trace.hpp"

namespace rfsense {

struct TimingStats {
  double min_s = 0.0;
  double max_s = 0.0;
  double mean_s = 0.0;
};

struct Metrics {
  double fa_rate_pct = 0.0;  // false alarms / n_samples * 100
  double md_rate_pct = 0.0;  // missed / n_truth * 100
  std::optional<TimingStats> timing_err_s;  // over matched pairs
  std::optional<double> direction_accuracy_pct;  // over matched pairs with a direction
  std::int64_t n_samples = 0;
  int n_truth = 0;
  int n_detected = 0;
  int n_matched = 0;
};

/// Greedy chronological matching: each truth event takes the nearest
/// unmatched detection within +-tolerance. Truth events are filtered to
/// link_id. Throws ConfigError on a negative tolerance.
Metrics score(std::span<const DetectionRecord> detections, const GroundTruth& truth,
              double match_tolerance_s, std::int64_t n_samples,
              std::string_view link_id);

struct AblationReport {
  std::map<int, Metrics> per_pair;  // each pair alone (its detections, merged)
  Metrics voted;
};

/// Per-pair detectors alone versus the voted pipeline on the same trace.
AblationReport ablate_majority(const Trace& trace, const GroundTruth& truth,
                               const PipelineOptions& options,
                               double match_tolerance_s);

/// Downsamples to each rate, re-derives the windows in packets from the
/// seconds-based config, runs the pipeline and scores it.
std::map<double, Metrics> rate_sweep(const Trace& trace, const GroundTruth& truth,
                                     std::span<const double> rates_hz,
                                     const DetectorConfig& config, bool compensate,
                                     double match_tolerance_s);

/// Aligned plain-text table with columns: FA% MD% Min Max Mean.
std::string metrics_table(std::span<const std::pair<std::string, Metrics>> rows);

std::string metrics_to_json_text(const Metrics& metrics, int indent = 2);

}  // namespace rfsense
