/*
 * rfsense - full detection pipeline over a trace:
 * optional compensation -> per-pair detectors -> majority vote ->
 * merge -> direction fit.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rfsense/compensator.hpp"
#include "rfsense/detector.hpp"
#include "rfsense/direction.hpp"
#include "rfsense/trace.hpp"

namespace rfsense {

struct PipelineOptions {
  DetectorParams params;
  bool compensate = false;
  std::optional<std::int64_t> refresh_period_packets;
  bool collect_stats = false;  // per-packet PairSnapshots (large)
};

struct DetectionRecord {
  DetectionEvent event;
  DirectionResult direction;
};

struct PipelineResult {
  std::vector<DetectionRecord> detections;       // voted, merged, with direction
  std::vector<PairDetection> pair_detections;    // raw per-pair triggers
  std::vector<TxEstimate> tx_estimates;          // when compensating
  std::vector<PairSnapshot> stats;               // when collect_stats
};

PipelineResult run_pipeline(const Trace& trace, const PipelineOptions& options);

}  // namespace rfsense
