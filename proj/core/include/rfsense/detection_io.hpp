/*
 * rfsense - detection and estimate file formats.
 *
 * Detections are JSONL, one object per event:
 *   {"link_id": ..., "trigger_time": ..., "packet": ...,
 *    "votes": [pair_id, ...], "direction": 1|-1|0, "slope": ...}
 * Tx estimates CSV: header "packet,t_hat_db,sample_count".
 * Detector stats CSV: header "packet,timestamp,pair,short_var,long_var,gamma".
 */
#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "rfsense/compensator.hpp"
#include "rfsense/pipeline.hpp"

namespace rfsense {

void write_detections_jsonl(std::ostream& out, std::span<const DetectionRecord> detections);

/// Reads records back for scoring; votes carry pair ids only.
std::vector<DetectionRecord> read_detections_jsonl(std::istream& in);

void write_tx_estimates_csv(std::ostream& out, std::span<const TxEstimate> estimates);
std::vector<TxEstimate> read_tx_estimates_csv(std::istream& in);

void write_pair_stats_csv(std::ostream& out, std::span<const PairSnapshot> stats);

}  // namespace rfsense
