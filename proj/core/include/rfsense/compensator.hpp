/*
 * rfsense - transmit-power change estimation and compensation.
 *
 * A power change at the transmitter shifts every pair and subcarrier of a
 * frame by the same amount, while a person crossing a link line perturbs
 * only some cells. The median of the per-cell differences against a
 * reference frame therefore tracks the power shift and ignores crossings,
 * and subtracting it restores channel-only dynamics.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rfsense/trace.hpp"

namespace rfsense {

struct TxEstimate {
  std::int64_t packet = 0;
  double t_hat_db = 0.0;
  int sample_count = 0;  // cells used by the median
};

/// Elementwise frame - reference; cells absent in either side are absent in
/// the result. Throws DataError when no cell overlaps.
CellGrid rss_difference(const CellGrid& frame, const CellGrid& reference);

/// Median over all present cells; even counts take the midpoint of the two
/// central values. Throws DataError on an empty difference map.
TxEstimate estimate_tx_change(const CellGrid& difference, std::int64_t packet = 0);

/// Every present cell shifted by -t_hat_db; absent cells stay absent.
CellGrid compensate(const CellGrid& frame, double t_hat_db);

/// Streaming compensator. The first processed frame becomes the reference;
/// with a refresh period set, the reference is re-anchored periodically and
/// the accumulated power offset carried forward, so the compensated output
/// has no step at a refresh and reported estimates stay relative to the
/// original reference packet.
class PowerCompensator {
 public:
  explicit PowerCompensator(std::optional<std::int64_t> refresh_period_packets = {});

  /// Returns the compensated frame and records the estimate.
  Frame process(const Frame& frame);

  const std::vector<TxEstimate>& estimates() const { return estimates_; }

  /// Difference of the last processed frame against the current reference
  /// (diagnostic; bounded by environment drift between refreshes).
  const CellGrid& last_difference() const { return last_difference_; }

 private:
  std::optional<std::int64_t> refresh_period_;
  std::optional<CellGrid> reference_;
  double carried_offset_db_ = 0.0;
  std::int64_t frames_since_refresh_ = 0;
  CellGrid last_difference_;
  std::vector<TxEstimate> estimates_;
};

}  // namespace rfsense
