#include "rfsense/compensator.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rfsense/errors.hpp"

namespace rfsense {

CellGrid rss_difference(const CellGrid& frame, const CellGrid& reference) {
  if (frame.num_pairs() != reference.num_pairs() ||
      frame.num_subcarriers() != reference.num_subcarriers()) {
    throw DataError("rss_difference: frame and reference dimensions differ");
  }
  CellGrid diff(frame.num_pairs(), frame.num_subcarriers());
  std::size_t overlap = 0;
  for (int j = 0; j < frame.num_pairs(); ++j) {
    for (int k = 0; k < frame.num_subcarriers(); ++k) {
      if (!frame.present(j, k) || !reference.present(j, k)) continue;
      diff.set(j, k, frame.raw(j, k) - reference.raw(j, k));
      ++overlap;
    }
  }
  if (overlap == 0) throw DataError("rss_difference: no overlapping cells");
  return diff;
}

TxEstimate estimate_tx_change(const CellGrid& difference, std::int64_t packet) {
  std::vector<double> values;
  values.reserve(difference.size());
  for (double v : difference.values()) {
    if (!std::isnan(v)) values.push_back(v);
  }
  if (values.empty()) throw DataError("estimate_tx_change: empty difference map");

  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double median = values[mid];
  if (values.size() % 2 == 0) {
    // Midpoint of the two central values keeps the estimator continuous.
    double below = *std::max_element(values.begin(), values.begin() + mid);
    median = (below + median) / 2.0;
  }

  TxEstimate estimate;
  estimate.packet = packet;
  estimate.t_hat_db = median;
  estimate.sample_count = static_cast<int>(values.size());
  return estimate;
}

CellGrid compensate(const CellGrid& frame, double t_hat_db) {
  if (!std::isfinite(t_hat_db)) throw DataError("compensate: estimate must be finite");
  CellGrid out = frame;
  for (double& v : out.values()) {
    if (!std::isnan(v)) v -= t_hat_db;
  }
  return out;
}

PowerCompensator::PowerCompensator(std::optional<std::int64_t> refresh_period_packets)
    : refresh_period_(refresh_period_packets) {
  if (refresh_period_ && *refresh_period_ < 1) {
    throw ConfigError("compensator: refresh period must be >= 1 packet");
  }
}

Frame PowerCompensator::process(const Frame& frame) {
  if (!reference_) {
    reference_ = frame.cells;
    frames_since_refresh_ = 0;
  }

  last_difference_ = rss_difference(frame.cells, *reference_);
  TxEstimate estimate = estimate_tx_change(last_difference_, frame.packet);
  // Estimates stay relative to the original reference packet across
  // refreshes; the carried offset accumulates what older references already
  // absorbed.
  estimate.t_hat_db += carried_offset_db_;
  estimates_.push_back(estimate);

  Frame out = frame;
  out.cells = compensate(frame.cells, estimate.t_hat_db);

  ++frames_since_refresh_;
  if (refresh_period_ && frames_since_refresh_ >= *refresh_period_) {
    reference_ = frame.cells;
    carried_offset_db_ = estimate.t_hat_db;
    frames_since_refresh_ = 0;
  }
  return out;
}

}  // namespace rfsense
