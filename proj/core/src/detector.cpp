#include "rfsense/detector.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "rfsense/errors.hpp"
#include "rfsense/trace.hpp"

namespace rfsense {

namespace {

constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

/// Single-pass moments with the first present value as anchor; shifting
/// keeps the sums small relative to the dB offsets, so the variance stays
/// accurate over arbitrarily long streams.
struct MomentAcc {
  double anchor = 0.0;
  double sum = 0.0;
  double sum_sq = 0.0;
  int count = 0;

  void add(double value) {
    if (std::isnan(value)) return;
    if (count == 0) anchor = value;
    double d = value - anchor;
    sum += d;
    sum_sq += d * d;
    ++count;
  }

  void add(std::span<const double> values) {
    for (double v : values) add(v);
  }

  bool valid() const { return count >= 2; }

  double mean() const { return anchor + sum / count; }

  double variance() const {
    double centered = sum_sq - sum * sum / count;
    return std::max(0.0, centered) / (count - 1);
  }
};

MomentAcc window_moments(std::span<const double> series, int w, int n) {
  MomentAcc acc;
  if (n < 0 || static_cast<std::size_t>(n) >= series.size()) return acc;
  int start = std::max(0, n - w + 1);
  acc.add(series.subspan(static_cast<std::size_t>(start),
                         static_cast<std::size_t>(n - start + 1)));
  return acc;
}

}  // namespace

int DetectorParams::resolved_quorum(int num_pairs) const {
  if (quorum > 0) return quorum;
  return (num_pairs + 2) / 2;  // ceil((J + 1) / 2)
}

void DetectorParams::validate(int num_pairs) const {
  if (!(short_window > 1)) throw ConfigError("detector: short window must be > 1 packet");
  if (!(long_window > short_window)) {
    throw ConfigError("detector: long window must exceed the short window");
  }
  if (!(threshold_c > 0.0)) throw ConfigError("detector: threshold constant C must be > 0");
  if (!(merge_delta_s >= 0.0)) throw ConfigError("detector: merge interval must be >= 0");
  int q = resolved_quorum(num_pairs);
  if (q < 1 || q > num_pairs) {
    throw ConfigError("detector: quorum must lie in [1, num_pairs]");
  }
}

DetectorParams DetectorConfig::resolve(double rate_hz) const {
  DetectorParams params;
  params.short_window = window_packets(short_window_s, rate_hz);
  params.long_window = window_packets(long_window_s, rate_hz);
  params.threshold_c = threshold_c;
  params.merge_delta_s = merge_delta_s;
  params.quorum = quorum;
  return params;
}

std::optional<double> windowed_mean(std::span<const double> series, int w, int n) {
  MomentAcc acc = window_moments(series, w, n);
  if (!acc.valid()) return std::nullopt;
  return acc.mean();
}

std::optional<double> windowed_variance(std::span<const double> series, int w, int n) {
  MomentAcc acc = window_moments(series, w, n);
  if (!acc.valid()) return std::nullopt;
  return acc.variance();
}

std::optional<double> windowed_std(std::span<const double> series, int w, int n) {
  auto v = windowed_variance(series, w, n);
  if (!v) return std::nullopt;
  return std::sqrt(*v);
}

std::optional<double> subcarrier_avg_variance(
    std::span<const std::span<const double>> series_per_subcarrier, int w, int n) {
  double sum = 0.0;
  int valid = 0;
  for (const auto& series : series_per_subcarrier) {
    if (auto v = windowed_variance(series, w, n)) {
      sum += *v;
      ++valid;
    }
  }
  if (valid == 0) return std::nullopt;
  return sum / valid;
}

std::optional<double> subcarrier_avg_std(
    std::span<const std::span<const double>> series_per_subcarrier, int w, int n) {
  double sum = 0.0;
  int valid = 0;
  for (const auto& series : series_per_subcarrier) {
    if (auto v = windowed_std(series, w, n)) {
      sum += *v;
      ++valid;
    }
  }
  if (valid == 0) return std::nullopt;
  return sum / valid;
}

PairDetector::PairDetector(int pair_id, int num_subcarriers, const DetectorParams& params)
    : pair_id_(pair_id),
      num_subcarriers_(num_subcarriers),
      params_(params),
      ring_(static_cast<std::size_t>(num_subcarriers) * params.long_window, kAbsent) {}

namespace {

/// A window of the last m slots ending at `slot` in a ring of length wl,
/// as one or two contiguous index ranges (inclusive), oldest first.
std::array<std::pair<int, int>, 2> ring_ranges(int slot, int m, int wl) {
  int start = slot - m + 1;
  if (start >= 0) return {{{start, slot}, {1, 0}}};
  return {{{start + wl, wl - 1}, {0, slot}}};
}

}  // namespace

std::optional<PairDetection> PairDetector::push(std::int64_t packet, double timestamp,
                                                std::span<const double> cells) {
  const int wl = params_.long_window;
  const int ws = params_.short_window;
  const int slot = static_cast<int>(frames_seen_ % wl);
  ++frames_seen_;

  for (int k = 0; k < num_subcarriers_; ++k) {
    ring_[static_cast<std::size_t>(k) * wl + slot] = cells[static_cast<std::size_t>(k)];
  }

  snapshot_ = PairSnapshot{};
  snapshot_.packet = packet;
  snapshot_.timestamp = timestamp;
  snapshot_.pair_id = pair_id_;
  snapshot_.excess_sum = excess_sum_;

  // Warm-up: no decisions until the long window has been observed once.
  if (frames_seen_ < wl) return std::nullopt;

  // Subcarrier-averaged statistics over both windows. The ring holds the
  // last w_l samples per subcarrier; the short window is its tail.
  const auto long_ranges = ring_ranges(slot, wl, wl);
  const auto short_ranges = ring_ranges(slot, ws, wl);

  double short_var_sum = 0.0;
  int short_valid = 0;
  double long_var_sum = 0.0;
  double long_std_sum = 0.0;
  int long_valid = 0;

  for (int k = 0; k < num_subcarriers_; ++k) {
    const double* ring = ring_.data() + static_cast<std::size_t>(k) * wl;
    MomentAcc long_acc;
    for (const auto& [lo, hi] : long_ranges) {
      for (int i = lo; i <= hi; ++i) long_acc.add(ring[i]);
    }
    MomentAcc short_acc;
    for (const auto& [lo, hi] : short_ranges) {
      for (int i = lo; i <= hi; ++i) short_acc.add(ring[i]);
    }
    if (short_acc.valid()) {
      short_var_sum += short_acc.variance();
      ++short_valid;
    }
    if (long_acc.valid()) {
      double v = long_acc.variance();
      long_var_sum += v;
      long_std_sum += std::sqrt(v);
      ++long_valid;
    }
  }

  if (short_valid == 0 || long_valid == 0) {
    // Insufficient data; skip the frame without touching the excursion.
    snapshot_.excess_sum = excess_sum_;
    return std::nullopt;
  }

  const double short_var = short_var_sum / short_valid;
  const double long_var = long_var_sum / long_valid;
  const double long_std = long_std_sum / long_valid;
  const double gamma = long_var + params_.threshold_c * long_std;

  snapshot_.short_var = short_var;
  snapshot_.long_var = long_var;
  snapshot_.threshold = gamma;

  const double diff = short_var - long_var;
  if (diff <= 0.0) {
    excess_sum_ = 0.0;
    in_excursion_ = false;
    armed_ = true;
    snapshot_.excess_sum = 0.0;
    return std::nullopt;
  }

  if (!in_excursion_) {
    in_excursion_ = true;
    excursion_start_ = packet;
  }
  excess_sum_ += diff;
  snapshot_.excess_sum = excess_sum_;

  if (armed_ && excess_sum_ > gamma) {
    armed_ = false;  // one detection per excursion
    PairDetection detection;
    detection.pair_id = pair_id_;
    detection.packet = packet;
    detection.timestamp = timestamp;
    detection.accumulated_excess = excess_sum_;
    detection.excursion_start = excursion_start_;
    excess_sum_ = 0.0;
    return detection;
  }
  return std::nullopt;
}

MajorityVoter::MajorityVoter(std::string link_id, const DetectorParams& params, int num_pairs)
    : link_id_(std::move(link_id)),
      short_window_(params.short_window),
      quorum_(params.resolved_quorum(num_pairs)) {}

std::optional<DetectionEvent> MajorityVoter::push(const PairDetection& detection) {
  pending_.push_back(detection);
  const std::int64_t window_start = detection.packet - short_window_ + 1;
  while (!pending_.empty() && pending_.front().packet < window_start) {
    pending_.pop_front();
  }

  std::vector<int> pairs;
  for (const PairDetection& d : pending_) {
    if (std::find(pairs.begin(), pairs.end(), d.pair_id) == pairs.end()) {
      pairs.push_back(d.pair_id);
    }
  }
  if (static_cast<int>(pairs.size()) < quorum_) return std::nullopt;

  DetectionEvent event;
  event.link_id = link_id_;
  event.packet = detection.packet;
  event.trigger_time = detection.timestamp;
  event.votes.assign(pending_.begin(), pending_.end());
  pending_.clear();  // votes are consumed
  return event;
}

std::vector<DetectionEvent> merge_detections(const std::vector<DetectionEvent>& events,
                                             double delta_s) {
  if (delta_s < 0.0) throw ConfigError("merge: delta must be >= 0");
  std::vector<DetectionEvent> merged;
  double suppress_until = -std::numeric_limits<double>::infinity();
  bool have_anchor = false;
  for (const DetectionEvent& event : events) {
    if (have_anchor && event.trigger_time <= suppress_until) continue;
    merged.push_back(event);
    suppress_until = event.trigger_time + delta_s;
    have_anchor = true;
  }
  return merged;
}

}  // namespace rfsense
