/*
 * rfsense - streaming line-crossing detector.
 *
 * Per antenna pair, short- and long-window variance statistics are averaged
 * across subcarriers; an excursion of short-over-long variance accumulates
 * until it exceeds a threshold derived from the long-term statistics. Pair
 * detections are fused by a majority vote over the short window, and voted
 * events closer than a merge interval collapse into one crossing.
 */
#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rfsense {

struct DetectorParams {
  int short_window = 0;       // w_s, packets
  int long_window = 0;        // w_l, packets
  double threshold_c = 3.0;   // C in gamma = V_long + C * S_long
  double merge_delta_s = 4.0; // merge interval, seconds
  int quorum = 0;             // 0 resolves to ceil((J+1)/2)

  int resolved_quorum(int num_pairs) const;
  void validate(int num_pairs) const;  // throws ConfigError
};

/// Detector settings expressed in seconds; windows are re-derived in packets
/// for whatever rate a trace (or downsampled trace) carries.
struct DetectorConfig {
  double short_window_s = 4.0;
  double long_window_s = 40.0;
  double threshold_c = 3.0;
  double merge_delta_s = 4.0;
  int quorum = 0;

  DetectorParams resolve(double rate_hz) const;
};

/// Mean over the w samples ending at index n; absent samples (NaN) are
/// skipped and the divisor renormalized. nullopt when fewer than two present
/// samples fall in the window.
std::optional<double> windowed_mean(std::span<const double> series, int w, int n);

/// Unbiased sample variance over the same window (divisor present-1).
std::optional<double> windowed_variance(std::span<const double> series, int w, int n);

std::optional<double> windowed_std(std::span<const double> series, int w, int n);

/// Mean of the per-subcarrier windowed variances over the subcarriers with a
/// valid window. nullopt when none is valid.
std::optional<double> subcarrier_avg_variance(
    std::span<const std::span<const double>> series_per_subcarrier, int w, int n);

/// Mean of the per-subcarrier windowed standard deviations. Note this is the
/// average of square roots, not the square root of the average variance.
std::optional<double> subcarrier_avg_std(
    std::span<const std::span<const double>> series_per_subcarrier, int w, int n);

struct PairDetection {
  int pair_id = 0;
  std::int64_t packet = 0;
  double timestamp = 0.0;
  /// Value of the accumulated short-over-long excess at trigger.
  double accumulated_excess = 0.0;
  /// Packet at which the current positive excursion began (identifies the
  /// excursion a detection belongs to).
  std::int64_t excursion_start = 0;
};

/// Per-packet detector internals for one pair, for stats dumps and plots.
struct PairSnapshot {
  std::int64_t packet = 0;
  double timestamp = 0.0;
  int pair_id = 0;
  std::optional<double> short_var;
  std::optional<double> long_var;
  std::optional<double> threshold;  // gamma(n)
  double excess_sum = 0.0;
};

/// Streaming per-pair detector. Feed one frame row per packet.
class PairDetector {
 public:
  PairDetector(int pair_id, int num_subcarriers, const DetectorParams& params);

  /// cells: the pair's N magnitudes for this packet, NaN = absent.
  /// Returns a detection when the accumulated excess first exceeds gamma(n)
  /// within an excursion; at most one detection per excursion.
  std::optional<PairDetection> push(std::int64_t packet, double timestamp,
                                    std::span<const double> cells);

  /// State after the most recent push.
  const PairSnapshot& last_snapshot() const { return snapshot_; }

 private:
  int pair_id_;
  int num_subcarriers_;
  DetectorParams params_;
  std::vector<double> ring_;  // per-subcarrier rings, w_l deep
  std::int64_t frames_seen_ = 0;
  double excess_sum_ = 0.0;
  bool armed_ = true;
  bool in_excursion_ = false;
  std::int64_t excursion_start_ = 0;
  PairSnapshot snapshot_;
};

struct DetectionEvent {
  std::string link_id;
  std::int64_t packet = 0;
  double trigger_time = 0.0;
  std::vector<PairDetection> votes;
};

/// Majority vote over pair detections: when a detection arrives, pairs with
/// unconsumed detections inside the trailing short window are counted; at
/// quorum an event is emitted and its votes are consumed.
class MajorityVoter {
 public:
  MajorityVoter(std::string link_id, const DetectorParams& params, int num_pairs);

  /// Detections must arrive time-ordered (by packet, ties by pair id).
  std::optional<DetectionEvent> push(const PairDetection& detection);

 private:
  std::string link_id_;
  int short_window_;
  int quorum_;
  std::deque<PairDetection> pending_;
};

/// Suppresses events within (t1, t1 + delta] of an emitted event at t1; the
/// suppression window anchors to emitted events only (no chaining).
std::vector<DetectionEvent> merge_detections(const std::vector<DetectionEvent>& events,
                                             double delta_s);

}  // namespace rfsense
