/*
 * rfsense - measurement data model.
 *
 * A trace is a time-ordered sequence of per-packet frames for one
 * transmitter-receiver link. Each frame holds a dense pairs x subcarriers
 * grid of channel magnitudes in dB; cells may be absent (lost packets on
 * some pairs).
 */
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rfsense {

/// Per-link metadata shared by every frame of a trace.
struct TraceMeta {
  std::string link_id;
  int num_pairs = 0;        // J, antenna pairs (or receivers-as-pairs)
  int num_subcarriers = 0;  // N, 1 for single-channel radios
  double nominal_rate_hz = 0.0;
  std::vector<double> spatial_index;  // d_j, position along the monitored corridor

  /// Throws ConfigError when any invariant is violated.
  void validate() const;

  friend bool operator==(const TraceMeta&, const TraceMeta&) = default;
};

/// Dense pairs x subcarriers grid of dB magnitudes; NaN marks an absent cell.
class CellGrid {
 public:
  CellGrid() = default;
  CellGrid(int num_pairs, int num_subcarriers);

  int num_pairs() const { return num_pairs_; }
  int num_subcarriers() const { return num_subcarriers_; }
  std::size_t size() const { return values_.size(); }

  bool present(int pair, int subcarrier) const;
  /// Value of a present cell; NaN when absent.
  double raw(int pair, int subcarrier) const { return values_[index(pair, subcarrier)]; }
  std::optional<double> get(int pair, int subcarrier) const;
  void set(int pair, int subcarrier, double magnitude_db);
  void clear(int pair, int subcarrier);

  std::size_t present_count() const;

  /// Row-major (pair-major) storage, NaN = absent.
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  /// The N cells of one pair.
  std::span<const double> pair_row(int pair) const;

  /// Treats two absent cells as equal.
  friend bool operator==(const CellGrid& a, const CellGrid& b);

 private:
  std::size_t index(int pair, int subcarrier) const {
    return static_cast<std::size_t>(pair) * num_subcarriers_ + subcarrier;
  }

  int num_pairs_ = 0;
  int num_subcarriers_ = 0;
  std::vector<double> values_;
};

/// One packet's measurements.
struct Frame {
  std::int64_t packet = 0;
  double timestamp = 0.0;
  CellGrid cells;

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct Trace {
  TraceMeta meta;
  std::vector<Frame> frames;

  /// Checks meta validity, strictly increasing packet indexes,
  /// non-decreasing timestamps, finite present cells, and grid dimensions.
  /// Throws ConfigError / DataError.
  void validate() const;

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// One video-truth line crossing.
struct CrossingEvent {
  double time_s = 0.0;
  std::string link_id;
  int direction = 0;  // +1 or -1

  friend bool operator==(const CrossingEvent&, const CrossingEvent&) = default;
};

struct GroundTruth {
  std::vector<CrossingEvent> events;  // sorted by time

  void validate() const;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

/// Window length in packets for a duration given in seconds.
int window_packets(double seconds, double rate_hz);

/// Keeps every m-th frame with m = round(nominal/target); packet indexes are
/// reassigned contiguously, timestamps carried from the kept frames, and
/// meta.nominal_rate_hz becomes nominal/m. m == 1 returns the input
/// unchanged. Throws ConfigError for target <= 0 or target > nominal.
Trace downsample(const Trace& trace, double target_rate_hz);

}  // namespace rfsense
