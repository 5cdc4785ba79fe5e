#include "rfsense/trace.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "rfsense/errors.hpp"

namespace rfsense {

namespace {
constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();
}

void TraceMeta::validate() const {
  if (link_id.empty()) throw ConfigError("meta: link_id must not be empty");
  if (num_pairs < 1) throw ConfigError("meta: num_pairs must be >= 1");
  if (num_subcarriers < 1) throw ConfigError("meta: num_subcarriers must be >= 1");
  if (!(nominal_rate_hz > 0.0)) throw ConfigError("meta: nominal_rate_hz must be > 0");
  if (spatial_index.size() != static_cast<std::size_t>(num_pairs)) {
    throw ConfigError("meta: spatial_index must carry exactly one entry per pair");
  }
  for (double d : spatial_index) {
    if (!std::isfinite(d)) throw ConfigError("meta: spatial_index values must be finite");
  }
}

CellGrid::CellGrid(int num_pairs, int num_subcarriers)
    : num_pairs_(num_pairs),
      num_subcarriers_(num_subcarriers),
      values_(static_cast<std::size_t>(num_pairs) * num_subcarriers, kAbsent) {}

bool CellGrid::present(int pair, int subcarrier) const {
  return !std::isnan(values_[index(pair, subcarrier)]);
}

std::optional<double> CellGrid::get(int pair, int subcarrier) const {
  double v = values_[index(pair, subcarrier)];
  if (std::isnan(v)) return std::nullopt;
  return v;
}

void CellGrid::set(int pair, int subcarrier, double magnitude_db) {
  values_[index(pair, subcarrier)] = magnitude_db;
}

void CellGrid::clear(int pair, int subcarrier) {
  values_[index(pair, subcarrier)] = kAbsent;
}

std::size_t CellGrid::present_count() const {
  std::size_t count = 0;
  for (double v : values_) {
    if (!std::isnan(v)) ++count;
  }
  return count;
}

std::span<const double> CellGrid::pair_row(int pair) const {
  return {values_.data() + index(pair, 0), static_cast<std::size_t>(num_subcarriers_)};
}

bool operator==(const CellGrid& a, const CellGrid& b) {
  if (a.num_pairs_ != b.num_pairs_ || a.num_subcarriers_ != b.num_subcarriers_) return false;
  for (std::size_t i = 0; i < a.values_.size(); ++i) {
    double x = a.values_[i];
    double y = b.values_[i];
    if (std::isnan(x) != std::isnan(y)) return false;
    if (!std::isnan(x) && x != y) return false;
  }
  return true;
}

void Trace::validate() const {
  meta.validate();
  const Frame* prev = nullptr;
  for (const Frame& frame : frames) {
    if (frame.cells.num_pairs() != meta.num_pairs ||
        frame.cells.num_subcarriers() != meta.num_subcarriers) {
      throw DataError("trace: frame grid does not match meta dimensions");
    }
    if (prev) {
      if (frame.packet <= prev->packet) {
        throw DataError("trace: packet indexes must be strictly increasing");
      }
      if (frame.timestamp < prev->timestamp) {
        throw DataError("trace: timestamps must be non-decreasing");
      }
    }
    for (double v : frame.cells.values()) {
      if (!std::isnan(v) && !std::isfinite(v)) {
        throw DataError("trace: magnitudes must be finite");
      }
    }
    prev = &frame;
  }
}

void GroundTruth::validate() const {
  const CrossingEvent* prev = nullptr;
  for (const CrossingEvent& event : events) {
    if (event.direction != 1 && event.direction != -1) {
      throw DataError("ground truth: direction must be +1 or -1");
    }
    if (!std::isfinite(event.time_s)) {
      throw DataError("ground truth: event time must be finite");
    }
    if (prev && event.time_s < prev->time_s) {
      throw DataError("ground truth: events must be sorted by time");
    }
    prev = &event;
  }
}

int window_packets(double seconds, double rate_hz) {
  if (!(seconds > 0.0) || !(rate_hz > 0.0)) {
    throw ConfigError("window_packets: seconds and rate must be > 0");
  }
  return static_cast<int>(std::llround(seconds * rate_hz));
}

Trace downsample(const Trace& trace, double target_rate_hz) {
  const double nominal = trace.meta.nominal_rate_hz;
  if (!(target_rate_hz > 0.0) || target_rate_hz > nominal) {
    throw ConfigError("downsample: target rate must be in (0, nominal_rate_hz]");
  }
  const auto step = static_cast<std::int64_t>(std::llround(nominal / target_rate_hz));
  if (step <= 1) return trace;

  Trace out;
  out.meta = trace.meta;
  out.meta.nominal_rate_hz = nominal / static_cast<double>(step);
  out.frames.reserve((trace.frames.size() + step - 1) / step);
  std::int64_t next_packet = 0;
  for (std::size_t i = 0; i < trace.frames.size(); i += step) {
    Frame frame = trace.frames[i];
    frame.packet = next_packet++;
    out.frames.push_back(std::move(frame));
  }
  return out;
}

}  // namespace rfsense
