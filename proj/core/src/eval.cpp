#include "rfsense/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "rfsense/errors.hpp"

namespace rfsense {

Metrics score(std::span<const DetectionRecord> detections, const GroundTruth& truth,
              double match_tolerance_s, std::int64_t n_samples, std::string_view link_id) {
  if (match_tolerance_s < 0.0) throw ConfigError("score: tolerance must be >= 0");

  std::vector<const CrossingEvent*> truths;
  for (const CrossingEvent& event : truth.events) {
    if (event.link_id == link_id) truths.push_back(&event);
  }

  std::vector<const DetectionRecord*> sorted;
  sorted.reserve(detections.size());
  for (const DetectionRecord& d : detections) sorted.push_back(&d);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
    return a->event.trigger_time < b->event.trigger_time;
  });

  // Greedy chronological one-to-one: each truth takes the nearest unmatched
  // detection within tolerance.
  std::vector<bool> used(sorted.size(), false);
  std::vector<double> errors;
  int direction_known = 0;
  int direction_correct = 0;
  for (const CrossingEvent* t : truths) {
    int best = -1;
    double best_err = match_tolerance_s;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (used[i]) continue;
      double err = std::abs(sorted[i]->event.trigger_time - t->time_s);
      if (err < best_err || (best < 0 && err <= best_err)) {
        best = static_cast<int>(i);
        best_err = err;
      }
    }
    if (best < 0) continue;
    used[static_cast<std::size_t>(best)] = true;
    errors.push_back(best_err);
    int dir = sorted[static_cast<std::size_t>(best)]->direction.direction;
    if (dir != 0) {
      ++direction_known;
      if (dir == t->direction) ++direction_correct;
    }
  }

  Metrics metrics;
  metrics.n_samples = n_samples;
  metrics.n_truth = static_cast<int>(truths.size());
  metrics.n_detected = static_cast<int>(sorted.size());
  metrics.n_matched = static_cast<int>(errors.size());

  const int false_alarms = metrics.n_detected - metrics.n_matched;
  const int missed = metrics.n_truth - metrics.n_matched;
  metrics.fa_rate_pct =
      n_samples > 0 ? 100.0 * false_alarms / static_cast<double>(n_samples) : 0.0;
  metrics.md_rate_pct =
      metrics.n_truth > 0 ? 100.0 * missed / static_cast<double>(metrics.n_truth) : 0.0;

  if (!errors.empty()) {
    TimingStats stats;
    stats.min_s = *std::min_element(errors.begin(), errors.end());
    stats.max_s = *std::max_element(errors.begin(), errors.end());
    double sum = 0.0;
    for (double e : errors) sum += e;
    stats.mean_s = sum / static_cast<double>(errors.size());
    metrics.timing_err_s = stats;
  }
  if (direction_known > 0) {
    metrics.direction_accuracy_pct = 100.0 * direction_correct / direction_known;
  }
  return metrics;
}

AblationReport ablate_majority(const Trace& trace, const GroundTruth& truth,
                               const PipelineOptions& options, double match_tolerance_s) {
  PipelineResult full = run_pipeline(trace, options);
  const auto n_samples = static_cast<std::int64_t>(trace.frames.size());

  AblationReport report;
  report.voted =
      score(full.detections, truth, match_tolerance_s, n_samples, trace.meta.link_id);

  // Each pair alone behaves like a quorum-1 pipeline restricted to that
  // pair: its raw detections become events and get delta-merged.
  for (int j = 0; j < trace.meta.num_pairs; ++j) {
    std::vector<DetectionEvent> events;
    for (const PairDetection& d : full.pair_detections) {
      if (d.pair_id != j) continue;
      DetectionEvent event;
      event.link_id = trace.meta.link_id;
      event.packet = d.packet;
      event.trigger_time = d.timestamp;
      event.votes = {d};
      events.push_back(std::move(event));
    }
    auto merged = merge_detections(events, options.params.merge_delta_s);
    std::vector<DetectionRecord> records;
    records.reserve(merged.size());
    for (auto& event : merged) records.push_back({std::move(event), DirectionResult{}});
    report.per_pair[j] =
        score(records, truth, match_tolerance_s, n_samples, trace.meta.link_id);
  }
  return report;
}

std::map<double, Metrics> rate_sweep(const Trace& trace, const GroundTruth& truth,
                                     std::span<const double> rates_hz,
                                     const DetectorConfig& config, bool compensate,
                                     double match_tolerance_s) {
  std::map<double, Metrics> results;
  for (double rate : rates_hz) {
    Trace reduced = downsample(trace, rate);
    PipelineOptions options;
    options.params = config.resolve(reduced.meta.nominal_rate_hz);
    options.compensate = compensate;
    PipelineResult run = run_pipeline(reduced, options);
    results[rate] = score(run.detections, truth, match_tolerance_s,
                          static_cast<std::int64_t>(reduced.frames.size()),
                          reduced.meta.link_id);
  }
  return results;
}

namespace {

std::string fmt(double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
  return buf;
}

}  // namespace

std::string metrics_table(std::span<const std::pair<std::string, Metrics>> rows) {
  std::vector<std::array<std::string, 6>> cells;
  cells.push_back({"", "FA%", "MD%", "Min", "Max", "Mean"});
  for (const auto& [label, m] : rows) {
    std::array<std::string, 6> row;
    row[0] = label;
    row[1] = fmt(m.fa_rate_pct, 4);
    row[2] = fmt(m.md_rate_pct, 2);
    if (m.timing_err_s) {
      row[3] = fmt(m.timing_err_s->min_s, 2);
      row[4] = fmt(m.timing_err_s->max_s, 2);
      row[5] = fmt(m.timing_err_s->mean_s, 2);
    } else {
      row[3] = row[4] = row[5] = "-";
    }
    cells.push_back(std::move(row));
  }

  std::array<std::size_t, 6> width{};
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0) {
        out << row[c] << std::string(width[c] - row[c].size(), ' ');
      } else {
        out << "  " << std::string(width[c] - row[c].size(), ' ') << row[c];
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string metrics_to_json_text(const Metrics& metrics, int indent) {
  nlohmann::ordered_json j{{"fa_rate_pct", metrics.fa_rate_pct},
                           {"md_rate_pct", metrics.md_rate_pct},
                           {"timing_err_s", nullptr},
                           {"direction_accuracy_pct", nullptr},
                           {"n_samples", metrics.n_samples},
                           {"n_truth", metrics.n_truth},
                           {"n_detected", metrics.n_detected},
                           {"n_matched", metrics.n_matched}};
  if (metrics.timing_err_s) {
    j["timing_err_s"] = {{"min", metrics.timing_err_s->min_s},
                         {"max", metrics.timing_err_s->max_s},
                         {"mean", metrics.timing_err_s->mean_s}};
  }
  if (metrics.direction_accuracy_pct) {
    j["direction_accuracy_pct"] = *metrics.direction_accuracy_pct;
  }
  return j.dump(indent);
}

}  // namespace rfsense
