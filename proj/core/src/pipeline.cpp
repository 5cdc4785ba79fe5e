#include "rfsense/pipeline.hpp"

namespace rfsense {

PipelineResult run_pipeline(const Trace& trace, const PipelineOptions& options) {
  const TraceMeta& meta = trace.meta;
  meta.validate();
  options.params.validate(meta.num_pairs);

  PipelineResult result;

  std::vector<PairDetector> detectors;
  detectors.reserve(static_cast<std::size_t>(meta.num_pairs));
  for (int j = 0; j < meta.num_pairs; ++j) {
    detectors.emplace_back(j, meta.num_subcarriers, options.params);
  }
  MajorityVoter voter(meta.link_id, options.params, meta.num_pairs);
  PowerCompensator compensator(options.refresh_period_packets);

  std::vector<DetectionEvent> voted;
  for (const Frame& raw_frame : trace.frames) {
    const Frame* frame = &raw_frame;
    Frame compensated;
    if (options.compensate) {
      compensated = compensator.process(raw_frame);
      frame = &compensated;
    }
    // Pairs are processed in id order so pair detections reach the voter
    // time-ordered with deterministic tie-breaks.
    for (int j = 0; j < meta.num_pairs; ++j) {
      auto detection = detectors[static_cast<std::size_t>(j)].push(
          frame->packet, frame->timestamp, frame->cells.pair_row(j));
      if (options.collect_stats) {
        result.stats.push_back(detectors[static_cast<std::size_t>(j)].last_snapshot());
      }
      if (!detection) continue;
      result.pair_detections.push_back(*detection);
      if (auto event = voter.push(*detection)) {
        voted.push_back(std::move(*event));
      }
    }
  }

  if (options.compensate) result.tx_estimates = compensator.estimates();

  auto merged = merge_detections(voted, options.params.merge_delta_s);
  result.detections.reserve(merged.size());
  for (auto& event : merged) {
    DirectionResult direction = fit_direction(event, meta.spatial_index);
    result.detections.push_back({std::move(event), direction});
  }
  return result;
}

}  // namespace rfsense
