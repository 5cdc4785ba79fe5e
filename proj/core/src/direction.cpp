#include "rfsense/direction.hpp"

#include <map>

namespace rfsense {

DirectionResult fit_direction(const DetectionEvent& event,
                              std::span<const double> spatial_index) {
  // Earliest detection per pair; a pair firing twice inside the window
  // contributes its onset.
  std::map<int, std::int64_t> earliest;
  for (const PairDetection& vote : event.votes) {
    auto [it, inserted] = earliest.try_emplace(vote.pair_id, vote.packet);
    if (!inserted && vote.packet < it->second) it->second = vote.packet;
  }

  DirectionResult result;
  result.pairs_used = static_cast<int>(earliest.size());
  if (result.pairs_used < 2) return result;

  double mean_d = 0.0;
  double mean_n = 0.0;
  for (const auto& [pair, packet] : earliest) {
    mean_d += spatial_index[static_cast<std::size_t>(pair)];
    mean_n += static_cast<double>(packet);
  }
  mean_d /= result.pairs_used;
  mean_n /= result.pairs_used;

  double cov = 0.0;
  double var_d = 0.0;
  for (const auto& [pair, packet] : earliest) {
    double dd = spatial_index[static_cast<std::size_t>(pair)] - mean_d;
    double dn = static_cast<double>(packet) - mean_n;
    cov += dd * dn;
    var_d += dd * dd;
  }
  if (var_d == 0.0) return result;  // all spatial indexes equal

  result.slope = cov / var_d;
  if (result.slope > 0.0) {
    result.direction = +1;
  } else if (result.slope < 0.0) {
    result.direction = -1;
  }
  return result;
}

}  // namespace rfsense
