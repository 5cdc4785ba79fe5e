/*
 * rfsense - direction of motion from the spatial-temporal order of pair
 * detections inside a voted event.
 */
#pragma once

#include <span>

#include "rfsense/detector.hpp"

namespace rfsense {

struct DirectionResult {
  double slope = 0.0;  // packets per spatial unit
  int direction = 0;   // +1, -1, or 0 = unknown
  int pairs_used = 0;
};

/// Least-squares line n = a*d + b over the event's contributing pairs, using
/// each pair's earliest detection packet. Direction is the sign of the
/// slope; unknown when fewer than two distinct pairs, all spatial indexes
/// equal, or the slope is exactly zero.
DirectionResult fit_direction(const DetectionEvent& event,
                              std::span<const double> spatial_index);

}  // namespace rfsense
