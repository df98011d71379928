#pragma once

#include <vector>

#include "gprbtd/core.hpp"

namespace gprbtd {

// Estimated ground-response time index per (x, y) location.
struct GroundIndexMap {
  int nx = 0;
  int ny = 0;
  std::vector<int> index;  // x fastest
  bool warning = false;    // some A-scan was all zero inside the search window

  int operator()(int x, int y) const { return index[static_cast<std::size_t>(y) * nx + x]; }
  int& operator()(int x, int y) { return index[static_cast<std::size_t>(y) * nx + x]; }
};

// Early-time argmax of |amplitude| over the first `search_depth` samples
// (earliest wins ties). search_depth <= 0 selects T/4 (at least 1).
GroundIndexMap estimate_ground(const GprVolume& volume, int search_depth);

// Shifts each A-scan so its ground index lands on target_index; vacated
// samples are zero. The result carries ground_index = target_index.
GprVolume align_ground(const GprVolume& volume, const GroundIndexMap& map, int target_index);

// Drops every sample at or above the ground index.
GprVolume remove_ground(const GprVolume& volume);

// Per (t, x), whitens along down-track with a window of 2*half_window+1 and a
// guard band excluded.
GprVolume depth_whiten(const GprVolume& volume, int half_window, int guard, double eps);

GprVolume downsample_time(const GprVolume& volume, int factor);

}  // namespace gprbtd
