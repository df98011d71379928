#pragma once

#include <span>
#include <string>
#include <vector>

#include "gprbtd/config.hpp"
#include "gprbtd/core.hpp"
#include "gprbtd/prescreen.hpp"
#include "gprbtd/preprocess.hpp"

namespace gprbtd {

// A lane after shared preprocessing. `removed` is aligned with the ground
// dropped (F2 input); `processed` is additionally depth-whitened (CCY and
// discriminator input).
struct PreparedLane {
  std::string lane_id;
  GprVolume removed;
  GprVolume processed;
  std::vector<GroundTruthEntry> truth;
  double area_m2 = 0.0;
  bool ground_warning = false;
};

// Ground estimate, alignment onto the shallowest estimated ground index,
// ground removal and whitening.
PreparedLane prepare_lane(const LaneDataset& lane, const PipelineConfig& cfg);

ConcavityParams concavity_params(const PipelineConfig& cfg);
MergeWeights merge_weights(const PipelineConfig& cfg);

struct PrescreenAlarms {
  std::vector<Alarm> f2;
  std::vector<Alarm> ccy;
};
PrescreenAlarms prescreen_raw(const PreparedLane& lane, const PipelineConfig& cfg);

struct PrescreenResult {
  std::vector<std::vector<Alarm>> f2;   // per lane
  std::vector<std::vector<Alarm>> ccy;  // per lane, before rescaling
  std::vector<std::vector<Alarm>> fused;
  RescaleFit rescale;
};

// Runs both prescreeners on every lane, fits the CCY rescale on all lanes
// (identity when cfg.fit_rescale is false) and merges per lane.
PrescreenResult prescreen_lanes(std::span<const PreparedLane> lanes, const PipelineConfig& cfg);

// Standard discriminator cube: full below-ground time axis, cube_x by cube_y.
Extent3 standard_cube_extent(const PreparedLane& lane, const PipelineConfig& cfg);
DataCube standard_cube(const PreparedLane& lane, const Alarm& alarm, const PipelineConfig& cfg);

}  // namespace gprbtd
