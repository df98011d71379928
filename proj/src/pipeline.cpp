#include "gprbtd/pipeline.hpp"

#include <algorithm>

namespace gprbtd {

PreparedLane prepare_lane(const LaneDataset& lane, const PipelineConfig& cfg) {
  const GroundIndexMap map = estimate_ground(lane.volume, cfg.ground_search_depth);
  const int target = *std::min_element(map.index.begin(), map.index.end());
  GprVolume removed = remove_ground(align_ground(lane.volume, map, target));
  GprVolume processed = depth_whiten(removed, cfg.whiten_half_window, cfg.whiten_guard, cfg.whiten_eps);
  return {lane.lane_id, std::move(removed), std::move(processed), lane.truth, lane.area_m2, map.warning};
}

ConcavityParams concavity_params(const PipelineConfig& cfg) {
  return {cfg.ccy_omega, cfg.ccy_gamma, cfg.ccy_max_arm};
}

MergeWeights merge_weights(const PipelineConfig& cfg) {
  return {cfg.merge_weight_f2, 1.0 - cfg.merge_weight_f2};
}

PrescreenAlarms prescreen_raw(const PreparedLane& lane, const PipelineConfig& cfg) {
  PrescreenAlarms out;
  out.f2 = map_alarms_cc(f2_map(lane.removed, cfg), cfg.f2_threshold, lane.lane_id, AlarmSource::F2);
  out.ccy = ccy_alarms(ccy_map(lane.processed, concavity_params(cfg), cfg.ccy_smooth_sigma),
                       cfg.ccy_threshold, lane.lane_id, cfg.ccy_window);
  return out;
}

PrescreenResult prescreen_lanes(std::span<const PreparedLane> lanes, const PipelineConfig& cfg) {
  PrescreenResult r;
  std::vector<Alarm> all_f2, all_ccy;
  std::vector<GroundTruthEntry> truth;
  double area = 0.0;
  for (const auto& lane : lanes) {
    auto raw = prescreen_raw(lane, cfg);
    all_f2.insert(all_f2.end(), raw.f2.begin(), raw.f2.end());
    all_ccy.insert(all_ccy.end(), raw.ccy.begin(), raw.ccy.end());
    truth.insert(truth.end(), lane.truth.begin(), lane.truth.end());
    area += lane.area_m2;
    r.f2.push_back(std::move(raw.f2));
    r.ccy.push_back(std::move(raw.ccy));
  }
  const MergeWeights w = merge_weights(cfg);
  if (cfg.fit_rescale)
    r.rescale = fit_rescale(all_ccy, all_f2, truth, area, cfg.merge_proximity_m, w, cfg.halo_m);
  else
    r.rescale = {RescaleParams{}, 0.0, true};
  for (std::size_t i = 0; i < lanes.size(); ++i)
    r.fused.push_back(merge_alarms(r.f2[i], rescale_alarms(r.ccy[i], r.rescale.params),
                                   cfg.merge_proximity_m, w));
  return r;
}

Extent3 standard_cube_extent(const PreparedLane& lane, const PipelineConfig& cfg) {
  return {cfg.cube_t > 0 ? cfg.cube_t : lane.processed.nt(), cfg.cube_x, cfg.cube_y};
}

DataCube standard_cube(const PreparedLane& lane, const Alarm& alarm, const PipelineConfig& cfg) {
  return extract_cube(lane.processed, alarm, standard_cube_extent(lane, cfg), 0);
}

}  // namespace gprbtd
