#include "gprbtd/core.hpp"

#include <cmath>

namespace gprbtd {

Array3::Array3(int nt, int nx, int ny, double fill) : nt_(nt), nx_(nx), ny_(ny) {
  if (nt < 0 || nx < 0 || ny < 0) throw std::domain_error("Array3: negative extent");
  v_.assign(static_cast<std::size_t>(nt) * nx * ny, fill);
}

GprVolume::GprVolume(Array3 samples, double dt, double dx, double dy,
                     std::optional<int> ground_index)
    : samples_(std::move(samples)), dt_(dt), dx_(dx), dy_(dy), ground_index_(ground_index) {
  if (samples_.nt() < 1 || samples_.nx() < 1 || samples_.ny() < 1)
    throw std::domain_error("GprVolume: every axis needs at least one sample");
  if (!(dt_ > 0) || !(dx_ > 0) || !(dy_ > 0))
    throw std::domain_error("GprVolume: spacings must be positive");
  if (ground_index_ && (*ground_index_ < 0 || *ground_index_ >= samples_.nt()))
    throw std::domain_error("GprVolume: ground_index outside [0, T)");
  for (double v : samples_.data())
    if (!std::isfinite(v)) throw std::domain_error("GprVolume: non-finite sample");
}

int GprVolume::nearest_x(double x_m) const { return static_cast<int>(std::lround(x_m / dx_)); }
int GprVolume::nearest_y(double y_m) const { return static_cast<int>(std::lround(y_m / dy_)); }

bool GprVolume::contains_point(double x_m, double y_m) const {
  if (!std::isfinite(x_m) || !std::isfinite(y_m)) return false;
  int ix = nearest_x(x_m);
  int iy = nearest_y(y_m);
  return ix >= 0 && ix < nx() && iy >= 0 && iy < ny();
}

GprVolume GprVolume::with_samples(Array3 samples, std::optional<int> ground_index) const {
  return GprVolume(std::move(samples), dt_, dx_, dy_, ground_index);
}

std::string_view to_string(AlarmSource s) {
  switch (s) {
    case AlarmSource::F2: return "F2";
    case AlarmSource::CCY: return "CCY";
    case AlarmSource::FUSED_PRESCREEN: return "FUSED_PRESCREEN";
    case AlarmSource::EHD: return "EHD";
    case AlarmSource::LG: return "LG";
    case AlarmSource::GPRHOG: return "GPRHOG";
    case AlarmSource::SED: return "SED";
    case AlarmSource::FUSED_DISC: return "FUSED_DISC";
  }
  return "?";
}

AlarmSource parse_alarm_source(std::string_view s) {
  for (auto v : {AlarmSource::F2, AlarmSource::CCY, AlarmSource::FUSED_PRESCREEN,
                 AlarmSource::EHD, AlarmSource::LG, AlarmSource::GPRHOG, AlarmSource::SED,
                 AlarmSource::FUSED_DISC})
    if (to_string(v) == s) return v;
  throw DataError("unknown alarm source '" + std::string(s) + "'");
}

std::string_view to_string(DepthCategory d) {
  return d == DepthCategory::deep ? "deep" : "standard";
}

std::string_view to_string(MetalContent m) {
  switch (m) {
    case MetalContent::metal: return "metal";
    case MetalContent::low_metal: return "low_metal";
    case MetalContent::non_metal: return "non_metal";
  }
  return "?";
}

DepthCategory parse_depth_category(std::string_view s) {
  if (s == "standard") return DepthCategory::standard;
  if (s == "deep") return DepthCategory::deep;
  throw DataError("unknown depth category '" + std::string(s) + "'");
}

MetalContent parse_metal_content(std::string_view s) {
  if (s == "metal") return MetalContent::metal;
  if (s == "low_metal") return MetalContent::low_metal;
  if (s == "non_metal") return MetalContent::non_metal;
  throw DataError("unknown metal content '" + std::string(s) + "'");
}

void validate_lane_dataset(const LaneDataset& lane) {
  double expected = lane.volume.width_m() * lane.volume.length_m();
  if (!(lane.area_m2 > 0) || std::abs(lane.area_m2 - expected) > 1e-9 * expected)
    throw DataError("lane " + lane.lane_id + ": area_m2 does not match X*dx*Y*dy");
  for (const auto& g : lane.truth)
    if (g.lane_id != lane.lane_id)
      throw DataError("lane " + lane.lane_id + ": truth entry from lane " + g.lane_id);
}

LaneDataset make_lane_dataset(std::string lane_id, GprVolume volume,
                              std::vector<GroundTruthEntry> truth) {
  double area = volume.width_m() * volume.length_m();
  LaneDataset lane{std::move(lane_id), std::move(volume), std::move(truth), area};
  validate_lane_dataset(lane);
  return lane;
}

namespace {

DataCube copy_window(const Array3& src, int t0, int x0, int y0, Extent3 e) {
  DataCube cube{Array3(e), {t0, x0, y0}};
  for (int y = 0; y < e.y; ++y)
    for (int x = 0; x < e.x; ++x) {
      int sx = x0 + x, sy = y0 + y;
      if (sx < 0 || sx >= src.nx() || sy < 0 || sy >= src.ny()) continue;
      int lo = std::max(0, -t0);
      int hi = std::min(e.t, src.nt() - t0);
      for (int t = lo; t < hi; ++t) cube.samples(t, x, y) = src(t0 + t, sx, sy);
    }
  return cube;
}

}  // namespace

DataCube extract_cube(const GprVolume& volume, const Alarm& alarm, Extent3 extent,
                      int t_anchor) {
  if (extent.t < 1 || extent.x < 1 || extent.y < 1)
    throw std::domain_error("extract_cube: extent must be positive");
  if (extent.t > 2 * volume.nt() || extent.x > 2 * volume.nx() || extent.y > 2 * volume.ny())
    throw std::domain_error("extract_cube: extent exceeds twice the volume");
  if (!volume.contains_point(alarm.x_m, alarm.y_m))
    throw std::domain_error("extract_cube: alarm outside lane bounds");
  int ix = volume.nearest_x(alarm.x_m);
  int iy = volume.nearest_y(alarm.y_m);
  return copy_window(volume.samples(), t_anchor, ix - extent.x / 2, iy - extent.y / 2, extent);
}

DataCube crop_cube(const DataCube& cube, int t0, Extent3 extent, int dx_center,
                   int dy_center) {
  int cx = cube.samples.nx() / 2 + dx_center;
  int cy = cube.samples.ny() / 2 + dy_center;
  DataCube out = copy_window(cube.samples, t0, cx - extent.x / 2, cy - extent.y / 2, extent);
  out.origin = {cube.origin[0] + t0, cube.origin[1] + cx - extent.x / 2,
                cube.origin[2] + cy - extent.y / 2};
  return out;
}

double alarm_distance(const Alarm& a, const Alarm& b) {
  if (a.lane_id != b.lane_id) throw std::domain_error("alarm_distance: different lanes");
  return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m);
}

double alarm_distance(const Alarm& a, const GroundTruthEntry& b) {
  if (a.lane_id != b.lane_id) throw std::domain_error("alarm_distance: different lanes");
  return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m);
}

}  // namespace gprbtd
