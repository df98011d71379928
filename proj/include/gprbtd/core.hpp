#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gprbtd {

// Error taxonomy. Preconditions on operations raise std::domain_error;
// calling a model before it is trained raises std::logic_error.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Extent3 {
  int t = 0;
  int x = 0;
  int y = 0;
  friend bool operator==(const Extent3&, const Extent3&) = default;
};

// Dense real array indexed (t, x, y), stored t-fastest, then x, then y,
// so every A-scan is contiguous.
class Array3 {
 public:
  Array3() = default;
  Array3(int nt, int nx, int ny, double fill = 0.0);
  Array3(Extent3 e, double fill = 0.0) : Array3(e.t, e.x, e.y, fill) {}

  int nt() const { return nt_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  Extent3 extent() const { return {nt_, nx_, ny_}; }
  std::size_t size() const { return v_.size(); }

  std::size_t index(int t, int x, int y) const {
    return static_cast<std::size_t>(t) +
           static_cast<std::size_t>(nt_) *
               (static_cast<std::size_t>(x) +
                static_cast<std::size_t>(nx_) * static_cast<std::size_t>(y));
  }
  double& operator()(int t, int x, int y) { return v_[index(t, x, y)]; }
  double operator()(int t, int x, int y) const { return v_[index(t, x, y)]; }

  bool contains(int t, int x, int y) const {
    return t >= 0 && t < nt_ && x >= 0 && x < nx_ && y >= 0 && y < ny_;
  }
  double at_or_zero(int t, int x, int y) const {
    return contains(t, x, y) ? (*this)(t, x, y) : 0.0;
  }

  std::span<const double> ascan(int x, int y) const {
    return {v_.data() + index(0, x, y), static_cast<std::size_t>(nt_)};
  }
  std::span<double> ascan(int x, int y) {
    return {v_.data() + index(0, x, y), static_cast<std::size_t>(nt_)};
  }

  std::span<const double> data() const { return v_; }
  std::span<double> data() { return v_; }

  friend bool operator==(const Array3&, const Array3&) = default;

 private:
  int nt_ = 0;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> v_;
};

// A volume of radar samples with physical spacings. Immutable once built.
class GprVolume {
 public:
  GprVolume(Array3 samples, double dt, double dx, double dy,
            std::optional<int> ground_index = std::nullopt);

  const Array3& samples() const { return samples_; }
  double operator()(int t, int x, int y) const { return samples_(t, x, y); }
  int nt() const { return samples_.nt(); }
  int nx() const { return samples_.nx(); }
  int ny() const { return samples_.ny(); }
  Extent3 extent() const { return samples_.extent(); }
  double dt() const { return dt_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  std::optional<int> ground_index() const { return ground_index_; }

  double width_m() const { return nx() * dx_; }
  double length_m() const { return ny() * dy_; }

  // Nearest sample index for a lane coordinate in meters (index i sits at i*d).
  int nearest_x(double x_m) const;
  int nearest_y(double y_m) const;
  bool contains_point(double x_m, double y_m) const;

  GprVolume with_samples(Array3 samples, std::optional<int> ground_index) const;

 private:
  Array3 samples_;
  double dt_;
  double dx_;
  double dy_;
  std::optional<int> ground_index_;
};

enum class AlarmSource { F2, CCY, FUSED_PRESCREEN, EHD, LG, GPRHOG, SED, FUSED_DISC };
std::string_view to_string(AlarmSource s);
AlarmSource parse_alarm_source(std::string_view s);

struct Alarm {
  std::string lane_id;
  double x_m = 0.0;
  double y_m = 0.0;
  double statistic = 0.0;
  AlarmSource source = AlarmSource::F2;
};

enum class DepthCategory { standard, deep };
enum class MetalContent { metal, low_metal, non_metal };
std::string_view to_string(DepthCategory d);
std::string_view to_string(MetalContent m);
DepthCategory parse_depth_category(std::string_view s);
MetalContent parse_metal_content(std::string_view s);

struct GroundTruthEntry {
  std::string lane_id;
  double x_m = 0.0;
  double y_m = 0.0;
  DepthCategory depth_category = DepthCategory::standard;
  MetalContent metal = MetalContent::metal;
};

struct DataCube {
  Array3 samples;
  std::array<int, 3> origin{};  // (t0, x0, y0) in the parent volume
  Extent3 extent() const { return samples.extent(); }
};

struct LaneDataset {
  std::string lane_id;
  GprVolume volume;
  std::vector<GroundTruthEntry> truth;
  double area_m2 = 0.0;
};

// Validates the area invariant and lane ids of the truth entries.
LaneDataset make_lane_dataset(std::string lane_id, GprVolume volume,
                              std::vector<GroundTruthEntry> truth);
void validate_lane_dataset(const LaneDataset& lane);

// Cube centered spatially on the alarm's nearest (x, y) sample, starting at
// time index t_anchor. Origin is index - extent/2 on each spatial axis.
// Regions outside the volume are zero.
DataCube extract_cube(const GprVolume& volume, const Alarm& alarm, Extent3 extent,
                      int t_anchor);
// Same cropping rule applied to a sub-window of an existing cube.
DataCube crop_cube(const DataCube& cube, int t0, Extent3 extent, int dx_center = 0,
                   int dy_center = 0);

double alarm_distance(const Alarm& a, const Alarm& b);
double alarm_distance(const Alarm& a, const GroundTruthEntry& b);

}  // namespace gprbtd
