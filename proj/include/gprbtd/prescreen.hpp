#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "gprbtd/config.hpp"
#include "gprbtd/core.hpp"
#include "gprbtd/signal.hpp"

namespace gprbtd {

// 2-D map of intensities over (x, y).
struct SpatialMap {
  int nx = 0;
  int ny = 0;
  double dx = 1.0;
  double dy = 1.0;
  std::vector<double> values;  // x fastest

  SpatialMap() = default;
  SpatialMap(int nx_, int ny_, double dx_, double dy_)
      : nx(nx_), ny(ny_), dx(dx_), dy(dy_), values(static_cast<std::size_t>(nx_) * ny_, 0.0) {}

  double& operator()(int x, int y) { return values[static_cast<std::size_t>(y) * nx + x]; }
  double operator()(int x, int y) const { return values[static_cast<std::size_t>(y) * nx + x]; }

  // Image view with rows = x, cols = y.
  Image2 to_image() const;
  static SpatialMap from_image(const Image2& img, double dx, double dy);
};

// ---- F2 ----------------------------------------------------------------

// Six steps on an aligned, ground-removed volume: down-track median, cross-
// track mean removal, depth binning (top-two mean), 1-D CFAR along the series
// of bins (window and guard counted in bins), sum over the bins, then 2-D
// CFAR and Gaussian smoothing of the map.
SpatialMap f2_map(const GprVolume& volume, const PipelineConfig& cfg);

// One alarm per 8-connected component of pixels strictly above threshold,
// located at the intensity-weighted centroid with the component maximum as
// statistic. Components are ordered by their first pixel in y-then-x scan.
std::vector<Alarm> map_alarms_cc(const SpatialMap& map, double threshold,
                                 std::string_view lane_id, AlarmSource source = AlarmSource::F2);

// ---- CCY ---------------------------------------------------------------

struct ConcavityParams {
  int omega = 2;       // search window for the next maximum
  double gamma = 1.0;  // retention threshold
  int max_arm = 5;
};

// Read-only 2-D slice S(t, z) with arbitrary strides.
struct SliceView {
  const double* base = nullptr;
  int nt = 0;
  int nz = 0;
  std::ptrdiff_t t_stride = 1;
  std::ptrdiff_t z_stride = 1;
  double operator()(int t, int z) const { return base[t * t_stride + z * z_stride]; }

  static SliceView of(const Image2& img) {  // rows = t, cols = z
    return {img.data().data(), img.rows(), img.cols(), img.cols(), 1};
  }
};

struct ChainPoint {
  int t = 0;
  int z = 0;
  friend bool operator==(const ChainPoint&, const ChainPoint&) = default;
};

// Traces the chain of retained maxima on the rectified slice max(sign*S, 0),
// ordered by z. Empty when the seed at z0 is below gamma.
std::vector<ChainPoint> trace_concavity_chain(const SliceView& slice, int z0,
                                              const ConcavityParams& p, double sign = 1.0);

// Mean of f over every run of >= 3 consecutive chain points, with
// f = mean(end-point times) - mid-point time (mean of the two central points
// for even runs). Positive for an apex-up arc. 0 when no run exists.
double chain_concavity(std::span<const ChainPoint> chain);

struct ConcavityPair {
  double c_plus = 0.0;
  double c_minus = 0.0;
};
ConcavityPair concavity_pair(const SliceView& slice, int z0, const ConcavityParams& p);

// Per location: c+ + c- of the down-track slice plus c+ + c- of the
// cross-track slice, then Gaussian smoothing (sigma 0 disables it).
SpatialMap ccy_map(const GprVolume& volume, const ConcavityParams& p, double smooth_sigma);

// Alarms at pixels above threshold that are the strict maximum of their
// centered window x window neighbourhood and of their window x window tile.
std::vector<Alarm> ccy_alarms(const SpatialMap& map, double threshold, std::string_view lane_id,
                              int window = 9);

// ---- fusion ------------------------------------------------------------

struct RescaleParams {
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;
  // a * sign(s)|s|^b + c
  double apply(double s) const;
};

struct MergeWeights {
  double f2 = 0.5;
  double ccy = 0.5;
};

// Greedy nearest-pair merging of (F2, CCY) pairs within proximity_m. A merged
// alarm sits at the statistic-weighted centroid and scores
// wf*s_f2 + wc*s_ccy; unmerged alarms keep their statistics. All outputs are
// tagged FUSED_PRESCREEN, ordered by (lane, y, x).
std::vector<Alarm> merge_alarms(std::span<const Alarm> f2, std::span<const Alarm> ccy_rescaled,
                                double proximity_m, MergeWeights w = {});

struct RescaleFit {
  RescaleParams params;
  double auc = 0.0;
  bool degenerate = false;  // single-class training: identity returned
};

std::vector<RescaleParams> rescale_grid();

// Grid search maximizing the full-range AUC of the merged training alarms.
// `area_m2` normalizes FAR; ties keep the earliest grid entry.
RescaleFit fit_rescale(std::span<const Alarm> train_ccy, std::span<const Alarm> train_f2,
                       std::span<const GroundTruthEntry> truth, double area_m2,
                       double proximity_m, MergeWeights w, double halo_m);

std::vector<Alarm> rescale_alarms(std::span<const Alarm> alarms, const RescaleParams& p);

}  // namespace gprbtd
