#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "gprbtd/config.hpp"
#include "gprbtd/core.hpp"
#include "gprbtd/signal.hpp"

namespace gprbtd {

enum class FeatureKind { EHD_DT, EHD_CT, LG, HOG_TX, HOG_TY, SED };
std::string_view to_string(FeatureKind k);
FeatureKind parse_feature_kind(std::string_view s);

struct FeatureVector {
  std::vector<double> values;
  FeatureKind kind = FeatureKind::SED;
  std::array<int, 3> anchor{};  // (t, x, y) of extraction
  std::size_t size() const { return values.size(); }
};

// ---- edge labels ---------------------------------------------------------

enum class EdgeLabel : std::uint8_t { V = 0, H = 1, D45 = 2, D135 = 3, NONE = 4 };

struct EdgeLabelImage {
  int rows = 0;
  int cols = 0;
  std::vector<EdgeLabel> labels;
  EdgeLabel operator()(int r, int c) const { return labels[static_cast<std::size_t>(r) * cols + c]; }
};

// Kernel k in order V, H, D45, D135; rows index the first image axis.
const std::array<std::array<std::array<int, 3>, 3>, 4>& sobel_kernels();

// Label of the strongest |response| among the four kernels, or NONE when it
// does not exceed threshold. `at(r, c)` supplies the 3x3 neighbourhood.
template <typename At>
EdgeLabel sobel_label(At&& at, int r, int c, double threshold) {
  const auto& k = sobel_kernels();
  double best = -1.0;
  int arg = 4;
  for (int i = 0; i < 4; ++i) {
    double s = 0.0;
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc) s += k[i][dr + 1][dc + 1] * at(r + dr, c + dc);
    s = s < 0 ? -s : s;
    if (s > best) {
      best = s;
      arg = i;
    }
  }
  return best > threshold ? static_cast<EdgeLabel>(arg) : EdgeLabel::NONE;
}

// Border pixels (no full 3x3 support) are NONE.
EdgeLabelImage sobel_edges(const Image2& image, double threshold);

// ---- EHD -----------------------------------------------------------------

enum class EhdDirection { DT, CT };

inline constexpr int kEhdRows = 60;
inline constexpr int kEhdWidth = 15;
inline constexpr int kEhdSubImages = 7;
inline constexpr int kEhdSubRows = 12;
inline constexpr int kEhdSubStride = 8;
inline constexpr int kEhdDim = kEhdSubImages * 5;

// Cube extent must be (60, 15, 15).
FeatureVector ehd_feature(const DataCube& cube, EhdDirection direction, double edge_threshold);

// ---- log-Gabor -----------------------------------------------------------

struct LogGaborParams {
  double rho_max = 0.35;
  double sigma_rho = 0.65;
  double sigma_theta_deg = 12.0;
  double theta_offset_deg = 10.0;
  static LogGaborParams from(const PipelineConfig& cfg);
};

inline constexpr int kLgScales = 4;
inline constexpr int kLgOrientations = 9;
inline constexpr int kLgFilters = kLgScales * kLgOrientations;
inline constexpr int kLgBins = 15;
inline constexpr int kLgDim = 4 * kLgFilters;

// Frequency response at polar coordinates (rho in cycles/sample, theta in
// radians). The angular difference is wrapped to (-pi, pi].
double log_gabor_response(double rho, double theta, double rho0, double theta0,
                          double sigma_rho, double sigma_theta);

// 36 filters on an h x w spectrum in FFT index order. Filter f = scale +
// 4 * orientation: rho0 = rho_max / 2^scale, theta0 = offset + 20 deg * orientation.
// theta is measured from the second (column) frequency axis toward the first.
struct LogGaborBank {
  int h = 0;
  int w = 0;
  std::array<double, kLgScales> rho0{};
  std::array<double, kLgOrientations> theta0{};  // radians
  double sigma_rho = 0.0;
  double sigma_theta = 0.0;
  std::vector<std::vector<double>> filters;  // [36][h*w], row-major

  const std::vector<double>& filter(int scale, int orientation) const {
    return filters[static_cast<std::size_t>(scale + kLgScales * orientation)];
  }
};

LogGaborBank build_log_gabor_bank(int h, int w, const LogGaborParams& p);

// Spatial frequency of FFT bin k on an axis of n samples, in [-0.5, 0.5).
double fft_frequency(int k, int n);

// 2-D DFT helpers on row-major complex images.
void fft2(std::vector<std::complex<double>>& data, int rows, int cols, bool inverse);
// Filter output (inverse transform of spectrum times response).
std::vector<std::complex<double>> apply_frequency_filter(const Image2& image,
                                                         const std::vector<double>& response);

// Filter columns per region: left, middle, right (0-based orientation index).
const std::array<std::array<int, 3>, 3>& lg_region_orientations();
// Column start of the three overlapping regions of width ceil(w/2).
std::array<int, 3> lg_region_starts(int w);
// Start row of each of the 15 half-overlapping depth bins of length t/8.
std::array<int, kLgBins> lg_bin_starts(int t);

// The four planes through the cube center: down-track (t, y), cross-track
// (t, x), diagonal (t, k) at x = y = k, anti-diagonal at x = k, y = n-1-k.
std::array<Image2, 4> lg_planes(const DataCube& cube);

// Energy matrix, rows = depth bins, columns: plane * 36 + region * 12 +
// column-in-region * 4 + scale. Cube must be (bank.h, w, w) with region
// width bank.w = ceil(w/2).
std::vector<std::array<double, kLgDim>> lg_feature_matrix(const DataCube& cube,
                                                          const LogGaborBank& bank);
FeatureVector lg_feature(std::span<const std::array<double, kLgDim>> matrix);

// ---- gprHOG --------------------------------------------------------------

struct HogParams {
  int size = 18;
  int cell = 6;
  int bins = 9;
  int dim() const { return (size / cell) * (size / cell) * bins; }
  static HogParams from(const PipelineConfig& cfg);
};

// HOG without block normalization on one image: centered differences with
// clamped borders, unsigned orientation, hard binning, magnitude votes.
// Histogram index = (cell_row * cells + cell_col) * bins + bin.
std::vector<double> hog_descriptor(const Image2& image, const HogParams& p);

struct HogPair {
  FeatureVector tx;  // mean over (t, y) slices at each x
  FeatureVector ty;  // mean over (t, x) slices at each y
};
// Cube extent must be (size, size, size).
HogPair gprhog_feature(const DataCube& cube, const HogParams& p);

// ---- SED -----------------------------------------------------------------

struct SedParams {
  double edge_threshold = 3.0;
  int scans = 50;
  int patch = 15;
  int cells = 3;
  int dim() const { return cells * cells * 4; }
  static SedParams from(const PipelineConfig& cfg);
};

// Averages the per-scan cell histograms of T-scans t_start .. t_start+scans-1
// over the patch centered at (x0, y0). Labels use the surrounding samples
// (zero outside the array). Index = (cell_x * cells + cell_y) * 4 + bin.
FeatureVector sed_feature(const Array3& samples, int x0, int y0, int t_start, const SedParams& p);
FeatureVector sed_feature(const GprVolume& volume, int x0, int y0, int t_start, const SedParams& p);

// Edge labels of every T-scan with per-bin 3-D prefix sums, for evaluating
// many SED windows on one array.
class SedLabelVolume {
 public:
  SedLabelVolume(const Array3& samples, double edge_threshold);
  FeatureVector feature(int x0, int y0, int t_start, const SedParams& p) const;
  EdgeLabel label(int t, int x, int y) const;

 private:
  // count of label b over [0,t) x [0,x) x [0,y)
  double prefix(int b, int t, int x, int y) const;
  double box(int b, int t0, int t1, int x0, int x1, int y0, int y1) const;
  int nt_, nx_, ny_;
  std::vector<EdgeLabel> labels_;
  std::vector<std::int32_t> prefix_;
};

// ---- MSEK ----------------------------------------------------------------

struct MsekResult {
  std::vector<int> depths;
  bool warning = false;  // energy identically zero
};

// Energy of squared amplitudes averaged over the in-bounds 3x3 neighbourhood,
// smoothed by a centered moving average of smooth_len (truncated at the
// ends). Strict interior maxima by descending energy, at most k of them;
// the global argmax when there is none.
std::vector<double> msek_energy(const Array3& samples, int x0, int y0, int smooth_len);
MsekResult msek_depths(const Array3& samples, int x0, int y0, int smooth_len, int k);
MsekResult msek_depths(const GprVolume& volume, int x0, int y0, int smooth_len, int k);

}  // namespace gprbtd
