#include "gprbtd/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <unsupported/Eigen/FFT>

namespace gprbtd {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string_view to_string(FeatureKind k) {
  switch (k) {
    case FeatureKind::EHD_DT: return "EHD_DT";
    case FeatureKind::EHD_CT: return "EHD_CT";
    case FeatureKind::LG: return "LG";
    case FeatureKind::HOG_TX: return "HOG_TX";
    case FeatureKind::HOG_TY: return "HOG_TY";
    case FeatureKind::SED: return "SED";
  }
  return "?";
}

FeatureKind parse_feature_kind(std::string_view s) {
  for (auto k : {FeatureKind::EHD_DT, FeatureKind::EHD_CT, FeatureKind::LG, FeatureKind::HOG_TX,
                 FeatureKind::HOG_TY, FeatureKind::SED})
    if (s == to_string(k)) return k;
  throw DataError("unknown feature kind '" + std::string(s) + "'");
}

// ---- edge labels ---------------------------------------------------------

const std::array<std::array<std::array<int, 3>, 3>, 4>& sobel_kernels() {
  static const std::array<std::array<std::array<int, 3>, 3>, 4> k = {{
      {{{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}}},   // V
      {{{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}}},   // H
      {{{0, 1, 2}, {-1, 0, 1}, {-2, -1, 0}}},   // D45
      {{{-2, -1, 0}, {-1, 0, 1}, {0, 1, 2}}},   // D135
  }};
  return k;
}

EdgeLabelImage sobel_edges(const Image2& image, double threshold) {
  EdgeLabelImage out{image.rows(), image.cols(),
                     std::vector<EdgeLabel>(static_cast<std::size_t>(image.rows()) * image.cols(),
                                            EdgeLabel::NONE)};
  auto at = [&](int r, int c) { return image(r, c); };
  for (int r = 1; r + 1 < image.rows(); ++r)
    for (int c = 1; c + 1 < image.cols(); ++c)
      out.labels[static_cast<std::size_t>(r) * image.cols() + c] = sobel_label(at, r, c, threshold);
  return out;
}

// ---- EHD -----------------------------------------------------------------

FeatureVector ehd_feature(const DataCube& cube, EhdDirection direction, double edge_threshold) {
  const Array3& s = cube.samples;
  if (s.extent() != Extent3{kEhdRows, kEhdWidth, kEhdWidth})
    throw std::domain_error("ehd_feature: cube extent must be (60, 15, 15)");
  FeatureVector f;
  f.kind = direction == EhdDirection::DT ? FeatureKind::EHD_DT : FeatureKind::EHD_CT;
  f.anchor = cube.origin;
  f.values.assign(kEhdDim, 0.0);
  constexpr int first = (kEhdWidth - 7) / 2;  // 7 middle planes
  Image2 img(kEhdRows, kEhdWidth);
  for (int plane = first; plane < first + 7; ++plane) {
    for (int t = 0; t < kEhdRows; ++t)
      for (int z = 0; z < kEhdWidth; ++z)
        img(t, z) = direction == EhdDirection::DT ? s(t, plane, z) : s(t, z, plane);
    auto labels = sobel_edges(img, edge_threshold);
    for (int i = 0; i < kEhdSubImages; ++i) {
      const int r0 = i * kEhdSubStride;
      for (int r = r0; r < r0 + kEhdSubRows; ++r)
        for (int c = 0; c < kEhdWidth; ++c)
          f.values[i * 5 + static_cast<int>(labels(r, c))] += 1.0;
    }
  }
  const double norm = 7.0 * kEhdSubRows * kEhdWidth;
  for (double& v : f.values) v /= norm;
  return f;
}

// ---- log-Gabor -----------------------------------------------------------

LogGaborParams LogGaborParams::from(const PipelineConfig& cfg) {
  return {cfg.lg_rho_max, cfg.lg_sigma_rho, cfg.lg_sigma_theta_deg, cfg.lg_theta_offset_deg};
}

double log_gabor_response(double rho, double theta, double rho0, double theta0,
                          double sigma_rho, double sigma_theta) {
  if (!(rho > 0)) return 0.0;
  const double lr = std::log(rho / rho0);
  const double ls = std::log(sigma_rho);
  double d = std::remainder(theta - theta0, 2 * kPi);  // [-pi, pi]
  if (d <= -kPi) d += 2 * kPi;
  return std::exp(-lr * lr / (2 * ls * ls)) * std::exp(-d * d / (2 * sigma_theta * sigma_theta));
}

double fft_frequency(int k, int n) {
  int kk = k < (n + 1) / 2 ? k : k - n;
  if (n % 2 == 0 && k == n / 2) kk = -n / 2;
  return static_cast<double>(kk) / n;
}

LogGaborBank build_log_gabor_bank(int h, int w, const LogGaborParams& p) {
  if (h < 8 || w < 8) throw std::domain_error("build_log_gabor_bank: need h, w >= 8");
  LogGaborBank bank;
  bank.h = h;
  bank.w = w;
  bank.sigma_rho = p.sigma_rho;
  bank.sigma_theta = p.sigma_theta_deg * kPi / 180.0;
  for (int s = 0; s < kLgScales; ++s) bank.rho0[s] = p.rho_max / std::pow(2.0, s);
  for (int o = 0; o < kLgOrientations; ++o)
    bank.theta0[o] = (p.theta_offset_deg + 20.0 * o) * kPi / 180.0;
  bank.filters.assign(kLgFilters, std::vector<double>(static_cast<std::size_t>(h) * w, 0.0));
  for (int o = 0; o < kLgOrientations; ++o)
    for (int s = 0; s < kLgScales; ++s) {
      auto& f = bank.filters[s + kLgScales * o];
      for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
          const double u = fft_frequency(r, h), v = fft_frequency(c, w);
          const double rho = std::hypot(u, v);
          if (rho == 0.0) continue;  // DC
          f[static_cast<std::size_t>(r) * w + c] = log_gabor_response(
              rho, std::atan2(u, v), bank.rho0[s], bank.theta0[o], bank.sigma_rho, bank.sigma_theta);
        }
    }
  return bank;
}

void fft2(std::vector<std::complex<double>>& data, int rows, int cols, bool inverse) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in, out;
  in.resize(cols);
  for (int r = 0; r < rows; ++r) {
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(r) * cols, cols, in.begin());
    inverse ? fft.inv(out, in) : fft.fwd(out, in);
    std::copy_n(out.begin(), cols, data.begin() + static_cast<std::ptrdiff_t>(r) * cols);
  }
  in.resize(rows);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) in[r] = data[static_cast<std::size_t>(r) * cols + c];
    inverse ? fft.inv(out, in) : fft.fwd(out, in);
    for (int r = 0; r < rows; ++r) data[static_cast<std::size_t>(r) * cols + c] = out[r];
  }
}

namespace {

std::vector<std::complex<double>> spectrum(const Image2& image) {
  std::vector<std::complex<double>> z(image.data().begin(), image.data().end());
  fft2(z, image.rows(), image.cols(), false);
  return z;
}

std::vector<std::complex<double>> filtered(const std::vector<std::complex<double>>& spec,
                                           const std::vector<double>& response, int rows,
                                           int cols) {
  std::vector<std::complex<double>> z(spec.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = spec[i] * response[i];
  fft2(z, rows, cols, true);
  return z;
}

}  // namespace

std::vector<std::complex<double>> apply_frequency_filter(const Image2& image,
                                                         const std::vector<double>& response) {
  if (response.size() != image.data().size())
    throw std::domain_error("apply_frequency_filter: response size mismatch");
  return filtered(spectrum(image), response, image.rows(), image.cols());
}

const std::array<std::array<int, 3>, 3>& lg_region_orientations() {
  static const std::array<std::array<int, 3>, 3> cols = {{{0, 1, 2}, {3, 4, 8}, {5, 6, 7}}};
  return cols;
}

std::array<int, 3> lg_region_starts(int w) {
  const int r = (w + 1) / 2;
  return {0, (w - r) / 2, w - r};
}

std::array<int, kLgBins> lg_bin_starts(int t) {
  std::array<int, kLgBins> s{};
  const int half = t / 16;
  for (int b = 0; b < kLgBins; ++b) s[b] = b * half;
  return s;
}

std::array<Image2, 4> lg_planes(const DataCube& cube) {
  const Array3& s = cube.samples;
  if (s.nx() != s.ny()) throw std::domain_error("lg_planes: cube must be square spatially");
  const int n = s.nx(), c = n / 2, nt = s.nt();
  std::array<Image2, 4> p{Image2(nt, n), Image2(nt, n), Image2(nt, n), Image2(nt, n)};
  for (int t = 0; t < nt; ++t)
    for (int k = 0; k < n; ++k) {
      p[0](t, k) = s(t, c, k);
      p[1](t, k) = s(t, k, c);
      p[2](t, k) = s(t, k, k);
      p[3](t, k) = s(t, k, n - 1 - k);
    }
  return p;
}

std::vector<std::array<double, kLgDim>> lg_feature_matrix(const DataCube& cube,
                                                          const LogGaborBank& bank) {
  const Array3& s = cube.samples;
  const int nt = s.nt(), n = s.nx();
  if (nt != bank.h || (n + 1) / 2 != bank.w || nt % 16 != 0)
    throw std::domain_error("lg_feature_matrix: cube does not match the filter bank");
  std::vector<std::array<double, kLgDim>> m(kLgBins);
  for (auto& row : m) row.fill(0.0);

  const auto planes = lg_planes(cube);
  const auto starts = lg_region_starts(n);
  const auto bins = lg_bin_starts(nt);
  const int bin_len = nt / 8;
  const int r = bank.w;
  Image2 region(nt, r);
  for (int p = 0; p < 4; ++p) {
    if (std::all_of(planes[p].data().begin(), planes[p].data().end(),
                    [](double v) { return v == 0.0; }))
      continue;
    for (int g = 0; g < 3; ++g) {
      for (int t = 0; t < nt; ++t)
        for (int c = 0; c < r; ++c) region(t, c) = planes[p](t, starts[g] + c);
      const auto spec = spectrum(region);
      for (int j = 0; j < 3; ++j)
        for (int sc = 0; sc < kLgScales; ++sc) {
          const int o = lg_region_orientations()[g][j];
          const auto out = filtered(spec, bank.filter(sc, o), nt, r);
          std::vector<double> row_energy(nt, 0.0);
          for (int t = 0; t < nt; ++t)
            for (int c = 0; c < r; ++c) row_energy[t] += std::norm(out[static_cast<std::size_t>(t) * r + c]);
          const int col = p * kLgFilters + g * 12 + j * 4 + sc;
          for (int b = 0; b < kLgBins; ++b)
            m[b][col] = std::accumulate(row_energy.begin() + bins[b],
                                        row_energy.begin() + bins[b] + bin_len, 0.0);
        }
    }
  }
  return m;
}

FeatureVector lg_feature(std::span<const std::array<double, kLgDim>> matrix) {
  if (matrix.empty()) throw std::domain_error("lg_feature: empty matrix");
  FeatureVector f;
  f.kind = FeatureKind::LG;
  f.values.assign(matrix[0].begin(), matrix[0].end());
  for (const auto& row : matrix)
    for (int c = 0; c < kLgDim; ++c) f.values[c] = std::max(f.values[c], row[c]);
  return f;
}

// ---- gprHOG --------------------------------------------------------------

HogParams HogParams::from(const PipelineConfig& cfg) {
  return {cfg.hog_size, cfg.hog_cell, cfg.hog_bins};
}

std::vector<double> hog_descriptor(const Image2& img, const HogParams& p) {
  const int rows = img.rows(), cols = img.cols();
  const int cells = p.size / p.cell;
  if (rows != p.size || cols != p.size)
    throw std::domain_error("hog_descriptor: image must be size x size");
  std::vector<double> h(static_cast<std::size_t>(p.dim()), 0.0);
  const double width = kPi / p.bins;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const double gr = img(std::min(r + 1, rows - 1), c) - img(std::max(r - 1, 0), c);
      const double gc = img(r, std::min(c + 1, cols - 1)) - img(r, std::max(c - 1, 0));
      const double mag = std::hypot(gr, gc);
      if (mag == 0.0) continue;
      double a = std::atan2(gr, gc);
      if (a < 0) a += kPi;
      if (a >= kPi) a -= kPi;
      const int bin = std::min(p.bins - 1, static_cast<int>(a / width));
      const int cell = (r / p.cell) * cells + c / p.cell;
      h[static_cast<std::size_t>(cell) * p.bins + bin] += mag;
    }
  return h;
}

HogPair gprhog_feature(const DataCube& cube, const HogParams& p) {
  const Array3& s = cube.samples;
  if (s.extent() != Extent3{p.size, p.size, p.size})
    throw std::domain_error("gprhog_feature: cube extent must be (size, size, size)");
  HogPair out;
  out.tx.kind = FeatureKind::HOG_TX;
  out.ty.kind = FeatureKind::HOG_TY;
  out.tx.anchor = out.ty.anchor = cube.origin;
  out.tx.values.assign(p.dim(), 0.0);
  out.ty.values.assign(p.dim(), 0.0);
  Image2 img(p.size, p.size);
  for (int i = 0; i < p.size; ++i) {
    for (int t = 0; t < p.size; ++t)
      for (int k = 0; k < p.size; ++k) img(t, k) = s(t, i, k);
    auto h = hog_descriptor(img, p);
    for (int d = 0; d < p.dim(); ++d) out.tx.values[d] += h[d] / p.size;
    for (int t = 0; t < p.size; ++t)
      for (int k = 0; k < p.size; ++k) img(t, k) = s(t, k, i);
    h = hog_descriptor(img, p);
    for (int d = 0; d < p.dim(); ++d) out.ty.values[d] += h[d] / p.size;
  }
  return out;
}

// ---- SED -----------------------------------------------------------------

SedParams SedParams::from(const PipelineConfig& cfg) {
  return {cfg.sed_edge_threshold, cfg.sed_scans, cfg.sed_patch, cfg.sed_cells};
}

FeatureVector sed_feature(const Array3& s, int x0, int y0, int t_start, const SedParams& p) {
  FeatureVector f;
  f.kind = FeatureKind::SED;
  f.anchor = {t_start, x0, y0};
  f.values.assign(p.dim(), 0.0);
  const int cell = p.patch / p.cells;
  const int bx = x0 - p.patch / 2, by = y0 - p.patch / 2;
  for (int k = 0; k < p.scans; ++k) {
    const int t = t_start + k;
    if (t < 0 || t >= s.nt()) continue;
    auto at = [&](int x, int y) { return s.at_or_zero(t, x, y); };
    for (int i = 0; i < p.patch; ++i)
      for (int j = 0; j < p.patch; ++j) {
        const EdgeLabel l = sobel_label(at, bx + i, by + j, p.edge_threshold);
        if (l == EdgeLabel::NONE) continue;
        f.values[((i / cell) * p.cells + j / cell) * 4 + static_cast<int>(l)] += 1.0;
      }
  }
  const double norm = static_cast<double>(cell) * cell * p.scans;
  for (double& v : f.values) v /= norm;
  return f;
}

FeatureVector sed_feature(const GprVolume& volume, int x0, int y0, int t_start,
                          const SedParams& p) {
  return sed_feature(volume.samples(), x0, y0, t_start, p);
}

// Labels live on a grid padded by one pixel on each spatial side: beyond it
// every neighbourhood is zero and the label is NONE.
SedLabelVolume::SedLabelVolume(const Array3& s, double edge_threshold)
    : nt_(s.nt()), nx_(s.nx() + 2), ny_(s.ny() + 2) {
  labels_.assign(static_cast<std::size_t>(nt_) * nx_ * ny_, EdgeLabel::NONE);
  for (int t = 0; t < nt_; ++t) {
    auto at = [&](int x, int y) { return s.at_or_zero(t, x, y); };
    for (int y = 0; y < ny_; ++y)
      for (int x = 0; x < nx_; ++x)
        labels_[(static_cast<std::size_t>(y) * nx_ + x) * nt_ + t] =
            sobel_label(at, x - 1, y - 1, edge_threshold);
  }
  const std::size_t pt = nt_ + 1, px = nx_ + 1, py = ny_ + 1;
  prefix_.assign(4 * pt * px * py, 0);
  auto P = [&](int b, std::size_t t, std::size_t x, std::size_t y) -> std::int32_t& {
    return prefix_[((b * py + y) * px + x) * pt + t];
  };
  for (int b = 0; b < 4; ++b)
    for (std::size_t y = 1; y < py; ++y)
      for (std::size_t x = 1; x < px; ++x)
        for (std::size_t t = 1; t < pt; ++t) {
          const bool hit = static_cast<int>(labels_[((y - 1) * nx_ + (x - 1)) * nt_ + (t - 1)]) == b;
          P(b, t, x, y) = hit + P(b, t - 1, x, y) + P(b, t, x - 1, y) + P(b, t, x, y - 1) -
                          P(b, t - 1, x - 1, y) - P(b, t - 1, x, y - 1) - P(b, t, x - 1, y - 1) +
                          P(b, t - 1, x - 1, y - 1);
        }
}

EdgeLabel SedLabelVolume::label(int t, int x, int y) const {
  const int gx = x + 1, gy = y + 1;
  if (t < 0 || t >= nt_ || gx < 0 || gx >= nx_ || gy < 0 || gy >= ny_) return EdgeLabel::NONE;
  return labels_[(static_cast<std::size_t>(gy) * nx_ + gx) * nt_ + t];
}

double SedLabelVolume::prefix(int b, int t, int x, int y) const {
  const std::size_t pt = nt_ + 1, px = nx_ + 1, py = ny_ + 1;
  return prefix_[((b * py + y) * px + x) * pt + t];
}

double SedLabelVolume::box(int b, int t0, int t1, int x0, int x1, int y0, int y1) const {
  // half-open ranges in grid coordinates, clamped to the grid
  t0 = std::clamp(t0, 0, nt_);
  t1 = std::clamp(t1, 0, nt_);
  x0 = std::clamp(x0, 0, nx_);
  x1 = std::clamp(x1, 0, nx_);
  y0 = std::clamp(y0, 0, ny_);
  y1 = std::clamp(y1, 0, ny_);
  if (t0 >= t1 || x0 >= x1 || y0 >= y1) return 0.0;
  return prefix(b, t1, x1, y1) - prefix(b, t0, x1, y1) - prefix(b, t1, x0, y1) -
         prefix(b, t1, x1, y0) + prefix(b, t0, x0, y1) + prefix(b, t0, x1, y0) +
         prefix(b, t1, x0, y0) - prefix(b, t0, x0, y0);
}

FeatureVector SedLabelVolume::feature(int x0, int y0, int t_start, const SedParams& p) const {
  FeatureVector f;
  f.kind = FeatureKind::SED;
  f.anchor = {t_start, x0, y0};
  f.values.assign(p.dim(), 0.0);
  const int cell = p.patch / p.cells;
  const int bx = x0 - p.patch / 2 + 1, by = y0 - p.patch / 2 + 1;  // grid coordinates
  const double norm = static_cast<double>(cell) * cell * p.scans;
  for (int i = 0; i < p.cells; ++i)
    for (int j = 0; j < p.cells; ++j)
      for (int b = 0; b < 4; ++b)
        f.values[(i * p.cells + j) * 4 + b] =
            box(b, t_start, t_start + p.scans, bx + i * cell, bx + (i + 1) * cell, by + j * cell,
                by + (j + 1) * cell) /
            norm;
  return f;
}

// ---- MSEK ----------------------------------------------------------------

std::vector<double> msek_energy(const Array3& s, int x0, int y0, int smooth_len) {
  if (smooth_len < 1) throw std::domain_error("msek: smoothing length must be >= 1");
  const int nt = s.nt();
  std::vector<double> e(nt, 0.0);
  for (int t = 0; t < nt; ++t) {
    double sum = 0.0;
    int n = 0;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if (s.contains(t, x0 + dx, y0 + dy)) {
          const double v = s(t, x0 + dx, y0 + dy);
          sum += v * v;
          ++n;
        }
    e[t] = n ? sum / n : 0.0;
  }
  std::vector<double> out(nt, 0.0);
  const int before = (smooth_len - 1) / 2, after = smooth_len / 2;
  for (int t = 0; t < nt; ++t) {
    const int a = std::max(0, t - before), b = std::min(nt - 1, t + after);
    double sum = 0.0;
    for (int k = a; k <= b; ++k) sum += e[k];
    out[t] = sum / (b - a + 1);
  }
  return out;
}

MsekResult msek_depths(const Array3& s, int x0, int y0, int smooth_len, int k) {
  if (k < 1) throw std::domain_error("msek_depths: k must be >= 1");
  if (x0 < 0 || x0 >= s.nx() || y0 < 0 || y0 >= s.ny())
    throw std::domain_error("msek_depths: location outside the array");
  const auto e = msek_energy(s, x0, y0, smooth_len);
  MsekResult r;
  for (int t = 1; t + 1 < static_cast<int>(e.size()); ++t)
    if (e[t] > e[t - 1] && e[t] > e[t + 1]) r.depths.push_back(t);
  std::stable_sort(r.depths.begin(), r.depths.end(), [&](int a, int b) { return e[a] > e[b]; });
  if (static_cast<int>(r.depths.size()) > k) r.depths.resize(k);
  if (r.depths.empty()) {
    r.depths.push_back(static_cast<int>(std::max_element(e.begin(), e.end()) - e.begin()));
    r.warning = e[r.depths[0]] == 0.0;
  }
  return r;
}

MsekResult msek_depths(const GprVolume& volume, int x0, int y0, int smooth_len, int k) {
  return msek_depths(volume.samples(), x0, y0, smooth_len, k);
}

}  // namespace gprbtd
