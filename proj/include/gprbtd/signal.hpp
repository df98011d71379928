#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gprbtd {

// Row-major 2-D real image (rows first index).
class Image2 {
 public:
  Image2() = default;
  Image2(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), v_(static_cast<std::size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int r, int c) { return v_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return v_[static_cast<std::size_t>(r) * cols_ + c]; }
  bool contains(int r, int c) const { return r >= 0 && r < rows_ && c >= 0 && c < cols_; }
  double at_or_zero(int r, int c) const { return contains(r, c) ? (*this)(r, c) : 0.0; }
  std::span<const double> data() const { return v_; }
  std::span<double> data() { return v_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> v_;
};

// Strided read-only view of a series (e.g. one row of a volume along y).
struct StridedSeries {
  const double* base = nullptr;
  int size = 0;
  std::ptrdiff_t stride = 1;
  double operator[](int i) const { return base[i * stride]; }
};

// CFAR-style whitening of one series: each value becomes
// (v - mean) / (std + eps) over the in-bounds neighbours k with
// guard < |k| <= half. The value itself and the guard band are excluded.
// Population standard deviation; no neighbours gives 0.
void local_whiten(StridedSeries in, std::span<double> out, int half, int guard, double eps);

// 2-D version over a square (Chebyshev) ring: guard < max(|dr|,|dc|) <= half.
Image2 cfar_2d(const Image2& in, int half, int guard, double eps);

// Median over a centered window of `length` samples, zero-padded at the ends.
void median_filter(StridedSeries in, std::span<double> out, int length);

// Normalized Gaussian kernel of radius ceil(3 sigma); sigma 0 gives {1}.
std::vector<double> gaussian_kernel(double sigma);
// Separable Gaussian smoothing with zero padding.
Image2 gaussian_smooth(const Image2& in, double sigma);

// Mean of the two largest values (the single value for length-1 input).
double top_two_mean(std::span<const double> values);

}  // namespace gprbtd
