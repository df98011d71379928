#include "gprbtd/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gprbtd {

void local_whiten(StridedSeries in, std::span<double> out, int half, int guard, double eps) {
  const int n = in.size;
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    int count = 0;
    const int lo = std::max(0, i - half), hi = std::min(n - 1, i + half);
    for (int j = lo; j <= hi; ++j) {
      if (std::abs(j - i) <= guard) continue;
      sum += in[j];
      ++count;
    }
    if (count == 0) {
      out[i] = 0.0;
      continue;
    }
    const double mean = sum / count;
    double ss = 0.0;
    for (int j = lo; j <= hi; ++j) {
      if (std::abs(j - i) <= guard) continue;
      ss += (in[j] - mean) * (in[j] - mean);
    }
    out[i] = (in[i] - mean) / (std::sqrt(ss / count) + eps);
  }
}

Image2 cfar_2d(const Image2& in, int half, int guard, double eps) {
  Image2 out(in.rows(), in.cols());
  auto in_ring = [&](int r, int c, int dr, int dc) {
    return std::max(std::abs(dr), std::abs(dc)) > guard && in.contains(r + dr, c + dc);
  };
  for (int r = 0; r < in.rows(); ++r)
    for (int c = 0; c < in.cols(); ++c) {
      double sum = 0.0;
      int count = 0;
      for (int dr = -half; dr <= half; ++dr)
        for (int dc = -half; dc <= half; ++dc)
          if (in_ring(r, c, dr, dc)) {
            sum += in(r + dr, c + dc);
            ++count;
          }
      if (count == 0) continue;
      const double mean = sum / count;
      double ss = 0.0;
      for (int dr = -half; dr <= half; ++dr)
        for (int dc = -half; dc <= half; ++dc)
          if (in_ring(r, c, dr, dc)) {
            double d = in(r + dr, c + dc) - mean;
            ss += d * d;
          }
      out(r, c) = (in(r, c) - mean) / (std::sqrt(ss / count) + eps);
    }
  return out;
}

void median_filter(StridedSeries in, std::span<double> out, int length) {
  if (length < 1) throw std::domain_error("median_filter: length must be >= 1");
  const int n = in.size;
  const int before = (length - 1) / 2;
  std::vector<double> window(static_cast<std::size_t>(length));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < length; ++k) {
      int j = i - before + k;
      window[k] = (j >= 0 && j < n) ? in[j] : 0.0;
    }
    auto mid = window.begin() + length / 2;
    std::nth_element(window.begin(), mid, window.end());
    double m = *mid;
    if (length % 2 == 0) {
      double lower = *std::max_element(window.begin(), mid);
      m = 0.5 * (m + lower);
    }
    out[i] = m;
  }
}

std::vector<double> gaussian_kernel(double sigma) {
  if (sigma <= 0) return {1.0};
  int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    total += k[i + radius];
  }
  for (double& v : k) v /= total;
  return k;
}

Image2 gaussian_smooth(const Image2& in, double sigma) {
  if (sigma <= 0) return in;
  auto k = gaussian_kernel(sigma);
  int radius = static_cast<int>(k.size() / 2);
  Image2 tmp(in.rows(), in.cols());
  for (int r = 0; r < in.rows(); ++r)
    for (int c = 0; c < in.cols(); ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * in.at_or_zero(r + i, c);
      tmp(r, c) = acc;
    }
  Image2 out(in.rows(), in.cols());
  for (int r = 0; r < in.rows(); ++r)
    for (int c = 0; c < in.cols(); ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * tmp.at_or_zero(r, c + i);
      out(r, c) = acc;
    }
  return out;
}

double top_two_mean(std::span<const double> values) {
  if (values.empty()) throw std::domain_error("top_two_mean: empty input");
  if (values.size() == 1) return values[0];
  double a = -INFINITY, b = -INFINITY;
  for (double v : values) {
    if (v > a) {
      b = a;
      a = v;
    } else if (v > b) {
      b = v;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace gprbtd
