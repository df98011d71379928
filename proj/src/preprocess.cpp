#include "gprbtd/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "gprbtd/signal.hpp"

namespace gprbtd {

GroundIndexMap estimate_ground(const GprVolume& volume, int search_depth) {
  const int nt = volume.nt();
  if (search_depth > nt) throw std::domain_error("estimate_ground: search_depth exceeds T");
  if (search_depth <= 0) search_depth = std::max(1, nt / 4);

  GroundIndexMap map{volume.nx(), volume.ny(),
                     std::vector<int>(static_cast<std::size_t>(volume.nx()) * volume.ny(), 0)};
  for (int y = 0; y < volume.ny(); ++y)
    for (int x = 0; x < volume.nx(); ++x) {
      auto a = volume.samples().ascan(x, y);
      int best = 0;
      double best_abs = std::abs(a[0]);
      for (int t = 1; t < search_depth; ++t)
        if (std::abs(a[t]) > best_abs) {
          best_abs = std::abs(a[t]);
          best = t;
        }
      if (best_abs == 0.0) map.warning = true;
      map(x, y) = best;
    }
  return map;
}

GprVolume align_ground(const GprVolume& volume, const GroundIndexMap& map, int target_index) {
  const int nt = volume.nt();
  if (target_index < 0 || target_index >= nt)
    throw std::domain_error("align_ground: target_index outside [0, T)");
  if (map.nx != volume.nx() || map.ny != volume.ny())
    throw std::domain_error("align_ground: map does not match the volume");

  Array3 out(volume.extent());
  for (int y = 0; y < volume.ny(); ++y)
    for (int x = 0; x < volume.nx(); ++x) {
      const int shift = map(x, y) - target_index;  // positive: move earlier
      auto src = volume.samples().ascan(x, y);
      auto dst = out.ascan(x, y);
      for (int t = 0; t < nt; ++t) {
        int s = t + shift;
        if (s >= 0 && s < nt) dst[t] = src[s];
      }
    }
  return volume.with_samples(std::move(out), target_index);
}

GprVolume remove_ground(const GprVolume& volume) {
  auto g = volume.ground_index();
  if (!g) throw std::domain_error("remove_ground: volume is not ground aligned");
  const int keep = volume.nt() - *g - 1;
  if (keep < 1) throw std::domain_error("remove_ground: nothing below the ground");
  Array3 out(keep, volume.nx(), volume.ny());
  for (int y = 0; y < volume.ny(); ++y)
    for (int x = 0; x < volume.nx(); ++x) {
      auto src = volume.samples().ascan(x, y);
      std::copy(src.begin() + *g + 1, src.end(), out.ascan(x, y).begin());
    }
  return volume.with_samples(std::move(out), std::nullopt);
}

GprVolume depth_whiten(const GprVolume& volume, int half_window, int guard, double eps) {
  if (!(half_window > guard && guard >= 0))
    throw std::domain_error("depth_whiten: need half_window > guard >= 0");
  const Array3& in = volume.samples();
  Array3 out(volume.extent());
  const std::ptrdiff_t y_stride = static_cast<std::ptrdiff_t>(in.nt()) * in.nx();
  std::vector<double> row(static_cast<std::size_t>(in.ny()));
  for (int x = 0; x < in.nx(); ++x)
    for (int t = 0; t < in.nt(); ++t) {
      StridedSeries series{&in.data()[in.index(t, x, 0)], in.ny(), y_stride};
      local_whiten(series, row, half_window, guard, eps);
      for (int y = 0; y < in.ny(); ++y) out(t, x, y) = row[y];
    }
  return volume.with_samples(std::move(out), volume.ground_index());
}

GprVolume downsample_time(const GprVolume& volume, int factor) {
  if (factor <= 0) throw std::domain_error("downsample_time: factor must be >= 1");
  const int nt = (volume.nt() + factor - 1) / factor;
  Array3 out(nt, volume.nx(), volume.ny());
  for (int y = 0; y < volume.ny(); ++y)
    for (int x = 0; x < volume.nx(); ++x) {
      auto src = volume.samples().ascan(x, y);
      auto dst = out.ascan(x, y);
      for (int t = 0; t < nt; ++t) dst[t] = src[t * factor];
    }
  std::optional<int> g;
  if (auto g0 = volume.ground_index()) g = *g0 / factor;
  return GprVolume(std::move(out), volume.dt() * factor, volume.dx(), volume.dy(), g);
}

}  // namespace gprbtd
