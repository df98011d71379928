#include "gprbtd/prescreen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "gprbtd/evaluate.hpp"

namespace gprbtd {

Image2 SpatialMap::to_image() const {
  Image2 img(nx, ny);
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) img(x, y) = (*this)(x, y);
  return img;
}

SpatialMap SpatialMap::from_image(const Image2& img, double dx, double dy) {
  SpatialMap m(img.rows(), img.cols(), dx, dy);
  for (int x = 0; x < m.nx; ++x)
    for (int y = 0; y < m.ny; ++y) m(x, y) = img(x, y);
  return m;
}

// ---- F2 ----------------------------------------------------------------

SpatialMap f2_map(const GprVolume& volume, const PipelineConfig& cfg) {
  const int nt = volume.nt(), nx = volume.nx(), ny = volume.ny();
  const int bins = (nt + cfg.f2_depth_bin - 1) / std::max(1, cfg.f2_depth_bin);
  if (cfg.f2_median_length > ny || cfg.f2_depth_bin > nt || 2 * cfg.f2_cfar1d_guard + 1 >= bins ||
      (2 * cfg.f2_cfar2d_guard + 1 >= nx && 2 * cfg.f2_cfar2d_guard + 1 >= ny))
    throw std::domain_error("f2_map: volume smaller than a filter window");

  const Array3& in = volume.samples();
  Array3 work(volume.extent());
  const std::ptrdiff_t y_stride = static_cast<std::ptrdiff_t>(nt) * nx;

  // (1) down-track median per time index
  std::vector<double> row(static_cast<std::size_t>(ny));
  for (int x = 0; x < nx; ++x)
    for (int t = 0; t < nt; ++t) {
      median_filter({&in.data()[in.index(t, x, 0)], ny, y_stride}, row, cfg.f2_median_length);
      for (int y = 0; y < ny; ++y) work(t, x, y) = row[y];
    }

  // (2) cross-track mean removal per time index
  for (int y = 0; y < ny; ++y)
    for (int t = 0; t < nt; ++t) {
      double mean = 0.0;
      for (int x = 0; x < nx; ++x) mean += work(t, x, y);
      mean /= nx;
      for (int x = 0; x < nx; ++x) work(t, x, y) -= mean;
    }

  // (3) depth binning, (4) CFAR along the bin series, (5) sum over time
  SpatialMap map(nx, ny, volume.dx(), volume.dy());
  const int nb = (nt + cfg.f2_depth_bin - 1) / cfg.f2_depth_bin;
  std::vector<double> binned(static_cast<std::size_t>(nb)), whitened(static_cast<std::size_t>(nb));
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) {
      auto a = work.ascan(x, y);
      for (int b = 0; b < nb; ++b) {
        const int b0 = b * cfg.f2_depth_bin, b1 = std::min(nt, b0 + cfg.f2_depth_bin);
        binned[b] = top_two_mean(a.subspan(b0, b1 - b0));
      }
      local_whiten({binned.data(), nb, 1}, whitened, cfg.f2_cfar1d_half, cfg.f2_cfar1d_guard,
                   cfg.cfar_eps);
      map(x, y) = std::accumulate(whitened.begin(), whitened.end(), 0.0);
    }

  // (6) 2-D CFAR, then Gaussian smoothing
  Image2 img = cfar_2d(map.to_image(), cfg.f2_cfar2d_half, cfg.f2_cfar2d_guard, cfg.cfar_eps);
  img = gaussian_smooth(img, cfg.f2_smooth_sigma);
  return SpatialMap::from_image(img, volume.dx(), volume.dy());
}

std::vector<Alarm> map_alarms_cc(const SpatialMap& map, double threshold,
                                 std::string_view lane_id, AlarmSource source) {
  if (!std::isfinite(threshold)) throw std::domain_error("map_alarms_cc: threshold not finite");
  std::vector<Alarm> alarms;
  std::vector<int> label(map.values.size(), -1);
  std::vector<std::pair<int, int>> stack;
  int next = 0;
  for (int y = 0; y < map.ny; ++y)
    for (int x = 0; x < map.nx; ++x) {
      auto idx = [&](int xx, int yy) { return static_cast<std::size_t>(yy) * map.nx + xx; };
      if (label[idx(x, y)] >= 0 || !(map(x, y) > threshold)) continue;
      double wsum = 0.0, wx = 0.0, wy = 0.0, peak = -INFINITY;
      double usum = 0.0, ux = 0.0, uy = 0.0;
      stack.assign(1, {x, y});
      label[idx(x, y)] = next;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        double v = map(cx, cy);
        peak = std::max(peak, v);
        double w = threshold >= 0 ? v : v - threshold;
        wsum += w;
        wx += w * cx;
        wy += w * cy;
        usum += 1.0;
        ux += cx;
        uy += cy;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || nx >= map.nx || ny < 0 || ny >= map.ny) continue;
            if (label[idx(nx, ny)] >= 0 || !(map(nx, ny) > threshold)) continue;
            label[idx(nx, ny)] = next;
            stack.push_back({nx, ny});
          }
      }
      double cx = wsum > 0 ? wx / wsum : ux / usum;
      double cy = wsum > 0 ? wy / wsum : uy / usum;
      alarms.push_back({std::string(lane_id), cx * map.dx, cy * map.dy, peak, source});
      ++next;
    }
  return alarms;
}

// ---- CCY ---------------------------------------------------------------

std::vector<ChainPoint> trace_concavity_chain(const SliceView& s, int z0,
                                              const ConcavityParams& p, double sign) {
  if (z0 < 0 || z0 >= s.nz) throw std::domain_error("concavity: z0 outside the slice");
  auto rect = [&](int t, int z) { return std::max(sign * s(t, z), 0.0); };

  int seed_t = 0;
  double seed_v = rect(0, z0);
  for (int t = 1; t < s.nt; ++t)
    if (rect(t, z0) > seed_v) {
      seed_v = rect(t, z0);
      seed_t = t;
    }
  if (seed_v < p.gamma) return {};

  auto trace = [&](int dir) {
    std::vector<ChainPoint> arm;
    int tc = seed_t;
    for (int j = 1; j <= p.max_arm; ++j) {
      int z = z0 + dir * j;
      if (z < 0 || z >= s.nz) break;
      bool found = false;
      for (int a = 0; a <= p.omega && !found; ++a)
        for (int i : {-a, a}) {
          int t = tc + i;
          if (t < 0 || t >= s.nt || rect(t, z) < p.gamma) continue;
          arm.push_back({t, z});
          tc = t;
          found = true;
          break;
        }
      if (!found) break;
    }
    return arm;
  };

  auto left = trace(-1);
  auto right = trace(+1);
  std::vector<ChainPoint> chain(left.rbegin(), left.rend());
  chain.push_back({seed_t, z0});
  chain.insert(chain.end(), right.begin(), right.end());
  return chain;
}

double chain_concavity(std::span<const ChainPoint> chain) {
  const int n = static_cast<int>(chain.size());
  double total = 0.0;
  int count = 0;
  for (int s = 0; s < n; ++s)
    for (int e = s + 2; e < n; ++e) {
      const int len = e - s + 1;
      const double ends = 0.5 * (chain[s].t + chain[e].t);
      const double mid = len % 2 ? chain[s + len / 2].t
                                 : 0.5 * (chain[s + len / 2 - 1].t + chain[s + len / 2].t);
      total += ends - mid;
      ++count;
    }
  return count ? total / count : 0.0;
}

ConcavityPair concavity_pair(const SliceView& slice, int z0, const ConcavityParams& p) {
  auto plus = trace_concavity_chain(slice, z0, p, 1.0);
  auto minus = trace_concavity_chain(slice, z0, p, -1.0);
  return {chain_concavity(plus), chain_concavity(minus)};
}

SpatialMap ccy_map(const GprVolume& volume, const ConcavityParams& p, double smooth_sigma) {
  const Array3& v = volume.samples();
  const int nt = v.nt(), nx = v.nx(), ny = v.ny();
  SpatialMap map(nx, ny, volume.dx(), volume.dy());
  const double* base = v.data().data();
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) {
      SliceView down{base + v.index(0, x, 0), nt, ny, 1, static_cast<std::ptrdiff_t>(nt) * nx};
      SliceView cross{base + v.index(0, 0, y), nt, nx, 1, nt};
      auto d = concavity_pair(down, y, p);
      auto c = concavity_pair(cross, x, p);
      map(x, y) = d.c_plus + d.c_minus + c.c_plus + c.c_minus;
    }
  if (smooth_sigma > 0)
    map = SpatialMap::from_image(gaussian_smooth(map.to_image(), smooth_sigma), volume.dx(),
                                 volume.dy());
  return map;
}

std::vector<Alarm> ccy_alarms(const SpatialMap& map, double threshold, std::string_view lane_id,
                              int window) {
  if (window < 1 || window % 2 == 0) throw std::domain_error("ccy_alarms: window must be odd");
  const int r = window / 2;
  std::vector<Alarm> out;
  for (int y = 0; y < map.ny; ++y)
    for (int x = 0; x < map.nx; ++x) {
      const double v = map(x, y);
      if (!(v > threshold)) continue;
      bool strict = true;
      for (int dy = -r; dy <= r && strict; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          if (dx == 0 && dy == 0) continue;
          int xx = x + dx, yy = y + dy;
          if (xx < 0 || xx >= map.nx || yy < 0 || yy >= map.ny) continue;
          if (map(xx, yy) >= v) {
            strict = false;
            break;
          }
        }
      const int tx = x / window * window, ty = y / window * window;
      for (int yy = ty; yy < std::min(map.ny, ty + window) && strict; ++yy)
        for (int xx = tx; xx < std::min(map.nx, tx + window); ++xx) {
          if (xx == x && yy == y) continue;
          if (map(xx, yy) >= v) {
            strict = false;
            break;
          }
        }
      if (strict) out.push_back({std::string(lane_id), x * map.dx, y * map.dy, v, AlarmSource::CCY});
    }
  return out;
}

// ---- fusion ------------------------------------------------------------

double RescaleParams::apply(double s) const {
  double mag = std::pow(std::abs(s), b);
  return a * (s < 0 ? -mag : mag) + c;
}

std::vector<Alarm> rescale_alarms(std::span<const Alarm> alarms, const RescaleParams& p) {
  std::vector<Alarm> out(alarms.begin(), alarms.end());
  for (auto& a : out) a.statistic = p.apply(a.statistic);
  return out;
}

std::vector<Alarm> merge_alarms(std::span<const Alarm> f2, std::span<const Alarm> ccy,
                                double proximity_m, MergeWeights w) {
  if (proximity_m < 0) throw std::domain_error("merge_alarms: negative proximity");
  if (w.f2 < 0 || w.ccy < 0 || std::abs(w.f2 + w.ccy - 1.0) > 1e-12)
    throw std::domain_error("merge_alarms: weights must be non-negative and sum to 1");

  struct Pair {
    double d;
    std::size_t i, j;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < f2.size(); ++i)
    for (std::size_t j = 0; j < ccy.size(); ++j) {
      if (f2[i].lane_id != ccy[j].lane_id) continue;
      double d = alarm_distance(f2[i], ccy[j]);
      if (d <= proximity_m) pairs.push_back({d, i, j});
    }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::tie(a.d, a.i, a.j) < std::tie(b.d, b.i, b.j);
  });

  std::vector<bool> used_f(f2.size(), false), used_c(ccy.size(), false);
  std::vector<Alarm> out;
  for (const auto& p : pairs) {
    if (used_f[p.i] || used_c[p.j]) continue;
    used_f[p.i] = used_c[p.j] = true;
    const Alarm& a = f2[p.i];
    const Alarm& b = ccy[p.j];
    double wa = w.f2 * std::max(a.statistic, 0.0);
    double wb = w.ccy * std::max(b.statistic, 0.0);
    if (!(wa + wb > 0)) {
      wa = w.f2;
      wb = w.ccy;
    }
    if (!(wa + wb > 0)) wa = wb = 0.5;
    Alarm m;
    m.lane_id = a.lane_id;
    m.x_m = (wa * a.x_m + wb * b.x_m) / (wa + wb);
    m.y_m = (wa * a.y_m + wb * b.y_m) / (wa + wb);
    m.statistic = w.f2 * a.statistic + w.ccy * b.statistic;
    m.source = AlarmSource::FUSED_PRESCREEN;
    out.push_back(std::move(m));
  }
  for (std::size_t i = 0; i < f2.size(); ++i)
    if (!used_f[i]) {
      out.push_back(f2[i]);
      out.back().source = AlarmSource::FUSED_PRESCREEN;
    }
  for (std::size_t j = 0; j < ccy.size(); ++j)
    if (!used_c[j]) {
      out.push_back(ccy[j]);
      out.back().source = AlarmSource::FUSED_PRESCREEN;
    }
  std::stable_sort(out.begin(), out.end(), [](const Alarm& a, const Alarm& b) {
    return std::tie(a.lane_id, a.y_m, a.x_m) < std::tie(b.lane_id, b.y_m, b.x_m);
  });
  return out;
}

std::vector<RescaleParams> rescale_grid() {
  std::vector<RescaleParams> grid;
  for (int k = -3; k <= 3; ++k)
    for (double b : {0.25, 0.5, 1.0, 2.0}) grid.push_back({std::pow(10.0, k), b, 0.0});
  return grid;
}

RescaleFit fit_rescale(std::span<const Alarm> train_ccy, std::span<const Alarm> train_f2,
                       std::span<const GroundTruthEntry> truth, double area_m2,
                       double proximity_m, MergeWeights w, double halo_m) {
  RescaleFit fit;
  std::vector<Alarm> all(train_ccy.begin(), train_ccy.end());
  all.insert(all.end(), train_f2.begin(), train_f2.end());
  auto labels = label_alarms(all, truth, halo_m);
  bool any_hit = false, any_false = false;
  for (const auto& la : labels.alarms) (la.hit ? any_hit : any_false) = true;
  if (!any_hit || !any_false || truth.empty()) {
    fit.degenerate = true;
    return fit;
  }
  bool first = true;
  for (const auto& p : rescale_grid()) {
    auto merged = merge_alarms(train_f2, rescale_alarms(train_ccy, p), proximity_m, w);
    auto curve = roc(label_alarms(merged, truth, halo_m).alarms, static_cast<int>(truth.size()),
                     area_m2);
    double a = auc_full(curve);
    if (first || a > fit.auc) {
      fit.auc = a;
      fit.params = p;
      first = false;
    }
  }
  return fit;
}

}  // namespace gprbtd
