#include "gprbtd/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gprbtd {

Labeling label_alarms(std::span<const Alarm> alarms, std::span<const GroundTruthEntry> truth,
                      double halo_m) {
  if (!(halo_m > 0)) throw std::domain_error("label_alarms: halo must be positive");
  Labeling out;
  out.alarms.reserve(alarms.size());
  std::vector<bool> credited(truth.size(), false);
  for (const auto& a : alarms) {
    LabeledAlarm la{a, false, -1};
    double best = INFINITY;
    for (std::size_t j = 0; j < truth.size(); ++j) {
      if (truth[j].lane_id != a.lane_id) continue;
      double d = alarm_distance(a, truth[j]);
      if (d <= halo_m && d < best) {
        best = d;
        la.threat = static_cast<int>(j);
      }
    }
    if (la.threat >= 0) {
      la.hit = true;
      credited[la.threat] = true;
    }
    out.alarms.push_back(std::move(la));
  }
  for (std::size_t j = 0; j < truth.size(); ++j)
    if (!credited[j]) out.missed.push_back(static_cast<int>(j));
  return out;
}

RocCurve roc(std::span<const LabeledAlarm> alarms, int n_threats, double area_m2) {
  if (n_threats <= 0) throw std::domain_error("roc: no threats to detect");
  if (!(area_m2 > 0)) throw std::domain_error("roc: area must be positive");

  std::vector<std::size_t> order(alarms.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return alarms[a].alarm.statistic > alarms[b].alarm.statistic;
  });

  RocCurve curve;
  curve.area_m2 = area_m2;
  curve.n_threats = n_threats;
  std::vector<bool> seen;
  int detected = 0;
  int false_alarms = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = alarms[order[i]].alarm.statistic;
    for (; i < order.size() && alarms[order[i]].alarm.statistic == threshold; ++i) {
      const auto& la = alarms[order[i]];
      if (la.hit) {
        if (static_cast<std::size_t>(la.threat) >= seen.size()) seen.resize(la.threat + 1, false);
        if (!seen[la.threat]) {
          seen[la.threat] = true;
          ++detected;
        }
      } else {
        ++false_alarms;
      }
    }
    RocPoint p{false_alarms / area_m2, static_cast<double>(detected) / n_threats};
    if (!curve.points.empty() && curve.points.back().far_per_m2 == p.far_per_m2)
      curve.points.back().pd = p.pd;
    else
      curve.points.push_back(p);
  }
  return curve;
}

double auc(const RocCurve& curve, double far_lo, double far_hi, bool* empty_range) {
  if (!(far_lo < far_hi)) throw std::domain_error("auc: need far_lo < far_hi");
  if (empty_range) *empty_range = false;
  if (curve.points.empty() || curve.points.front().far_per_m2 > far_hi) {
    if (empty_range) *empty_range = true;
    return 0.0;
  }
  // pd(f) = pd of the last point with far <= f, 0 before the first point.
  double area = 0.0;
  double level = 0.0;
  double cursor = far_lo;
  for (const auto& p : curve.points) {
    if (p.far_per_m2 > far_hi) break;
    if (p.far_per_m2 > cursor) {
      area += level * (p.far_per_m2 - cursor);
      cursor = p.far_per_m2;
    }
    level = p.pd;
  }
  area += level * (far_hi - cursor);
  return std::clamp(area / (far_hi - far_lo), 0.0, 1.0);
}

double auc_full(const RocCurve& curve) {
  if (curve.points.empty()) return 0.0;
  if (curve.max_far() <= 0.0) return curve.max_pd();
  return auc(curve, 0.0, curve.max_far());
}

RocCurve stratified_roc(std::span<const LabeledAlarm> alarms,
                        std::span<const GroundTruthEntry> truth, DepthCategory stratum,
                        double area_m2) {
  int n = 0;
  for (const auto& g : truth) n += g.depth_category == stratum;
  if (n == 0) throw std::domain_error("stratified_roc: stratum has no threats");
  std::vector<LabeledAlarm> kept;
  kept.reserve(alarms.size());
  for (const auto& la : alarms) {
    if (la.hit && truth[la.threat].depth_category != stratum) continue;
    kept.push_back(la);
  }
  return roc(kept, n, area_m2);
}

ThresholdCounts counts_at(std::span<const LabeledAlarm> alarms, double threshold) {
  ThresholdCounts c;
  std::vector<int> threats;
  for (const auto& la : alarms) {
    if (la.alarm.statistic < threshold) continue;
    if (la.hit)
      threats.push_back(la.threat);
    else
      ++c.false_alarms;
  }
  std::sort(threats.begin(), threats.end());
  c.detected = static_cast<int>(std::unique(threats.begin(), threats.end()) - threats.begin());
  return c;
}

}  // namespace gprbtd
