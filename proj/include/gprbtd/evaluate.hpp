#pragma once

#include <span>
#include <vector>

#include "gprbtd/core.hpp"

namespace gprbtd {

struct LabeledAlarm {
  Alarm alarm;
  bool hit = false;
  int threat = -1;  // index into the truth list of the credited threat
};

struct Labeling {
  std::vector<LabeledAlarm> alarms;
  std::vector<int> missed;  // truth indices that no alarm credits
};

// An alarm is a hit when a threat in the same lane lies within halo_m
// (inclusive). A hit credits only its nearest threat; equal distances go to
// the lower truth index.
Labeling label_alarms(std::span<const Alarm> alarms, std::span<const GroundTruthEntry> truth,
                      double halo_m);

struct RocPoint {
  double far_per_m2 = 0.0;
  double pd = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double area_m2 = 0.0;
  int n_threats = 0;

  double max_pd() const { return points.empty() ? 0.0 : points.back().pd; }
  double max_far() const { return points.empty() ? 0.0 : points.back().far_per_m2; }
};

// Threshold sweep over the distinct statistics, highest first. At a
// threshold every alarm with statistic >= threshold is declared; pd counts
// distinct credited threats. Points sharing a FAR keep only the highest pd.
RocCurve roc(std::span<const LabeledAlarm> alarms, int n_threats, double area_m2);

// Area under the step-interpolated curve over [far_lo, far_hi], divided by
// the range width. pd is 0 left of the first point. Sets *empty_range when
// no curve point lies at or below far_hi.
double auc(const RocCurve& curve, double far_lo, double far_hi, bool* empty_range = nullptr);
// AUC over [0, max_far]; a curve with no false alarms scores its final pd.
double auc_full(const RocCurve& curve);

// Threats restricted to one burial-depth stratum. Alarms credited to threats
// of the other stratum are dropped; false alarms are kept unchanged.
RocCurve stratified_roc(std::span<const LabeledAlarm> alarms,
                        std::span<const GroundTruthEntry> truth, DepthCategory stratum,
                        double area_m2);

// Detection and false-alarm counts at one threshold (statistic >= threshold).
struct ThresholdCounts {
  int detected = 0;
  int false_alarms = 0;
};
ThresholdCounts counts_at(std::span<const LabeledAlarm> alarms, double threshold);

}  // namespace gprbtd
