#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gprbtd/discriminate.hpp"
#include "gprbtd/evaluate.hpp"
#include "gprbtd/pipeline.hpp"

namespace gprbtd {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

// One row of the decision-statistics table. Statistic columns are indexed by
// DiscKind; NaN marks a discriminator that was not run.
struct StatsRow {
  std::string lane_id;
  double x_m = 0.0;
  double y_m = 0.0;
  bool is_threat = false;
  std::optional<DepthCategory> depth;  // of the credited threat
  std::array<double, 4> stat{kMissing, kMissing, kMissing, kMissing};
  double fused = kMissing;
};

// A prescreener alarm with its halo label and cached features.
struct AlarmRecord {
  Alarm alarm;
  bool threat = false;
  std::optional<DepthCategory> depth;
  AlarmFeatures features;
};

std::vector<AlarmRecord> label_and_extract(const PreparedLane& lane, std::span<const Alarm> alarms,
                                           const FeatureContext& ctx, FeatureRequest req);

std::vector<TrainingAlarm> training_alarms(std::span<const std::vector<AlarmRecord>> lanes,
                                           std::span<const std::size_t> lane_indices);

struct FoldResult {
  std::string test_lane;
  std::vector<StatsRow> stats;
  std::size_t train_rows = 0;
  std::size_t test_lane_rows = 0;  // provenance audit count, 0 when clean
};

struct CrossValOptions {
  std::vector<DiscKind> kinds;
  bool fuse = false;
  int jobs = 1;
};

struct CrossValResult {
  std::vector<FoldResult> folds;  // lane order
  std::vector<StatsRow> rows;     // folds concatenated
  bool fused = false;
  std::array<PlattParams, 4> platt{};
  std::string platt_lane;
};

std::uint64_t fold_seed(std::uint64_t seed, std::string_view test_lane);
std::uint64_t kind_seed(std::uint64_t fold, DiscKind k);

// Leave-one-lane-out training and inference. `alarms[i]` are the fused
// prescreener alarms of `lanes[i]`.
CrossValResult cross_validate(std::span<const PreparedLane> lanes,
                              std::span<const std::vector<Alarm>> alarms, const PipelineConfig& cfg,
                              const CrossValOptions& opt);

// Same protocol on records whose features are already extracted.
CrossValResult cross_validate_records(std::span<const std::string> lane_ids,
                                      std::span<const std::vector<AlarmRecord>> records,
                                      const PipelineConfig& cfg, const CrossValOptions& opt);

// Platt models fit on one lane's rows; the lane is cfg.platt_lane (index into
// lane ids sorted) or the first sorted lane holding both classes.
std::string choose_platt_lane(std::span<const StatsRow> rows, int platt_lane);
std::array<PlattParams, 4> fit_platt_on_lane(std::span<const StatsRow> rows, const std::string& lane);
void apply_fusion(std::span<StatsRow> rows, const std::array<PlattParams, 4>& platt);

// Column selector: 0..3 for a discriminator, 4 for the fusion.
inline constexpr int kFusedColumn = 4;
double row_stat(const StatsRow& r, int column);
std::vector<Alarm> rows_as_alarms(std::span<const StatsRow> rows, int column);

// ROC of one column re-labeled against the truth with the halo rule.
RocCurve column_roc(std::span<const StatsRow> rows, std::span<const GroundTruthEntry> truth,
                    int column, double area_m2, double halo_m);
RocCurve column_stratified_roc(std::span<const StatsRow> rows,
                               std::span<const GroundTruthEntry> truth, int column,
                               DepthCategory stratum, double area_m2, double halo_m);

// Runs fn(i) for i in [0, n) over up to `jobs` threads. Exceptions are
// rethrown on the caller after all workers finish (the lowest index wins).
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace gprbtd
