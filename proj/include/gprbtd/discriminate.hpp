#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gprbtd/config.hpp"
#include "gprbtd/core.hpp"
#include "gprbtd/features.hpp"
#include "gprbtd/learn.hpp"

namespace gprbtd {

enum class DiscKind { EHD = 0, LG = 1, GPRHOG = 2, SED = 3 };
inline constexpr std::array<DiscKind, 4> kAllDiscKinds = {DiscKind::EHD, DiscKind::LG,
                                                          DiscKind::GPRHOG, DiscKind::SED};
std::string_view to_string(DiscKind k);
DiscKind parse_disc_kind(std::string_view s);
AlarmSource alarm_source(DiscKind k);

// ---- aggregation ---------------------------------------------------------

// Sum of the k largest values (all of them when fewer than k).
double top_k_sum(std::span<const double> values, int k);

// Affine shift onto [1, 2] over the training range, floored at 1e-9.
struct PositiveShift {
  double lo = 0.0;
  double hi = 1.0;
  double apply(double s) const;
};

double aggregate_ehd(std::span<const double> dt, std::span<const double> ct,
                     const PositiveShift& sdt, const PositiveShift& sct, int k);
double aggregate_lg(double c1, std::span<const double> row_stats, int k);
double aggregate_gprhog(std::span<const double> tx, std::span<const double> ty, int k);
double aggregate_sed(std::span<const double> stats, int k);

// Platt-scaled product over the discriminator columns of one alarm.
double fuse_statistics(std::span<const double> stats, std::span<const PlattParams> platt);
std::vector<double> fuse_discriminators(std::span<const std::vector<double>> stats,
                                        std::span<const PlattParams> platt);

// ---- per-alarm feature cache ----------------------------------------------

struct FeatureRequest {
  bool ehd = true;
  bool lg = true;
  bool gprhog = true;
  bool sed = true;
  static FeatureRequest only(DiscKind k);
  static FeatureRequest all() { return {}; }
};

struct AlarmFeatures {
  std::vector<FeatureVector> ehd_dt;  // one per depth
  std::vector<FeatureVector> ehd_ct;
  std::vector<std::array<double, kLgDim>> lg_matrix;
  std::map<int, HogPair> hog;       // patch start -> features
  std::vector<int> hog_infer;       // starts used at inference
  std::vector<int> hog_positive;    // MSEK-driven starts
  std::vector<int> hog_negative;    // evenly spaced starts
  std::vector<FeatureVector> sed_infer;  // depth-major, 5x5 offsets
  std::vector<FeatureVector> sed_train;  // MSEK-anchored
};

// Shared read-only state for extraction.
struct FeatureContext {
  PipelineConfig cfg;
  LogGaborBank bank;
  explicit FeatureContext(const PipelineConfig& c);
};

// `cube` is the standard alarm cube: full below-ground time axis, centered spatially.
AlarmFeatures extract_alarm_features(const DataCube& cube, const FeatureContext& ctx,
                                     FeatureRequest req = {});

// Evenly spaced starts k * axis_len / n, k = 0..n-1 (integer arithmetic).
std::vector<int> evenly_spaced_starts(int axis_len, int n);
// Centered moving-window starts 0, stride, ... while start + size <= len.
std::vector<int> regular_starts(int len, int size, int stride);

// ---- training sets -------------------------------------------------------

// A prescreener alarm from a training lane with its cached features.
struct TrainingAlarm {
  Alarm alarm;
  const AlarmFeatures* features = nullptr;
  bool threat = false;
  DepthCategory depth = DepthCategory::standard;  // of the credited threat
};

struct Provenance {
  std::string lane_id;
  double x_m = 0.0;
  double y_m = 0.0;
  int t = 0;
};

struct TrainSet {
  std::vector<LabeledFeature> rows;
  std::vector<Provenance> provenance;
  void add(std::vector<double> values, int label, const Alarm& a, int t);
  std::size_t count(int label) const;
};

// Throws std::logic_error when any row comes from test_lane.
void audit_provenance(const TrainSet& set, std::string_view test_lane);

// Indices kept by the positive-selection rule: scores strictly below the
// value at floor(q * n) of the sorted scores.
std::vector<std::size_t> quantile_select(std::span<const double> scores, double q);

struct EhdTrainSets {
  TrainSet dt;
  TrainSet ct;
};
PrototypeSet ehd_prototypes(std::span<const TrainingAlarm> alarms, const PipelineConfig& cfg,
                            std::uint64_t seed);
EhdTrainSets build_train_ehd(std::span<const TrainingAlarm> alarms, const PrototypeSet& protos,
                             const PipelineConfig& cfg, std::uint64_t seed);

struct LgTrainSets {
  TrainSet max_rows;  // per-alarm column maxima
  TrainSet top_rows;  // top rows of each energy matrix
};
// Rows of the matrix ordered by descending Euclidean norm (stable), first n.
std::vector<int> top_rows_by_norm(std::span<const std::array<double, kLgDim>> m, int n);
// Number of rows kept by subsampling (at least 1 for a non-empty set).
std::size_t subsample_count(std::size_t n, double fraction);
LgTrainSets build_train_lg(std::span<const TrainingAlarm> alarms, const PipelineConfig& cfg,
                           std::uint64_t seed);

struct HogTrainSets {
  TrainSet tx;
  TrainSet ty;
};
HogTrainSets build_train_gprhog(std::span<const TrainingAlarm> alarms, const PipelineConfig& cfg);

TrainSet build_train_sed(std::span<const TrainingAlarm> alarms, const PipelineConfig& cfg);

// ---- models --------------------------------------------------------------

struct EhdModel {
  PrototypeSet protos;
  Standardizer sdt, sct;
  SvmModel dt, ct;
  PositiveShift shift_dt, shift_ct;
};
struct LgModel {
  Standardizer s1, s2;
  SvmModel svm1, svm2;
};
struct HogModel {
  ForestModel tx, ty;
};
struct SedModel {
  Standardizer s;
  SvmModel svm;
};

struct Discriminator {
  DiscKind kind = DiscKind::SED;
  PipelineConfig cfg;
  std::variant<std::monostate, EhdModel, LgModel, HogModel, SedModel> model;
  bool trained() const { return model.index() != 0; }
};

// Trains one discriminator. The provenance of every training set is
// audited against `test_lane` when it is non-empty.
Discriminator train_discriminator(DiscKind kind, std::span<const TrainingAlarm> alarms,
                                  const PipelineConfig& cfg, std::uint64_t seed,
                                  std::string_view test_lane = {},
                                  std::vector<TrainSet>* sets_out = nullptr);

double infer(const Discriminator& d, const AlarmFeatures& f);
double infer_ehd(const Discriminator& d, const AlarmFeatures& f);
double infer_lg(const Discriminator& d, const AlarmFeatures& f);
double infer_gprhog(const Discriminator& d, const AlarmFeatures& f);
double infer_sed(const Discriminator& d, const AlarmFeatures& f);

void save_discriminator(const Discriminator& d, const std::string& path);
Discriminator load_discriminator(const std::string& path);
std::string serialize_discriminator(const Discriminator& d);
Discriminator deserialize_discriminator(std::string bytes);

}  // namespace gprbtd
