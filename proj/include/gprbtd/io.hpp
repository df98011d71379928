#pragma once

#include <span>
#include <string>
#include <vector>

#include "gprbtd/core.hpp"
#include "gprbtd/crossval.hpp"
#include "gprbtd/evaluate.hpp"
#include "gprbtd/features.hpp"

namespace gprbtd {

// Volume container: `<stem>.json` header next to `<stem>.f32` samples
// (float32 little-endian, t fastest, then x, then y) and `<stem>_truth.csv`.
struct VolumeFiles {
  std::string header;
  std::string samples;
  std::string truth;
};
VolumeFiles volume_files(const std::string& dir, const std::string& lane_id);
VolumeFiles write_lane(const std::string& dir, const LaneDataset& lane);
LaneDataset read_lane(const std::string& header_path);
// Every `*.json` lane header in a directory, sorted by file name.
std::vector<std::string> list_lane_headers(const std::string& dir);

// CSV tables. Numbers are written with round-trip precision.
std::string format_real(double v);

std::string truth_csv(std::span<const GroundTruthEntry> truth);
std::vector<GroundTruthEntry> parse_truth_csv(const std::string& text);

std::string alarms_csv(std::span<const Alarm> alarms);
std::vector<Alarm> parse_alarms_csv(const std::string& text);

// Empty cells mark missing statistics; depth_category is empty for non-threats.
std::string stats_csv(std::span<const StatsRow> rows);
std::vector<StatsRow> parse_stats_csv(const std::string& text);

std::string roc_csv(const RocCurve& curve);
RocCurve parse_roc_csv(const std::string& text);

struct RocSummary {
  double auc = 0.0;
  double max_pd = 0.0;
  int n_threats = 0;
  int n_false = 0;
  double area_m2 = 0.0;
};
RocSummary summarize_roc(const RocCurve& curve, std::span<const LabeledAlarm> alarms);

struct FeatureRow {
  std::string lane_id;
  double x_m = 0.0;
  double y_m = 0.0;
  int t = 0;
  FeatureKind kind = FeatureKind::SED;
  int label = 0;
  std::vector<double> values;
};
std::string features_csv(std::span<const FeatureRow> rows);

std::string read_file(const std::string& path);
// Writes through a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace gprbtd
