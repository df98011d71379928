#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gprbtd {

// Every tunable of the pipeline. Loaded from a `key = value` document;
// unknown keys and out-of-range values raise ConfigError.
struct PipelineConfig {
  // preprocessing
  int ground_search_depth = 0;  // 0: a quarter of the A-scan length
  int whiten_half_window = 15;
  int whiten_guard = 2;
  double whiten_eps = 1e-6;

  // standard alarm cube (time 0: full below-ground axis)
  int cube_t = 0;
  int cube_x = 22;
  int cube_y = 22;

  // F2 prescreener
  int f2_median_length = 5;
  int f2_depth_bin = 10;
  int f2_cfar1d_half = 15;  // bins
  int f2_cfar1d_guard = 1;  // bins
  int f2_cfar2d_half = 10;
  int f2_cfar2d_guard = 5;
  double f2_smooth_sigma = 1.5;
  double f2_threshold = 1.0;
  double cfar_eps = 1e-6;

  // CCY prescreener
  int ccy_omega = 2;
  double ccy_gamma = 1.5;
  int ccy_max_arm = 5;
  double ccy_smooth_sigma = 1.5;
  double ccy_threshold = 0.8;
  int ccy_window = 9;

  // prescreener fusion
  double merge_proximity_m = 0.25;
  double merge_weight_f2 = 0.5;
  bool fit_rescale = true;

  // scoring
  double halo_m = 0.25;

  // SVM solver
  double svm_tolerance = 1e-3;
  bool standardize_features = true;

  // EHD
  double ehd_edge_threshold = 3.0;
  int ehd_depths = 14;
  int ehd_depth_stride = 25;
  int ehd_negatives_per_alarm = 5;
  double ehd_positive_quantile = 0.2;
  int ehd_prototypes = 64;
  double ehd_svm_gamma = 0.0;  // 0: 1/D
  double ehd_svm_c = 1.0;
  int ehd_top_k = 3;

  // LG
  double lg_rho_max = 0.35;
  double lg_sigma_rho = 0.65;
  double lg_sigma_theta_deg = 12.0;
  double lg_theta_offset_deg = 10.0;
  int lg_time = 384;
  int lg_width = 15;
  double lg_subsample = 0.05;
  int lg_top_rows = 4;
  int lg_top_k = 3;
  double lg_svm_gamma = 0.0;  // 0: 1/D
  double lg_svm_c = 1.0;

  // gprHOG
  int hog_downsample = 2;
  int hog_size = 18;
  int hog_cell = 6;
  int hog_bins = 9;
  int hog_depth_stride = 6;
  int hog_top_k = 12;
  int hog_trees = 100;
  int hog_min_leaf = 2;
  int hog_positive_patches = 4;
  int hog_negative_patches = 24;

  // SED
  double sed_edge_threshold = 3.0;
  int sed_scans = 50;
  int sed_above = 5;
  int sed_patch = 15;
  int sed_cells = 3;
  int sed_depths = 14;
  int sed_depth_stride = 25;
  int sed_offset_grid = 5;
  int sed_top_k = 25;
  int sed_train_maxima = 2;
  double sed_svm_gamma = 0.001;
  double sed_svm_c = 15.0;

  // MSEK
  int msek_smooth = 7;

  // run
  std::uint64_t seed = 20180901;
  int platt_lane = -1;  // -1: first lane (sorted) holding both classes
};

PipelineConfig parse_config(std::string_view text, PipelineConfig base = {});
PipelineConfig load_config(const std::string& path, PipelineConfig base = {});
// Applies one `key=value` override; throws ConfigError naming the key.
void set_config_value(PipelineConfig& cfg, std::string_view key, std::string_view value);
void validate_config(const PipelineConfig& cfg);
// Canonical dump: every key in declaration order, one per line.
std::string dump_config(const PipelineConfig& cfg);
std::vector<std::string> config_keys();
std::uint64_t config_hash(const PipelineConfig& cfg);

// Shared helpers for `key = value` documents (also used for simulation specs).
struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};
std::vector<KeyValue> parse_key_values(std::string_view text);
std::string read_text_file(const std::string& path);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace gprbtd
