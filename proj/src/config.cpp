#include "gprbtd/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <variant>

#include "gprbtd/core.hpp"

namespace gprbtd {

namespace {

using Member = std::variant<int PipelineConfig::*, double PipelineConfig::*,
                            bool PipelineConfig::*, std::uint64_t PipelineConfig::*>;

struct Field {
  const char* name;
  Member member;
};

#define GPRBTD_FIELD(name) Field{#name, &PipelineConfig::name}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      GPRBTD_FIELD(ground_search_depth),
      GPRBTD_FIELD(whiten_half_window),
      GPRBTD_FIELD(whiten_guard),
      GPRBTD_FIELD(whiten_eps),
      GPRBTD_FIELD(cube_t),
      GPRBTD_FIELD(cube_x),
      GPRBTD_FIELD(cube_y),
      GPRBTD_FIELD(f2_median_length),
      GPRBTD_FIELD(f2_depth_bin),
      GPRBTD_FIELD(f2_cfar1d_half),
      GPRBTD_FIELD(f2_cfar1d_guard),
      GPRBTD_FIELD(f2_cfar2d_half),
      GPRBTD_FIELD(f2_cfar2d_guard),
      GPRBTD_FIELD(f2_smooth_sigma),
      GPRBTD_FIELD(f2_threshold),
      GPRBTD_FIELD(cfar_eps),
      GPRBTD_FIELD(ccy_omega),
      GPRBTD_FIELD(ccy_gamma),
      GPRBTD_FIELD(ccy_max_arm),
      GPRBTD_FIELD(ccy_smooth_sigma),
      GPRBTD_FIELD(ccy_threshold),
      GPRBTD_FIELD(ccy_window),
      GPRBTD_FIELD(merge_proximity_m),
      GPRBTD_FIELD(merge_weight_f2),
      GPRBTD_FIELD(fit_rescale),
      GPRBTD_FIELD(halo_m),
      GPRBTD_FIELD(svm_tolerance),
      GPRBTD_FIELD(standardize_features),
      GPRBTD_FIELD(ehd_edge_threshold),
      GPRBTD_FIELD(ehd_depths),
      GPRBTD_FIELD(ehd_depth_stride),
      GPRBTD_FIELD(ehd_negatives_per_alarm),
      GPRBTD_FIELD(ehd_positive_quantile),
      GPRBTD_FIELD(ehd_prototypes),
      GPRBTD_FIELD(ehd_svm_gamma),
      GPRBTD_FIELD(ehd_svm_c),
      GPRBTD_FIELD(ehd_top_k),
      GPRBTD_FIELD(lg_rho_max),
      GPRBTD_FIELD(lg_sigma_rho),
      GPRBTD_FIELD(lg_sigma_theta_deg),
      GPRBTD_FIELD(lg_theta_offset_deg),
      GPRBTD_FIELD(lg_time),
      GPRBTD_FIELD(lg_width),
      GPRBTD_FIELD(lg_subsample),
      GPRBTD_FIELD(lg_top_rows),
      GPRBTD_FIELD(lg_top_k),
      GPRBTD_FIELD(lg_svm_gamma),
      GPRBTD_FIELD(lg_svm_c),
      GPRBTD_FIELD(hog_downsample),
      GPRBTD_FIELD(hog_size),
      GPRBTD_FIELD(hog_cell),
      GPRBTD_FIELD(hog_bins),
      GPRBTD_FIELD(hog_depth_stride),
      GPRBTD_FIELD(hog_top_k),
      GPRBTD_FIELD(hog_trees),
      GPRBTD_FIELD(hog_min_leaf),
      GPRBTD_FIELD(hog_positive_patches),
      GPRBTD_FIELD(hog_negative_patches),
      GPRBTD_FIELD(sed_edge_threshold),
      GPRBTD_FIELD(sed_scans),
      GPRBTD_FIELD(sed_above),
      GPRBTD_FIELD(sed_patch),
      GPRBTD_FIELD(sed_cells),
      GPRBTD_FIELD(sed_depths),
      GPRBTD_FIELD(sed_depth_stride),
      GPRBTD_FIELD(sed_offset_grid),
      GPRBTD_FIELD(sed_top_k),
      GPRBTD_FIELD(sed_train_maxima),
      GPRBTD_FIELD(sed_svm_gamma),
      GPRBTD_FIELD(sed_svm_c),
      GPRBTD_FIELD(msek_smooth),
      GPRBTD_FIELD(seed),
      GPRBTD_FIELD(platt_lane),
  };
  return table;
}

#undef GPRBTD_FIELD

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto r = std::from_chars(value.data(), value.data() + value.size(), out);
  if (r.ec != std::errc() || r.ptr != value.data() + value.size())
    throw ConfigError("config key '" + std::string(key) + "': cannot parse '" +
                      std::string(value) + "'");
  return out;
}

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigError(std::string("config key '") + key + "': " + what);
}

}  // namespace

std::vector<KeyValue> parse_key_values(std::string_view text) {
  std::vector<KeyValue> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    out.push_back({std::string(key), std::string(value), line_no});
    if (end == text.size()) break;
  }
  return out;
}

void set_config_value(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& f : fields()) {
    if (key != f.name) continue;
    std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(cfg.*member)>;
          if constexpr (std::is_same_v<T, bool>) {
            if (value == "true" || value == "1")
              cfg.*member = true;
            else if (value == "false" || value == "0")
              cfg.*member = false;
            else
              throw ConfigError("config key '" + std::string(key) + "': expected true/false");
          } else {
            cfg.*member = parse_number<T>(key, value);
          }
        },
        f.member);
    return;
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void validate_config(const PipelineConfig& c) {
  require(c.ground_search_depth >= 0, "ground_search_depth", "must be >= 0");
  require(c.whiten_half_window > c.whiten_guard && c.whiten_guard >= 0, "whiten_half_window",
          "need half_window > guard >= 0");
  require(c.whiten_eps > 0, "whiten_eps", "must be > 0");
  require(c.cube_t >= 0, "cube_t", "must be >= 0");
  require(c.cube_x >= 1 && c.cube_y >= 1, "cube_x", "cube spatial extent must be positive");
  require(c.f2_median_length >= 1, "f2_median_length", "must be >= 1");
  require(c.f2_depth_bin >= 1, "f2_depth_bin", "must be >= 1");
  require(c.f2_cfar1d_half > c.f2_cfar1d_guard && c.f2_cfar1d_guard >= 0, "f2_cfar1d_half",
          "need half > guard >= 0");
  require(c.f2_cfar2d_half > c.f2_cfar2d_guard && c.f2_cfar2d_guard >= 0, "f2_cfar2d_half",
          "need half > guard >= 0");
  require(c.f2_smooth_sigma >= 0, "f2_smooth_sigma", "must be >= 0");
  require(std::isfinite(c.f2_threshold), "f2_threshold", "must be finite");
  require(c.cfar_eps > 0, "cfar_eps", "must be > 0");
  require(c.ccy_omega >= 1, "ccy_omega", "must be >= 1");
  require(c.ccy_gamma > 0, "ccy_gamma", "must be > 0");
  require(c.ccy_max_arm >= 1, "ccy_max_arm", "must be >= 1");
  require(c.ccy_smooth_sigma >= 0, "ccy_smooth_sigma", "must be >= 0");
  require(std::isfinite(c.ccy_threshold), "ccy_threshold", "must be finite");
  require(c.ccy_window >= 1 && c.ccy_window % 2 == 1, "ccy_window", "must be odd and >= 1");
  require(c.merge_proximity_m >= 0, "merge_proximity_m", "must be >= 0");
  require(c.merge_weight_f2 >= 0 && c.merge_weight_f2 <= 1, "merge_weight_f2", "must be in [0,1]");
  require(c.halo_m > 0, "halo_m", "must be > 0");
  require(c.svm_tolerance > 0, "svm_tolerance", "must be > 0");
  require(c.ehd_depths >= 1 && c.ehd_depth_stride >= 1, "ehd_depths", "must be >= 1");
  require(c.ehd_negatives_per_alarm >= 1 && c.ehd_negatives_per_alarm <= c.ehd_depths,
          "ehd_negatives_per_alarm", "must be in [1, ehd_depths]");
  require(c.ehd_positive_quantile > 0 && c.ehd_positive_quantile <= 1, "ehd_positive_quantile",
          "must be in (0,1]");
  require(c.ehd_prototypes >= 1, "ehd_prototypes", "must be >= 1");
  require(c.ehd_svm_gamma >= 0 && c.ehd_svm_c > 0, "ehd_svm_c", "must be > 0");
  require(c.ehd_top_k >= 1, "ehd_top_k", "must be >= 1");
  require(c.lg_rho_max > 0 && c.lg_rho_max <= 0.5, "lg_rho_max", "must be in (0, 0.5]");
  require(c.lg_sigma_rho > 0 && c.lg_sigma_rho != 1.0, "lg_sigma_rho", "must be > 0 and != 1");
  require(c.lg_sigma_theta_deg > 0, "lg_sigma_theta_deg", "must be > 0");
  require(c.lg_time >= 16 && c.lg_time % 16 == 0, "lg_time", "must be a positive multiple of 16");
  require(c.lg_width >= 3, "lg_width", "must be >= 3");
  require(c.lg_subsample > 0 && c.lg_subsample <= 1, "lg_subsample", "must be in (0,1]");
  require(c.lg_top_rows >= 1 && c.lg_top_rows <= 15, "lg_top_rows", "must be in [1,15]");
  require(c.lg_top_k >= 1 && c.lg_top_k <= 15, "lg_top_k", "must be in [1,15]");
  require(c.lg_svm_gamma >= 0 && c.lg_svm_c > 0, "lg_svm_c", "must be > 0");
  require(c.hog_downsample >= 1, "hog_downsample", "must be >= 1");
  require(c.hog_cell >= 1 && c.hog_size >= c.hog_cell && c.hog_size % c.hog_cell == 0, "hog_size",
          "must be a multiple of hog_cell");
  require(c.hog_bins >= 1, "hog_bins", "must be >= 1");
  require(c.hog_depth_stride >= 1 && c.hog_top_k >= 1, "hog_depth_stride", "must be >= 1");
  require(c.hog_trees >= 1 && c.hog_min_leaf >= 1, "hog_trees", "must be >= 1");
  require(c.hog_positive_patches >= 1 && c.hog_negative_patches >= 1, "hog_negative_patches",
          "must be >= 1");
  require(c.sed_edge_threshold >= 0, "sed_edge_threshold", "must be >= 0");
  require(c.sed_scans >= 1 && c.sed_above >= 0, "sed_scans", "must be >= 1");
  require(c.sed_cells >= 1 && c.sed_patch >= c.sed_cells && c.sed_patch % c.sed_cells == 0,
          "sed_patch", "must be a multiple of sed_cells");
  require(c.sed_depths >= 1 && c.sed_depth_stride >= 1, "sed_depths", "must be >= 1");
  require(c.sed_offset_grid >= 1 && c.sed_offset_grid % 2 == 1, "sed_offset_grid",
          "must be odd and >= 1");
  require(c.sed_top_k >= 1, "sed_top_k", "must be >= 1");
  require(c.sed_train_maxima >= 1, "sed_train_maxima", "must be >= 1");
  require(c.sed_svm_gamma > 0 && c.sed_svm_c > 0, "sed_svm_gamma", "must be > 0");
  require(c.msek_smooth >= 1, "msek_smooth", "must be >= 1");
  require(c.platt_lane >= -1, "platt_lane", "must be >= -1");
}

PipelineConfig parse_config(std::string_view text, PipelineConfig base) {
  for (const auto& kv : parse_key_values(text)) set_config_value(base, kv.key, kv.value);
  validate_config(base);
  return base;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PipelineConfig load_config(const std::string& path, PipelineConfig base) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text, base);
}

std::string dump_config(const PipelineConfig& cfg) {
  std::string out;
  for (const auto& f : fields()) {
    out += f.name;
    out += " = ";
    std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(cfg.*member)>;
          if constexpr (std::is_same_v<T, bool>)
            out += (cfg.*member) ? "true" : "false";
          else if constexpr (std::is_same_v<T, double>) {
            char buf[64];
            out.append(buf, std::to_chars(buf, buf + sizeof(buf), cfg.*member).ptr);
          }
          else
            out += std::to_string(cfg.*member);
        },
        f.member);
    out += '\n';
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.emplace_back(f.name);
  return keys;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t config_hash(const PipelineConfig& cfg) { return fnv1a64(dump_config(cfg)); }

}  // namespace gprbtd
