#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gprbtd/config.hpp"
#include "gprbtd/discriminate.hpp"

namespace gprbtd {

// Options shared by the pipeline subcommands. Precedence: defaults, config
// file, GPRBTD_SEED, then --seed and --set overrides.
struct RunOptions {
  std::string config_path;
  std::vector<std::string> sets;  // "key=value"
  std::optional<std::uint64_t> seed;
  bool force = false;
  int jobs = 1;
};

PipelineConfig resolve_config(const RunOptions& opt);

struct ManifestEntry {
  std::string name;
  std::string hash;
};

struct RunManifest {
  std::string tool_version = GPRBTD_VERSION;
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<ManifestEntry> inputs;
  std::vector<ManifestEntry> outputs;
  std::vector<std::pair<std::string, double>> stages;  // wall-clock seconds

  // Hash of everything except the timings.
  std::string run_hash() const;
  std::string to_json() const;
};

RunManifest cmd_simulate(const std::string& spec_path, const std::string& out_dir, bool force);
RunManifest cmd_prescreen(const std::string& lanes_dir, const std::string& out_dir, const RunOptions& opt);
RunManifest cmd_extract(const std::string& lanes_dir, const std::string& alarms_dir, DiscKind kind,
                        const std::string& out_csv, const RunOptions& opt);
RunManifest cmd_train(const std::string& lanes_dir, const std::string& alarms_dir, DiscKind kind,
                      const std::string& model_path, const std::vector<std::string>& exclude,
                      const RunOptions& opt);
RunManifest cmd_score(const std::string& model_path, const std::string& lanes_dir,
                      const std::string& alarms_dir, const std::string& out_csv, const RunOptions& opt);

struct CrossValRequest {
  std::vector<DiscKind> kinds;
  bool fuse = false;
  double pd_min = 0.0;
};
// Parses "all" or a comma list of ehd, lg, gprhog, sed, fused.
CrossValRequest parse_disc_list(const std::string& list);

RunManifest cmd_crossval(const std::string& lanes_dir, const std::string& alarms_dir,
                         const CrossValRequest& req, const std::string& out_dir, const RunOptions& opt);
RunManifest cmd_fuse(const std::string& stats_csv, const std::string& out_csv, const RunOptions& opt);
RunManifest cmd_plot(const std::vector<std::string>& named_rocs, const std::string& out_svg,
                     double pd_min, bool force);

// Full command line. Exit codes: 0 success, 2 configuration, 3 data, 4 internal.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gprbtd
