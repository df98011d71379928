#include "gprbtd/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "gprbtd/crossval.hpp"
#include "gprbtd/io.hpp"
#include "gprbtd/pipeline.hpp"
#include "gprbtd/random.hpp"
#include "gprbtd/simulate.hpp"
#include "gprbtd/svg.hpp"

namespace gprbtd {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- options and manifest -------------------------------------------------

PipelineConfig resolve_config(const RunOptions& opt) {
  PipelineConfig cfg;
  if (!opt.config_path.empty()) cfg = load_config(opt.config_path);
  if (const char* env = std::getenv("GPRBTD_SEED"); env && *env) set_config_value(cfg, "seed", env);
  if (opt.seed) cfg.seed = *opt.seed;
  for (const auto& kv : opt.sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opt.jobs < 1) throw ConfigError("--jobs must be >= 1");
  validate_config(cfg);
  return cfg;
}

std::string RunManifest::run_hash() const {
  std::string s = tool_version + '\n' + command + '\n' + config_hash + '\n' + std::to_string(seed) + '\n';
  for (const auto& e : inputs) s += "in " + e.name + ' ' + e.hash + '\n';
  for (const auto& e : outputs) s += "out " + e.name + ' ' + e.hash + '\n';
  return hex64(fnv1a64(s));
}

std::string RunManifest::to_json() const {
  json j;
  j["tool_version"] = tool_version;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  auto entries = [](const std::vector<ManifestEntry>& v) {
    json a = json::array();
    for (const auto& e : v) a.push_back({{"path", e.name}, {"hash", e.hash}});
    return a;
  };
  j["inputs"] = entries(inputs);
  j["outputs"] = entries(outputs);
  json st = json::array();
  for (const auto& [name, sec] : stages) st.push_back({{"stage", name}, {"seconds", sec}});
  j["stages"] = st;
  j["run_hash"] = run_hash();
  return j.dump(2) + "\n";
}

namespace {

std::string hash_bytes(const std::string& bytes) { return hex64(fnv1a64(bytes)); }
std::string hash_file(const std::string& path) { return hash_bytes(read_file(path)); }

void prepare_out_dir(const std::string& dir, bool force) {
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir)) throw ConfigError("output path " + dir + " exists and is not a directory");
    if (!fs::is_empty(dir) && !force) throw ConfigError("output directory " + dir + " exists (use --force)");
  }
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir + ": " + ec.message());
}

void prepare_out_file(const std::string& path, bool force) {
  if (fs::exists(path) && !force) throw ConfigError("output file " + path + " exists (use --force)");
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

class Stopwatch {
 public:
  explicit Stopwatch(RunManifest& m) : m_(m), t0_(std::chrono::steady_clock::now()) {}
  void lap(const std::string& name) {
    const auto now = std::chrono::steady_clock::now();
    m_.stages.emplace_back(name, std::chrono::duration<double>(now - t0_).count());
    t0_ = now;
  }

 private:
  RunManifest& m_;
  std::chrono::steady_clock::time_point t0_;
};

// Output file written once and recorded in the manifest by file name.
void emit(RunManifest& m, const std::string& path, const std::string& contents) {
  write_file_atomic(path, contents);
  m.outputs.push_back({fs::path(path).filename().string(), hash_bytes(contents)});
}

void finish(RunManifest& m, const std::string& manifest_path) { write_file_atomic(manifest_path, m.to_json()); }

RunManifest start(const std::string& command, const PipelineConfig* cfg) {
  RunManifest m;
  m.command = command;
  if (cfg) {
    m.config_hash = hex64(config_hash(*cfg));
    m.seed = cfg->seed;
  }
  return m;
}

struct LoadedLanes {
  std::vector<LaneDataset> raw;
  std::vector<PreparedLane> prepared;
};

LoadedLanes load_lanes(const std::string& dir, const PipelineConfig& cfg, int jobs, RunManifest& m) {
  LoadedLanes out;
  const auto headers = list_lane_headers(dir);
  for (const auto& h : headers) {
    out.raw.push_back(read_lane(h));
    const VolumeFiles f = volume_files(dir, out.raw.back().lane_id);
    for (const auto& p : {f.header, f.samples, f.truth})
      m.inputs.push_back({fs::path(p).filename().string(), hash_file(p)});
  }
  out.prepared.resize(out.raw.size(), PreparedLane{"", out.raw[0].volume, out.raw[0].volume, {}, 0.0, false});
  parallel_for(out.raw.size(), jobs, [&](std::size_t i) { out.prepared[i] = prepare_lane(out.raw[i], cfg); });
  return out;
}

std::string alarm_file(const std::string& dir, const std::string& lane, const char* tag) {
  return (fs::path(dir) / (lane + "_" + tag + ".csv")).string();
}

std::vector<std::vector<Alarm>> load_fused_alarms(const std::string& dir, std::span<const PreparedLane> lanes,
                                                  RunManifest& m) {
  std::vector<std::vector<Alarm>> out;
  for (const auto& l : lanes) {
    const std::string path = alarm_file(dir, l.lane_id, "fused");
    const std::string text = read_file(path);
    m.inputs.push_back({fs::path(path).filename().string(), hash_bytes(text)});
    auto alarms = parse_alarms_csv(text);
    for (const auto& a : alarms)
      if (a.lane_id != l.lane_id) throw DataError(path + ": alarm from lane " + a.lane_id);
    out.push_back(std::move(alarms));
  }
  return out;
}

std::string column_name(int column) {
  return column == kFusedColumn ? "fused" : std::string(to_string(static_cast<DiscKind>(column)));
}

json summary_json(const RocSummary& s) {
  return {{"auc", s.auc}, {"max_pd", s.max_pd}, {"n_threats", s.n_threats}, {"n_false", s.n_false}, {"area_m2", s.area_m2}};
}

}  // namespace

// ---- subcommands -----------------------------------------------------------

RunManifest cmd_simulate(const std::string& spec_path, const std::string& out_dir, bool force) {
  const SimSpec spec = load_sim_spec(spec_path);
  prepare_out_dir(out_dir, force);
  RunManifest m = start("simulate", nullptr);
  m.seed = spec.seed;
  m.config_hash = hex64(fnv1a64(dump_sim_spec(spec)));
  m.inputs.push_back({fs::path(spec_path).filename().string(), hash_file(spec_path)});
  Stopwatch sw(m);
  std::vector<SimLane> lanes;
  for (int i = 0; i < spec.lanes; ++i) lanes.push_back(synth_lane(spec, i));
  sw.lap("render");
  for (const auto& l : lanes) {
    const VolumeFiles f = write_lane(out_dir, l.lane);
    for (const auto& p : {f.header, f.samples, f.truth})
      m.outputs.push_back({fs::path(p).filename().string(), hash_file(p)});
  }
  sw.lap("write");
  finish(m, (fs::path(out_dir) / "manifest.json").string());
  return m;
}

RunManifest cmd_prescreen(const std::string& lanes_dir, const std::string& out_dir, const RunOptions& opt) {
  const PipelineConfig cfg = resolve_config(opt);
  prepare_out_dir(out_dir, opt.force);
  RunManifest m = start("prescreen", &cfg);
  Stopwatch sw(m);
  const LoadedLanes lanes = load_lanes(lanes_dir, cfg, opt.jobs, m);
  sw.lap("preprocess");
  const PrescreenResult r = prescreen_lanes(lanes.prepared, cfg);
  sw.lap("prescreen");
  for (std::size_t i = 0; i < lanes.prepared.size(); ++i) {
    const std::string& id = lanes.prepared[i].lane_id;
    emit(m, alarm_file(out_dir, id, "f2"), alarms_csv(r.f2[i]));
    emit(m, alarm_file(out_dir, id, "ccy"), alarms_csv(r.ccy[i]));
    emit(m, alarm_file(out_dir, id, "fused"), alarms_csv(r.fused[i]));
  }
  json rs = {{"a", r.rescale.params.a}, {"b", r.rescale.params.b}, {"c", r.rescale.params.c},
             {"auc", r.rescale.auc}, {"degenerate", r.rescale.degenerate}};
  emit(m, (fs::path(out_dir) / "rescale.json").string(), rs.dump(2) + "\n");
  emit(m, (fs::path(out_dir) / "config.txt").string(), dump_config(cfg));
  sw.lap("write");
  finish(m, (fs::path(out_dir) / "manifest.json").string());
  return m;
}

RunManifest cmd_extract(const std::string& lanes_dir, const std::string& alarms_dir, DiscKind kind,
                        const std::string& out_csv, const RunOptions& opt) {
  const PipelineConfig cfg = resolve_config(opt);
  prepare_out_file(out_csv, opt.force);
  RunManifest m = start("extract", &cfg);
  Stopwatch sw(m);
  const LoadedLanes lanes = load_lanes(lanes_dir, cfg, opt.jobs, m);
  const auto alarms = load_fused_alarms(alarms_dir, lanes.prepared, m);
  const FeatureContext ctx(cfg);
  std::vector<std::vector<AlarmRecord>> records(lanes.prepared.size());
  parallel_for(records.size(), opt.jobs, [&](std::size_t i) {
    records[i] = label_and_extract(lanes.prepared[i], alarms[i], ctx, FeatureRequest::only(kind));
  });
  sw.lap("extract");
  std::vector<FeatureRow> rows;
  for (std::size_t li = 0; li < records.size(); ++li) {
    const GprVolume& vol = lanes.prepared[li].processed;
    for (const auto& r : records[li]) {
      auto row = [&](FeatureKind fk, int t, const std::vector<double>& v, double x = NAN, double y = NAN) {
        rows.push_back({r.alarm.lane_id, std::isnan(x) ? r.alarm.x_m : x, std::isnan(y) ? r.alarm.y_m : y, t, fk,
                        r.threat ? 1 : 0, v});
      };
      const auto& f = r.features;
      switch (kind) {
        case DiscKind::EHD:
          for (std::size_t k = 0; k < f.ehd_dt.size(); ++k) {
            row(FeatureKind::EHD_DT, static_cast<int>(k) * cfg.ehd_depth_stride, f.ehd_dt[k].values);
            row(FeatureKind::EHD_CT, static_cast<int>(k) * cfg.ehd_depth_stride, f.ehd_ct[k].values);
          }
          break;
        case DiscKind::LG: row(FeatureKind::LG, 0, lg_feature(f.lg_matrix).values); break;
        case DiscKind::GPRHOG:
          for (int s : f.hog_infer) {
            row(FeatureKind::HOG_TX, s * cfg.hog_downsample, f.hog.at(s).tx.values);
            row(FeatureKind::HOG_TY, s * cfg.hog_downsample, f.hog.at(s).ty.values);
          }
          break;
        case DiscKind::SED: {
          const int g = cfg.sed_offset_grid, rad = g / 2;
          const int cx = vol.nearest_x(r.alarm.x_m), cy = vol.nearest_y(r.alarm.y_m);
          for (std::size_t i = 0; i < f.sed_infer.size(); ++i) {
            const int k = static_cast<int>(i) / (g * g), dx = static_cast<int>(i) / g % g - rad,
                      dy = static_cast<int>(i) % g - rad;
            row(FeatureKind::SED, k * cfg.sed_depth_stride, f.sed_infer[i].values, (cx + dx) * vol.dx(),
                (cy + dy) * vol.dy());
          }
          break;
        }
      }
    }
  }
  emit(m, out_csv, features_csv(rows));
  sw.lap("write");
  finish(m, out_csv + ".manifest.json");
  return m;
}

RunManifest cmd_train(const std::string& lanes_dir, const std::string& alarms_dir, DiscKind kind,
                      const std::string& model_path, const std::vector<std::string>& exclude,
                      const RunOptions& opt) {
  const PipelineConfig cfg = resolve_config(opt);
  prepare_out_file(model_path, opt.force);
  RunManifest m = start("train", &cfg);
  Stopwatch sw(m);
  const LoadedLanes lanes = load_lanes(lanes_dir, cfg, opt.jobs, m);
  const auto alarms = load_fused_alarms(alarms_dir, lanes.prepared, m);
  const FeatureContext ctx(cfg);
  std::vector<std::vector<AlarmRecord>> records(lanes.prepared.size());
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < lanes.prepared.size(); ++i)
    if (std::find(exclude.begin(), exclude.end(), lanes.prepared[i].lane_id) == exclude.end()) keep.push_back(i);
  if (keep.empty()) throw DataError("train: every lane is excluded");
  parallel_for(keep.size(), opt.jobs, [&](std::size_t j) {
    const std::size_t i = keep[j];
    records[i] = label_and_extract(lanes.prepared[i], alarms[i], ctx, FeatureRequest::only(kind));
  });
  sw.lap("extract");
  const auto train = training_alarms(records, keep);
  const Discriminator d = train_discriminator(kind, train, cfg, derive_seed(cfg.seed, 100 + static_cast<int>(kind)));
  sw.lap("train");
  emit(m, model_path, serialize_discriminator(d));
  finish(m, model_path + ".manifest.json");
  return m;
}

RunManifest cmd_score(const std::string& model_path, const std::string& lanes_dir,
                      const std::string& alarms_dir, const std::string& out_csv, const RunOptions& opt) {
  const Discriminator d = load_discriminator(model_path);
  PipelineConfig cfg = d.cfg;
  prepare_out_file(out_csv, opt.force);
  RunManifest m = start("score", &cfg);
  m.inputs.push_back({fs::path(model_path).filename().string(), hash_file(model_path)});
  Stopwatch sw(m);
  const LoadedLanes lanes = load_lanes(lanes_dir, cfg, opt.jobs, m);
  const auto alarms = load_fused_alarms(alarms_dir, lanes.prepared, m);
  const FeatureContext ctx(cfg);
  std::vector<std::vector<Alarm>> scored(lanes.prepared.size());
  parallel_for(scored.size(), opt.jobs, [&](std::size_t i) {
    for (const auto& a : alarms[i]) {
      const auto f = extract_alarm_features(standard_cube(lanes.prepared[i], a, cfg), ctx, FeatureRequest::only(d.kind));
      scored[i].push_back({a.lane_id, a.x_m, a.y_m, infer(d, f), alarm_source(d.kind)});
    }
  });
  sw.lap("score");
  std::vector<Alarm> all;
  for (auto& v : scored) all.insert(all.end(), v.begin(), v.end());
  emit(m, out_csv, alarms_csv(all));
  finish(m, out_csv + ".manifest.json");
  return m;
}

CrossValRequest parse_disc_list(const std::string& list) {
  CrossValRequest r;
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item == "all") {
      r.kinds.assign(kAllDiscKinds.begin(), kAllDiscKinds.end());
      r.fuse = true;
    } else if (item == "fused") {
      r.fuse = true;
    } else {
      const DiscKind k = parse_disc_kind(item);
      if (std::find(r.kinds.begin(), r.kinds.end(), k) == r.kinds.end()) r.kinds.push_back(k);
    }
  }
  std::sort(r.kinds.begin(), r.kinds.end());
  if (r.kinds.empty()) throw ConfigError("no discriminator requested");
  return r;
}

RunManifest cmd_crossval(const std::string& lanes_dir, const std::string& alarms_dir,
                         const CrossValRequest& req, const std::string& out_dir, const RunOptions& opt) {
  const PipelineConfig cfg = resolve_config(opt);
  if (req.fuse && req.kinds.size() != kAllDiscKinds.size())
    throw ConfigError("fusion requires all four discriminators");
  prepare_out_dir(out_dir, opt.force);
  RunManifest m = start("crossval", &cfg);
  Stopwatch sw(m);
  const LoadedLanes lanes = load_lanes(lanes_dir, cfg, opt.jobs, m);
  const auto alarms = load_fused_alarms(alarms_dir, lanes.prepared, m);
  sw.lap("load");
  const CrossValResult res = cross_validate(lanes.prepared, alarms, cfg, {req.kinds, req.fuse, opt.jobs});
  sw.lap("crossval");

  std::vector<GroundTruthEntry> truth;
  double area = 0.0;
  for (const auto& l : lanes.prepared) {
    truth.insert(truth.end(), l.truth.begin(), l.truth.end());
    area += l.area_m2;
  }
  const fs::path out(out_dir);
  emit(m, (out / "stats.csv").string(), stats_csv(res.rows));
  std::vector<int> columns;
  for (auto k : req.kinds) columns.push_back(static_cast<int>(k));
  if (req.fuse) columns.push_back(kFusedColumn);

  json summary = json::object();
  std::vector<NamedCurve> curves;
  for (int c : columns) {
    const std::string name = column_name(c);
    const auto labeled = label_alarms(rows_as_alarms(res.rows, c), truth, cfg.halo_m);
    const RocCurve curve = roc(labeled.alarms, static_cast<int>(truth.size()), area);
    emit(m, (out / ("roc_" + name + ".csv")).string(), roc_csv(curve));
    json entry = {{"all", summary_json(summarize_roc(curve, labeled.alarms))}};
    for (auto stratum : {DepthCategory::standard, DepthCategory::deep}) {
      const std::string sname(to_string(stratum));
      if (std::none_of(truth.begin(), truth.end(), [&](const GroundTruthEntry& g) { return g.depth_category == stratum; })) {
        entry[sname] = nullptr;
        continue;
      }
      const RocCurve sc = stratified_roc(labeled.alarms, truth, stratum, area);
      emit(m, (out / ("roc_" + name + "_" + sname + ".csv")).string(), roc_csv(sc));
      entry[sname] = summary_json(summarize_roc(sc, labeled.alarms));
    }
    summary[name] = entry;
    curves.push_back({name, curve});
  }
  if (res.fused) {
    json platt = json::object();
    for (auto k : kAllDiscKinds)
      platt[std::string(to_string(k))] = {{"A", res.platt[static_cast<int>(k)].A}, {"B", res.platt[static_cast<int>(k)].B}};
    summary["platt"] = {{"lane", res.platt_lane}, {"params", platt}};
  }
  emit(m, (out / "summary.json").string(), summary.dump(2) + "\n");
  PlotOptions po;
  po.pd_min = req.pd_min;
  po.title = "Cross-validated ROC";
  emit(m, (out / "roc.svg").string(), roc_svg(curves, po));
  sw.lap("score");
  finish(m, (out / "manifest.json").string());
  return m;
}

RunManifest cmd_fuse(const std::string& stats_path, const std::string& out_csv, const RunOptions& opt) {
  const PipelineConfig cfg = resolve_config(opt);
  prepare_out_file(out_csv, opt.force);
  RunManifest m = start("fuse", &cfg);
  const std::string text = read_file(stats_path);
  m.inputs.push_back({fs::path(stats_path).filename().string(), hash_bytes(text)});
  auto rows = parse_stats_csv(text);
  const std::string lane = choose_platt_lane(rows, cfg.platt_lane);
  const auto platt = fit_platt_on_lane(rows, lane);
  apply_fusion(rows, platt);
  emit(m, out_csv, stats_csv(rows));
  finish(m, out_csv + ".manifest.json");
  return m;
}

RunManifest cmd_plot(const std::vector<std::string>& named_rocs, const std::string& out_svg, double pd_min,
                     bool force) {
  prepare_out_file(out_svg, force);
  RunManifest m = start("plot", nullptr);
  std::vector<NamedCurve> curves;
  for (const auto& nr : named_rocs) {
    auto eq = nr.find('=');
    const std::string path = eq == std::string::npos ? nr : nr.substr(eq + 1);
    const std::string name = eq == std::string::npos ? fs::path(nr).stem().string() : nr.substr(0, eq);
    const std::string text = read_file(path);
    m.inputs.push_back({fs::path(path).filename().string(), hash_bytes(text)});
    curves.push_back({name, parse_roc_csv(text)});
  }
  PlotOptions po;
  po.pd_min = pd_min;
  emit(m, out_svg, roc_svg(curves, po));
  finish(m, out_svg + ".manifest.json");
  return m;
}

// ---- command line ------------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stage GPR buried-threat detection pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", GPRBTD_VERSION);

  RunOptions ro;
  std::uint64_t seed = 0;
  auto common = [&](CLI::App* c) {
    c->add_option("--config", ro.config_path, "key = value config file")->check(CLI::ExistingFile);
    c->add_option("--set", ro.sets, "override one config key (key=value), repeatable");
    c->add_option("--seed", seed, "override the config seed");
    c->add_flag("--force", ro.force, "overwrite existing outputs");
    c->add_option("--jobs", ro.jobs, "worker threads")->check(CLI::PositiveNumber);
  };

  std::string spec, lanes, alarms, out_path, disc = "all", model, stats;
  std::vector<std::string> exclude, rocs;
  double pd_min = 0.0;
  bool dump = false;

  auto* sim = app.add_subcommand("simulate", "render synthetic lanes from a spec file");
  sim->add_option("--spec", spec, "simulation spec")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out_path, "output directory")->required();
  sim->add_flag("--force", ro.force, "overwrite an existing directory");

  auto* pre = app.add_subcommand("prescreen", "F2, CCY and fused alarm lists per lane");
  pre->add_option("--lanes", lanes, "lane directory")->required()->check(CLI::ExistingDirectory);
  pre->add_option("--out", out_path, "output directory")->required();
  common(pre);

  auto* ext = app.add_subcommand("extract", "feature vectors at every fused alarm");
  ext->add_option("--lanes", lanes)->required()->check(CLI::ExistingDirectory);
  ext->add_option("--alarms", alarms, "prescreen output directory")->required()->check(CLI::ExistingDirectory);
  ext->add_option("--disc", disc, "ehd | lg | gprhog | sed")->required();
  ext->add_option("--out", out_path, "features CSV")->required();
  common(ext);

  auto* trn = app.add_subcommand("train", "train one discriminator on the fused alarms");
  trn->add_option("--lanes", lanes)->required()->check(CLI::ExistingDirectory);
  trn->add_option("--alarms", alarms)->required()->check(CLI::ExistingDirectory);
  trn->add_option("--disc", disc, "ehd | lg | gprhog | sed")->required();
  trn->add_option("--exclude", exclude, "lane ids held out of training");
  trn->add_option("--out", out_path, "model file")->required();
  common(trn);

  auto* scr = app.add_subcommand("score", "apply a trained discriminator to fused alarms");
  scr->add_option("--model", model)->required()->check(CLI::ExistingFile);
  scr->add_option("--lanes", lanes)->required()->check(CLI::ExistingDirectory);
  scr->add_option("--alarms", alarms)->required()->check(CLI::ExistingDirectory);
  scr->add_option("--out", out_path, "scored alarm CSV")->required();
  scr->add_flag("--force", ro.force);
  scr->add_option("--jobs", ro.jobs)->check(CLI::PositiveNumber);

  auto* cv = app.add_subcommand("crossval", "lane-based cross-validation and scoring");
  cv->add_option("--lanes", lanes)->required()->check(CLI::ExistingDirectory);
  cv->add_option("--alarms", alarms)->required()->check(CLI::ExistingDirectory);
  cv->add_option("--disc", disc, "all or a comma list of ehd, lg, gprhog, sed, fused");
  cv->add_option("--pd-min", pd_min, "lower bound of the plotted Pd axis");
  cv->add_option("--out", out_path, "output directory")->required();
  common(cv);

  auto* fus = app.add_subcommand("fuse", "Platt-product fusion of a statistics table");
  fus->add_option("--stats", stats)->required()->check(CLI::ExistingFile);
  fus->add_option("--out", out_path)->required();
  common(fus);

  auto* plt = app.add_subcommand("plot", "SVG plot of ROC CSV files");
  plt->add_option("--roc", rocs, "name=path, repeatable")->required();
  plt->add_option("--pd-min", pd_min);
  plt->add_option("--out", out_path)->required();
  plt->add_flag("--force", ro.force);

  auto* cfgc = app.add_subcommand("config", "print or check configuration");
  cfgc->add_flag("--dump", dump, "print every key with its effective value");
  cfgc->add_option("--config", ro.config_path)->check(CLI::ExistingFile);
  cfgc->add_option("--set", ro.sets);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << GPRBTD_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    for (auto* c : {pre, ext, trn, cv, fus})
      if (c->parsed() && c->count("--seed")) ro.seed = seed;
    RunManifest m;
    if (sim->parsed()) {
      m = cmd_simulate(spec, out_path, ro.force);
    } else if (pre->parsed()) {
      m = cmd_prescreen(lanes, out_path, ro);
    } else if (ext->parsed()) {
      m = cmd_extract(lanes, alarms, parse_disc_kind(disc), out_path, ro);
    } else if (trn->parsed()) {
      m = cmd_train(lanes, alarms, parse_disc_kind(disc), out_path, exclude, ro);
    } else if (scr->parsed()) {
      m = cmd_score(model, lanes, alarms, out_path, ro);
    } else if (cv->parsed()) {
      CrossValRequest req = parse_disc_list(disc);
      req.pd_min = pd_min;
      m = cmd_crossval(lanes, alarms, req, out_path, ro);
    } else if (fus->parsed()) {
      m = cmd_fuse(stats, out_path, ro);
    } else if (plt->parsed()) {
      m = cmd_plot(rocs, out_path, pd_min, ro.force);
    } else if (cfgc->parsed()) {
      const PipelineConfig cfg = resolve_config(ro);
      if (dump) out << dump_config(cfg);
      else out << "config ok, hash " << hex64(config_hash(cfg)) << '\n';
      return 0;
    }
    out << m.command << ": " << m.outputs.size() << " outputs, run hash " << m.run_hash() << '\n';
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return 3;
  } catch (const std::domain_error& e) {
    err << "data error: " << e.what() << '\n';
    return 3;
  } catch (const std::logic_error& e) {
    err << "internal error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 4;
  }
}

}  // namespace gprbtd
