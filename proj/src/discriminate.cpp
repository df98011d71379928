#include "gprbtd/discriminate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <fstream>
#include <limits>
#include <set>

#include "gprbtd/random.hpp"
#include "gprbtd/serialize.hpp"

namespace gprbtd {

std::string_view to_string(DiscKind k) {
  switch (k) {
    case DiscKind::EHD: return "ehd";
    case DiscKind::LG: return "lg";
    case DiscKind::GPRHOG: return "gprhog";
    case DiscKind::SED: return "sed";
  }
  return "?";
}

DiscKind parse_disc_kind(std::string_view s) {
  for (auto k : kAllDiscKinds)
    if (s == to_string(k)) return k;
  throw ConfigError("unknown discriminator '" + std::string(s) + "' (expected ehd, lg, gprhog, sed)");
}

AlarmSource alarm_source(DiscKind k) {
  switch (k) {
    case DiscKind::EHD: return AlarmSource::EHD;
    case DiscKind::LG: return AlarmSource::LG;
    case DiscKind::GPRHOG: return AlarmSource::GPRHOG;
    case DiscKind::SED: return AlarmSource::SED;
  }
  return AlarmSource::FUSED_DISC;
}

// ---- aggregation ---------------------------------------------------------

double top_k_sum(std::span<const double> values, int k) {
  if (k < 1) throw std::domain_error("top_k_sum: k must be >= 1");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(k), v.size());
  std::partial_sort(v.begin(), v.begin() + n, v.end(), std::greater<>());
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += v[i];
  return s;
}

double PositiveShift::apply(double s) const {
  return std::max((s - lo) / (hi - lo) + 1.0, 1e-9);
}

double aggregate_ehd(std::span<const double> dt, std::span<const double> ct,
                     const PositiveShift& sdt, const PositiveShift& sct, int k) {
  if (dt.size() != ct.size()) throw std::domain_error("aggregate_ehd: depth count mismatch");
  std::vector<double> fused(dt.size());
  for (std::size_t i = 0; i < dt.size(); ++i) fused[i] = std::sqrt(sdt.apply(dt[i]) * sct.apply(ct[i]));
  return top_k_sum(fused, k);
}

double aggregate_lg(double c1, std::span<const double> row_stats, int k) {
  return c1 + top_k_sum(row_stats, k);
}

double aggregate_gprhog(std::span<const double> tx, std::span<const double> ty, int k) {
  return top_k_sum(tx, k) * top_k_sum(ty, k);
}

double aggregate_sed(std::span<const double> stats, int k) { return top_k_sum(stats, k); }

double fuse_statistics(std::span<const double> stats, std::span<const PlattParams> platt) {
  if (stats.empty() || stats.size() != platt.size())
    throw std::domain_error("fuse: one Platt model per discriminator column is required");
  double p = 1.0;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    if (!std::isfinite(stats[i])) throw std::domain_error("fuse: missing discriminator statistic");
    p *= platt_apply(platt[i], stats[i]);
  }
  return p;
}

std::vector<double> fuse_discriminators(std::span<const std::vector<double>> stats,
                                        std::span<const PlattParams> platt) {
  if (stats.empty() || stats.size() != platt.size())
    throw std::domain_error("fuse: one Platt model per discriminator column is required");
  const std::size_t n = stats[0].size();
  for (const auto& col : stats)
    if (col.size() != n) throw std::domain_error("fuse: discriminator columns differ in length");
  std::vector<double> out(n);
  std::vector<double> row(stats.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < stats.size(); ++c) row[c] = stats[c][i];
    out[i] = fuse_statistics(row, platt);
  }
  return out;
}

// ---- feature cache --------------------------------------------------------

FeatureRequest FeatureRequest::only(DiscKind k) {
  return {k == DiscKind::EHD, k == DiscKind::LG, k == DiscKind::GPRHOG, k == DiscKind::SED};
}

FeatureContext::FeatureContext(const PipelineConfig& c)
    : cfg(c), bank(build_log_gabor_bank(c.lg_time, (c.lg_width + 1) / 2, LogGaborParams::from(c))) {}

std::vector<int> evenly_spaced_starts(int axis_len, int n) {
  if (axis_len < 1 || n < 1) throw std::domain_error("evenly_spaced_starts: need positive sizes");
  std::vector<int> s(n);
  for (int k = 0; k < n; ++k)
    s[k] = static_cast<int>(static_cast<long long>(k) * axis_len / n);
  return s;
}

std::vector<int> regular_starts(int len, int size, int stride) {
  std::vector<int> s;
  for (int t = 0; t + size <= len; t += stride) s.push_back(t);
  if (s.empty()) s.push_back(0);
  return s;
}

namespace {

DataCube downsample_cube(const DataCube& cube, int factor) {
  const Array3& s = cube.samples;
  const int nt = (s.nt() + factor - 1) / factor;
  DataCube out{Array3(nt, s.nx(), s.ny()), cube.origin};
  for (int y = 0; y < s.ny(); ++y)
    for (int x = 0; x < s.nx(); ++x)
      for (int t = 0; t < nt; ++t) out.samples(t, x, y) = s(t * factor, x, y);
  return out;
}

}  // namespace

AlarmFeatures extract_alarm_features(const DataCube& cube, const FeatureContext& ctx,
                                     FeatureRequest req) {
  const PipelineConfig& c = ctx.cfg;
  const int cx = cube.samples.nx() / 2, cy = cube.samples.ny() / 2;
  AlarmFeatures f;
  if (req.ehd) {
    for (int k = 0; k < c.ehd_depths; ++k) {
      auto sub = crop_cube(cube, k * c.ehd_depth_stride, {kEhdRows, kEhdWidth, kEhdWidth});
      f.ehd_dt.push_back(ehd_feature(sub, EhdDirection::DT, c.ehd_edge_threshold));
      f.ehd_ct.push_back(ehd_feature(sub, EhdDirection::CT, c.ehd_edge_threshold));
    }
  }
  if (req.lg) {
    auto sub = crop_cube(cube, 0, {c.lg_time, c.lg_width, c.lg_width});
    f.lg_matrix = lg_feature_matrix(sub, ctx.bank);
  }
  if (req.gprhog) {
    const HogParams hp = HogParams::from(c);
    const DataCube ds = downsample_cube(cube, c.hog_downsample);
    const int nt = ds.samples.nt();
    f.hog_infer = regular_starts(nt, hp.size, c.hog_depth_stride);
    const int last = std::max(0, nt - hp.size);
    for (int d : msek_depths(ds.samples, cx, cy, c.msek_smooth, c.hog_positive_patches).depths)
      f.hog_positive.push_back(std::clamp(d - hp.size / 2, 0, last));
    f.hog_negative = evenly_spaced_starts(last + 1, c.hog_negative_patches);
    std::set<int> starts(f.hog_infer.begin(), f.hog_infer.end());
    starts.insert(f.hog_positive.begin(), f.hog_positive.end());
    starts.insert(f.hog_negative.begin(), f.hog_negative.end());
    for (int s : starts) f.hog.emplace(s, gprhog_feature(crop_cube(ds, s, {hp.size, hp.size, hp.size}), hp));
  }
  if (req.sed) {
    const SedParams sp = SedParams::from(c);
    const SedLabelVolume labels(cube.samples, sp.edge_threshold);
    const int r = c.sed_offset_grid / 2;
    for (int k = 0; k < c.sed_depths; ++k)
      for (int dx = -r; dx <= r; ++dx)
        for (int dy = -r; dy <= r; ++dy)
          f.sed_infer.push_back(labels.feature(cx + dx, cy + dy, k * c.sed_depth_stride, sp));
    for (int d : msek_depths(cube.samples, cx, cy, c.msek_smooth, c.sed_train_maxima).depths)
      f.sed_train.push_back(labels.feature(cx, cy, d - c.sed_above, sp));
  }
  return f;
}

// ---- training sets -------------------------------------------------------

void TrainSet::add(std::vector<double> values, int label, const Alarm& a, int t) {
  rows.push_back({std::move(values), label});
  provenance.push_back({a.lane_id, a.x_m, a.y_m, t});
}

std::size_t TrainSet::count(int label) const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [&](const LabeledFeature& r) { return r.label == label; }));
}

void audit_provenance(const TrainSet& set, std::string_view test_lane) {
  for (const auto& p : set.provenance)
    if (p.lane_id == test_lane)
      throw std::logic_error("training row sourced from held-out lane " + std::string(test_lane));
}

std::vector<std::size_t> quantile_select(std::span<const double> scores, double q) {
  if (scores.empty()) return {};
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t idx = std::min(sorted.size() - 1, static_cast<std::size_t>(std::floor(q * sorted.size())));
  const double cut = sorted[idx];
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i] < cut) keep.push_back(i);
  return keep;
}

namespace {

std::vector<double> concat(const FeatureVector& a, const FeatureVector& b) {
  std::vector<double> v(a.values);
  v.insert(v.end(), b.values.begin(), b.values.end());
  return v;
}

template <typename M>
void require_features(const TrainingAlarm& a, M AlarmFeatures::*field, const char* what) {
  if (!a.features || (a.features->*field).empty()) throw std::logic_error(std::string("training alarm lacks ") + what + " features");
}

}  // namespace

PrototypeSet ehd_prototypes(std::span<const TrainingAlarm> alarms, const PipelineConfig& cfg,
                            std::uint64_t seed) {
  std::vector<std::vector<double>> neg;
  for (const auto& a : alarms) {
    if (a.threat) continue;
    require_features(a, &AlarmFeatures::ehd_dt, "EHD");
    for (std::size_t k = 0; k < a.features->ehd_dt.size(); ++k)
      neg.push_back(concat(a.features->ehd_dt[k], a.features->ehd_ct[k]));
  }
  if (neg.empty()) throw DataError("EHD training: no non-threat alarms to summarize");
  const int k = std::min<int>(cfg.ehd_prototypes, static_cast<int>(neg.size()));
  return summarize_prototypes(neg, k, seed);
}

EhdTrainSets build_train_ehd(std::span<const TrainingAlarm> alarms, const PrototypeSet& protos,
                             const PipelineConfig& cfg, std::uint64_t seed) {
  EhdTrainSets out;
  struct Candidate {
    std::size_t alarm;
    int depth;
  };
  std::vector<Candidate> cand;
  std::vector<double> scores;
  for (std::size_t i = 0; i < alarms.size(); ++i) {
    const auto& a = alarms[i];
    if (!a.threat) continue;
    require_features(a, &AlarmFeatures::ehd_dt, "EHD");
    for (std::size_t k = 0; k < a.features->ehd_dt.size(); ++k) {
      cand.push_back({i, static_cast<int>(k)});
      scores.push_back(kde_score(concat(a.features->ehd_dt[k], a.features->ehd_ct[k]), protos));
    }
  }
  auto keep = quantile_select(scores, cfg.ehd_positive_quantile);
  if (keep.empty()) {
    // fall back to the lowest-scoring depth of each threat alarm
    for (std::size_t j = 0; j < cand.size();) {
      std::size_t best = j, e = j;
      for (; e < cand.size() && cand[e].alarm == cand[j].alarm; ++e)
        if (scores[e] < scores[best]) best = e;
      keep.push_back(best);
      j = e;
    }
  }
  for (std::size_t j : keep) {
    const auto& a = alarms[cand[j].alarm];
    const int d = cand[j].depth;
    out.dt.add(a.features->ehd_dt[d].values, 1, a.alarm, d * cfg.ehd_depth_stride);
    out.ct.add(a.features->ehd_ct[d].values, 1, a.alarm, d * cfg.ehd_depth_stride);
  }

  Rng rng(seed);
  for (const auto& a : alarms) {
    if (a.threat) continue;
    const int n = static_cast<int>(a.features->ehd_dt.size());
    std::vector<int> depth(n);
    std::iota(depth.begin(), depth.end(), 0);
    const int m = std::min(n, cfg.ehd_negatives_per_alarm);
    for (int k = 0; k < m; ++k) std::swap(depth[k], depth[k + static_cast<int>(rng.index(n - k))]);
    for (int k = 0; k < m; ++k) {
      out.dt.add(a.features->ehd_dt[depth[k]].values, 0, a.alarm, depth[k] * cfg.ehd_depth_stride);
      out.ct.add(a.features->ehd_ct[depth[k]].values, 0, a.alarm, depth[k] * cfg.ehd_depth_stride);
    }
  }
  return out;
}

std::vector<int> top_rows_by_norm(std::span<const std::array<double, kLgDim>> m, int n) {
  std::vector<double> norm(m.size());
  for (std::size_t r = 0; r < m.size(); ++r) {
    double s = 0.0;
    for (double v : m[r]) s += v * v;
    norm[r] = std::sqrt(s);
  }
  std::vector<int> idx(m.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return norm[a] > norm[b]; });
  idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(n)));
  return idx;
}

std::size_t subsample_count(std::size_t n, double fraction) {
  if (n == 0) return 0;
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))), 1, n);
}

namespace {

TrainSet subsample(const TrainSet& in, double fraction, std::uint64_t seed) {
  std::vector<std::size_t> idx(in.rows.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(idx));
  idx.resize(subsample_count(idx.size(), fraction));
  std::sort(idx.begin(), idx.end());
  TrainSet out;
  for (std::size_t i : idx) {
    out.rows.push_back(in.rows[i]);
    out.provenance.push_back(in.provenance[i]);
  }
  return out;
}

}  // namespace

LgTrainSets build_train_lg(std::span<const TrainingAlarm> alarms, const PipelineConfig& cfg,
                           std::uint64_t seed) {
  TrainSet max_rows, top_rows;
  const int bin_step = cfg.lg_time / 16;
  for (const auto& a : alarms) {
    require_features(a, &AlarmFeatures::lg_matrix, "LG");
    const int copies = a.threat && a.depth == DepthCategory::deep ? 2 : 1;
    const auto& m = a.features->lg_matrix;
    const auto mx = lg_feature(m);
    const auto top = top_rows_by_norm(m, cfg.lg_top_rows);
    for (int c = 0; c < copies; ++c) {
      max_rows.add(mx.values, a.threat, a.alarm, 0);
      for (int r : top) top_rows.add(std::vector<double>(m[r].begin(), m[r].end()), a.threat, a.alarm, r * bin_step);
    }
  }
  LgTrainSets out{subsample(max_rows, cfg.lg_subsample, derive_seed(seed, 11)),
                  subsample(top_rows, cfg.lg_subsample, derive_seed(seed, 12))};
  for (const TrainSet* s : {&out.max_rows, &out.top_rows})
    if (s->count(0) == 0 || s->count(1) == 0)
      throw DataError("LG training set lost a class after subsampling; use more lanes or raise lg_subsample");
  return out;
}

HogTrainSets build_train_gprhog(std::span<const TrainingAlarm> alarms, const PipelineConfig& cfg) {
  HogTrainSets out;
  const int step = cfg.hog_downsample;
  for (const auto& a : alarms) {
    require_features(a, &AlarmFeatures::hog, "gprHOG");
    const auto& starts = a.threat ? a.features->hog_positive : a.features->hog_negative;
    for (int s : starts) {
      const HogPair& h = a.features->hog.at(s);
      out.tx.add(h.tx.values, a.threat, a.alarm, s * step);
      out.ty.add(h.ty.values, a.threat, a.alarm, s * step);
    }
  }
  return out;
}

TrainSet build_train_sed(std::span<const TrainingAlarm> alarms, const PipelineConfig& cfg) {
  (void)cfg;
  TrainSet out;
  for (const auto& a : alarms) {
    require_features(a, &AlarmFeatures::sed_train, "SED");
    for (const auto& f : a.features->sed_train) out.add(f.values, a.threat, a.alarm, f.anchor[0]);
  }
  return out;
}

// ---- models --------------------------------------------------------------

namespace {

struct ScaledSvm {
  Standardizer s;
  SvmModel m;
};

ScaledSvm fit_svm(const TrainSet& set, double gamma, double C, const PipelineConfig& cfg,
                  const char* who) {
  if (set.count(0) == 0 || set.count(1) == 0)
    throw DataError(std::string(who) + " training needs threat and non-threat rows");
  ScaledSvm out;
  out.s = cfg.standardize_features ? Standardizer::fit(set.rows)
                                   : Standardizer::identity(set.rows[0].values.size());
  std::vector<LabeledFeature> rows;
  rows.reserve(set.rows.size());
  for (const auto& r : set.rows) rows.push_back({out.s.apply(r.values), r.label});
  const double g = gamma > 0 ? gamma : 1.0 / static_cast<double>(rows[0].values.size());
  out.m = svm_train(rows, g, C, cfg.svm_tolerance);
  return out;
}

double decide(const Standardizer& s, const SvmModel& m, std::span<const double> x) {
  return svm_decision(m, s.apply(x));
}

PositiveShift training_shift(const Standardizer& s, const SvmModel& m, const TrainSet& set) {
  PositiveShift p{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& r : set.rows) {
    const double v = decide(s, m, r.values);
    p.lo = std::min(p.lo, v);
    p.hi = std::max(p.hi, v);
  }
  if (!(p.hi > p.lo)) p.hi = p.lo + 1.0;
  return p;
}

template <typename M>
const M& model_of(const Discriminator& d, DiscKind k) {
  if (d.kind != k || !std::holds_alternative<M>(d.model))
    throw std::logic_error("discriminator is not trained for " + std::string(to_string(k)));
  return std::get<M>(d.model);
}

}  // namespace

Discriminator train_discriminator(DiscKind kind, std::span<const TrainingAlarm> alarms,
                                  const PipelineConfig& cfg, std::uint64_t seed,
                                  std::string_view test_lane, std::vector<TrainSet>* sets_out) {
  Discriminator d;
  d.kind = kind;
  d.cfg = cfg;
  std::vector<TrainSet> sets;
  auto audit = [&] {
    if (!test_lane.empty())
      for (const auto& s : sets) audit_provenance(s, test_lane);
  };
  for (const auto& a : alarms)
    if (!test_lane.empty() && a.alarm.lane_id == test_lane)
      throw std::logic_error("training alarm sourced from held-out lane " + std::string(test_lane));

  switch (kind) {
    case DiscKind::EHD: {
      EhdModel m;
      m.protos = ehd_prototypes(alarms, cfg, derive_seed(seed, 1));
      auto ts = build_train_ehd(alarms, m.protos, cfg, derive_seed(seed, 2));
      sets = {ts.dt, ts.ct};
      audit();
      auto a = fit_svm(ts.dt, cfg.ehd_svm_gamma, cfg.ehd_svm_c, cfg, "EHD");
      auto b = fit_svm(ts.ct, cfg.ehd_svm_gamma, cfg.ehd_svm_c, cfg, "EHD");
      m.sdt = a.s;
      m.dt = a.m;
      m.sct = b.s;
      m.ct = b.m;
      m.shift_dt = training_shift(m.sdt, m.dt, ts.dt);
      m.shift_ct = training_shift(m.sct, m.ct, ts.ct);
      d.model = std::move(m);
      break;
    }
    case DiscKind::LG: {
      auto ts = build_train_lg(alarms, cfg, derive_seed(seed, 3));
      sets = {ts.max_rows, ts.top_rows};
      audit();
      auto a = fit_svm(ts.max_rows, cfg.lg_svm_gamma, cfg.lg_svm_c, cfg, "LG");
      auto b = fit_svm(ts.top_rows, cfg.lg_svm_gamma, cfg.lg_svm_c, cfg, "LG");
      d.model = LgModel{a.s, b.s, a.m, b.m};
      break;
    }
    case DiscKind::GPRHOG: {
      auto ts = build_train_gprhog(alarms, cfg);
      sets = {ts.tx, ts.ty};
      audit();
      if (ts.tx.rows.empty()) throw DataError("gprHOG training: no patches");
      ForestParams fp;
      fp.n_trees = cfg.hog_trees;
      fp.min_leaf = cfg.hog_min_leaf;
      HogModel m;
      m.tx = forest_train(ts.tx.rows, fp, derive_seed(seed, 21));
      m.ty = forest_train(ts.ty.rows, fp, derive_seed(seed, 22));
      d.model = std::move(m);
      break;
    }
    case DiscKind::SED: {
      auto ts = build_train_sed(alarms, cfg);
      sets = {ts};
      audit();
      auto a = fit_svm(ts, cfg.sed_svm_gamma, cfg.sed_svm_c, cfg, "SED");
      d.model = SedModel{a.s, a.m};
      break;
    }
  }
  if (sets_out) *sets_out = std::move(sets);
  return d;
}

double infer_ehd(const Discriminator& d, const AlarmFeatures& f) {
  const auto& m = model_of<EhdModel>(d, DiscKind::EHD);
  if (f.ehd_dt.empty()) throw std::logic_error("infer_ehd: EHD features missing");
  std::vector<double> dt, ct;
  for (std::size_t k = 0; k < f.ehd_dt.size(); ++k) {
    dt.push_back(decide(m.sdt, m.dt, f.ehd_dt[k].values));
    ct.push_back(decide(m.sct, m.ct, f.ehd_ct[k].values));
  }
  return aggregate_ehd(dt, ct, m.shift_dt, m.shift_ct, d.cfg.ehd_top_k);
}

double infer_lg(const Discriminator& d, const AlarmFeatures& f) {
  const auto& m = model_of<LgModel>(d, DiscKind::LG);
  if (f.lg_matrix.empty()) throw std::logic_error("infer_lg: LG features missing");
  const double c1 = decide(m.s1, m.svm1, lg_feature(f.lg_matrix).values);
  std::vector<double> rows;
  for (const auto& r : f.lg_matrix) rows.push_back(decide(m.s2, m.svm2, r));
  return aggregate_lg(c1, rows, d.cfg.lg_top_k);
}

double infer_gprhog(const Discriminator& d, const AlarmFeatures& f) {
  const auto& m = model_of<HogModel>(d, DiscKind::GPRHOG);
  if (f.hog_infer.empty()) throw std::logic_error("infer_gprhog: gprHOG features missing");
  std::vector<double> tx, ty;
  for (int s : f.hog_infer) {
    const HogPair& h = f.hog.at(s);
    tx.push_back(forest_decision(m.tx, h.tx.values));
    ty.push_back(forest_decision(m.ty, h.ty.values));
  }
  return aggregate_gprhog(tx, ty, d.cfg.hog_top_k);
}

double infer_sed(const Discriminator& d, const AlarmFeatures& f) {
  const auto& m = model_of<SedModel>(d, DiscKind::SED);
  if (f.sed_infer.empty()) throw std::logic_error("infer_sed: SED features missing");
  std::vector<double> s;
  s.reserve(f.sed_infer.size());
  for (const auto& v : f.sed_infer) s.push_back(decide(m.s, m.svm, v.values));
  return aggregate_sed(s, d.cfg.sed_top_k);
}

double infer(const Discriminator& d, const AlarmFeatures& f) {
  if (!d.trained()) throw std::logic_error("discriminator is not trained");
  switch (d.kind) {
    case DiscKind::EHD: return infer_ehd(d, f);
    case DiscKind::LG: return infer_lg(d, f);
    case DiscKind::GPRHOG: return infer_gprhog(d, f);
    case DiscKind::SED: return infer_sed(d, f);
  }
  throw std::logic_error("infer: unknown discriminator");
}

// ---- persistence ---------------------------------------------------------

std::string serialize_discriminator(const Discriminator& d) {
  if (!d.trained()) throw std::logic_error("cannot save an untrained discriminator");
  BinaryWriter w(ModelKind::discriminator);
  w.u32(static_cast<std::uint32_t>(d.kind));
  w.str(dump_config(d.cfg));
  switch (d.kind) {
    case DiscKind::EHD: {
      const auto& m = std::get<EhdModel>(d.model);
      m.protos.save(w);
      m.sdt.save(w);
      m.sct.save(w);
      m.dt.save(w);
      m.ct.save(w);
      for (const auto* s : {&m.shift_dt, &m.shift_ct}) {
        w.f64(s->lo);
        w.f64(s->hi);
      }
      break;
    }
    case DiscKind::LG: {
      const auto& m = std::get<LgModel>(d.model);
      m.s1.save(w);
      m.s2.save(w);
      m.svm1.save(w);
      m.svm2.save(w);
      break;
    }
    case DiscKind::GPRHOG: {
      const auto& m = std::get<HogModel>(d.model);
      m.tx.save(w);
      m.ty.save(w);
      break;
    }
    case DiscKind::SED: {
      const auto& m = std::get<SedModel>(d.model);
      m.s.save(w);
      m.svm.save(w);
      break;
    }
  }
  return w.bytes();
}

Discriminator deserialize_discriminator(std::string bytes) {
  BinaryReader r(std::move(bytes));
  if (r.kind() != ModelKind::discriminator) throw DataError("model container: not a discriminator");
  Discriminator d;
  const std::uint32_t k = r.u32();
  if (k > 3) throw DataError("model container: unknown discriminator kind");
  d.kind = static_cast<DiscKind>(k);
  d.cfg = parse_config(r.str());
  switch (d.kind) {
    case DiscKind::EHD: {
      EhdModel m;
      m.protos = PrototypeSet::load(r);
      m.sdt = Standardizer::load(r);
      m.sct = Standardizer::load(r);
      m.dt = SvmModel::load(r);
      m.ct = SvmModel::load(r);
      for (auto* s : {&m.shift_dt, &m.shift_ct}) {
        s->lo = r.f64();
        s->hi = r.f64();
      }
      d.model = std::move(m);
      break;
    }
    case DiscKind::LG: {
      LgModel m;
      m.s1 = Standardizer::load(r);
      m.s2 = Standardizer::load(r);
      m.svm1 = SvmModel::load(r);
      m.svm2 = SvmModel::load(r);
      d.model = std::move(m);
      break;
    }
    case DiscKind::GPRHOG: {
      HogModel m;
      m.tx = ForestModel::load(r);
      m.ty = ForestModel::load(r);
      d.model = std::move(m);
      break;
    }
    case DiscKind::SED: {
      SedModel m;
      m.s = Standardizer::load(r);
      m.svm = SvmModel::load(r);
      d.model = std::move(m);
      break;
    }
  }
  if (!r.at_end()) throw DataError("model container: trailing bytes");
  return d;
}

void save_discriminator(const Discriminator& d, const std::string& path) {
  const std::string bytes = serialize_discriminator(d);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Discriminator load_discriminator(const std::string& path) {
  return deserialize_discriminator(read_text_file(path));
}

}  // namespace gprbtd
