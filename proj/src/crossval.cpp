#include "gprbtd/crossval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "gprbtd/random.hpp"

namespace gprbtd {

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr err;
  std::size_t err_index = n;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (i < err_index) {
            err_index = i;
            err = std::current_exception();
          }
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

std::vector<AlarmRecord> label_and_extract(const PreparedLane& lane, std::span<const Alarm> alarms,
                                           const FeatureContext& ctx, FeatureRequest req) {
  const Labeling lab = label_alarms(alarms, lane.truth, ctx.cfg.halo_m);
  std::vector<AlarmRecord> out;
  out.reserve(alarms.size());
  for (const auto& la : lab.alarms) {
    AlarmRecord r;
    r.alarm = la.alarm;
    r.threat = la.hit;
    if (la.hit) r.depth = lane.truth[la.threat].depth_category;
    r.features = extract_alarm_features(standard_cube(lane, la.alarm, ctx.cfg), ctx, req);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TrainingAlarm> training_alarms(std::span<const std::vector<AlarmRecord>> lanes,
                                           std::span<const std::size_t> lane_indices) {
  std::vector<TrainingAlarm> out;
  for (std::size_t i : lane_indices)
    for (const auto& r : lanes[i])
      out.push_back({r.alarm, &r.features, r.threat, r.depth.value_or(DepthCategory::standard)});
  return out;
}

std::uint64_t fold_seed(std::uint64_t seed, std::string_view test_lane) {
  return derive_seed(seed, fnv1a64(test_lane));
}

std::uint64_t kind_seed(std::uint64_t fold, DiscKind k) {
  return derive_seed(fold, 100 + static_cast<std::uint64_t>(k));
}

namespace {

FeatureRequest request_for(std::span<const DiscKind> kinds) {
  FeatureRequest r{false, false, false, false};
  for (auto k : kinds) {
    r.ehd |= k == DiscKind::EHD;
    r.lg |= k == DiscKind::LG;
    r.gprhog |= k == DiscKind::GPRHOG;
    r.sed |= k == DiscKind::SED;
  }
  return r;
}

void check_options(const CrossValOptions& opt) {
  if (opt.kinds.empty()) throw ConfigError("cross-validation needs at least one discriminator");
  if (opt.fuse)
    for (auto k : kAllDiscKinds)
      if (std::find(opt.kinds.begin(), opt.kinds.end(), k) == opt.kinds.end())
        throw ConfigError("fusion requires all four discriminators (missing " +
                          std::string(to_string(k)) + ")");
}

}  // namespace

CrossValResult cross_validate_records(std::span<const std::string> lane_ids,
                                      std::span<const std::vector<AlarmRecord>> records,
                                      const PipelineConfig& cfg, const CrossValOptions& opt) {
  check_options(opt);
  if (lane_ids.size() < 2) throw std::domain_error("cross-validation needs at least two lanes (cannot train)");
  if (records.size() != lane_ids.size()) throw std::domain_error("cross-validation: one record list per lane");
  for (std::size_t i = 0; i < lane_ids.size(); ++i)
    for (std::size_t j = i + 1; j < lane_ids.size(); ++j)
      if (lane_ids[i] == lane_ids[j]) throw DataError("duplicate lane id " + lane_ids[i]);

  CrossValResult res;
  res.folds.resize(lane_ids.size());
  parallel_for(lane_ids.size(), opt.jobs, [&](std::size_t f) {
    FoldResult& fold = res.folds[f];
    fold.test_lane = lane_ids[f];
    std::vector<std::size_t> train_idx;
    for (std::size_t i = 0; i < lane_ids.size(); ++i)
      if (i != f) train_idx.push_back(i);
    const auto train = training_alarms(records, train_idx);
    for (const auto& r : records[f]) {
      StatsRow row;
      row.lane_id = r.alarm.lane_id;
      row.x_m = r.alarm.x_m;
      row.y_m = r.alarm.y_m;
      row.is_threat = r.threat;
      row.depth = r.depth;
      fold.stats.push_back(std::move(row));
    }
    const std::uint64_t seed = fold_seed(cfg.seed, fold.test_lane);
    for (auto k : opt.kinds) {
      std::vector<TrainSet> sets;
      const Discriminator d = train_discriminator(k, train, cfg, kind_seed(seed, k), fold.test_lane, &sets);
      for (const auto& s : sets) {
        fold.train_rows += s.rows.size();
        for (const auto& p : s.provenance) fold.test_lane_rows += p.lane_id == fold.test_lane;
      }
      for (std::size_t i = 0; i < records[f].size(); ++i)
        fold.stats[i].stat[static_cast<int>(k)] = infer(d, records[f][i].features);
    }
  });
  for (const auto& fold : res.folds) res.rows.insert(res.rows.end(), fold.stats.begin(), fold.stats.end());

  if (opt.fuse) {
    res.platt_lane = choose_platt_lane(res.rows, cfg.platt_lane);
    res.platt = fit_platt_on_lane(res.rows, res.platt_lane);
    apply_fusion(res.rows, res.platt);
    for (auto& fold : res.folds) apply_fusion(fold.stats, res.platt);
    res.fused = true;
  }
  return res;
}

CrossValResult cross_validate(std::span<const PreparedLane> lanes,
                              std::span<const std::vector<Alarm>> alarms, const PipelineConfig& cfg,
                              const CrossValOptions& opt) {
  check_options(opt);
  if (lanes.size() < 2) throw std::domain_error("cross-validation needs at least two lanes (cannot train)");
  if (alarms.size() != lanes.size()) throw std::domain_error("cross-validation: one alarm list per lane");
  const FeatureContext ctx(cfg);
  const FeatureRequest req = request_for(opt.kinds);
  std::vector<std::vector<AlarmRecord>> records(lanes.size());
  std::vector<std::string> ids;
  for (const auto& l : lanes) ids.push_back(l.lane_id);
  parallel_for(lanes.size(), opt.jobs,
               [&](std::size_t i) { records[i] = label_and_extract(lanes[i], alarms[i], ctx, req); });
  return cross_validate_records(ids, records, cfg, opt);
}

std::string choose_platt_lane(std::span<const StatsRow> rows, int platt_lane) {
  std::map<std::string, std::pair<int, int>> counts;  // sorted lane ids
  for (const auto& r : rows) (r.is_threat ? counts[r.lane_id].first : counts[r.lane_id].second)++;
  if (platt_lane >= 0) {
    if (static_cast<std::size_t>(platt_lane) >= counts.size())
      throw ConfigError("platt_lane " + std::to_string(platt_lane) + " is out of range");
    auto it = std::next(counts.begin(), platt_lane);
    if (it->second.first == 0 || it->second.second == 0)
      throw DataError("Platt lane " + it->first + " lacks threat or non-threat alarms");
    return it->first;
  }
  for (const auto& [lane, c] : counts)
    if (c.first > 0 && c.second > 0) return lane;
  throw DataError("no lane holds both threat and non-threat alarms for Platt fitting");
}

std::array<PlattParams, 4> fit_platt_on_lane(std::span<const StatsRow> rows, const std::string& lane) {
  std::array<PlattParams, 4> out{};
  for (int k = 0; k < 4; ++k) {
    std::vector<double> s;
    std::vector<int> y;
    for (const auto& r : rows) {
      if (r.lane_id != lane) continue;
      if (!std::isfinite(r.stat[k])) throw std::domain_error("fusion: missing discriminator column");
      s.push_back(r.stat[k]);
      y.push_back(r.is_threat);
    }
    out[k] = platt_fit(s, y);
  }
  return out;
}

void apply_fusion(std::span<StatsRow> rows, const std::array<PlattParams, 4>& platt) {
  for (auto& r : rows) r.fused = fuse_statistics(r.stat, platt);
}

double row_stat(const StatsRow& r, int column) {
  if (column == kFusedColumn) return r.fused;
  if (column < 0 || column > 3) throw std::domain_error("unknown statistic column");
  return r.stat[column];
}

std::vector<Alarm> rows_as_alarms(std::span<const StatsRow> rows, int column) {
  std::vector<Alarm> out;
  out.reserve(rows.size());
  const AlarmSource src = column == kFusedColumn ? AlarmSource::FUSED_DISC
                                                 : alarm_source(static_cast<DiscKind>(column));
  for (const auto& r : rows) {
    const double s = row_stat(r, column);
    if (!std::isfinite(s)) throw std::domain_error("statistic column has missing values");
    out.push_back({r.lane_id, r.x_m, r.y_m, s, src});
  }
  return out;
}

RocCurve column_roc(std::span<const StatsRow> rows, std::span<const GroundTruthEntry> truth,
                    int column, double area_m2, double halo_m) {
  const auto alarms = rows_as_alarms(rows, column);
  const Labeling lab = label_alarms(alarms, truth, halo_m);
  return roc(lab.alarms, static_cast<int>(truth.size()), area_m2);
}

RocCurve column_stratified_roc(std::span<const StatsRow> rows,
                               std::span<const GroundTruthEntry> truth, int column,
                               DepthCategory stratum, double area_m2, double halo_m) {
  const auto alarms = rows_as_alarms(rows, column);
  const Labeling lab = label_alarms(alarms, truth, halo_m);
  return stratified_roc(lab.alarms, truth, stratum, area_m2);
}

}  // namespace gprbtd
