#include "gprbtd/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gprbtd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    auto next = line.find(sep, pos);
    out.emplace_back(line.substr(pos, next == std::string_view::npos ? next : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

// Non-empty lines with '\r' stripped.
std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(std::move(line));
  }
  return out;
}

std::vector<std::vector<std::string>> parse_table(const std::string& text, std::string_view header,
                                                  const char* what, bool prefix_header = false) {
  auto lines = lines_of(text);
  if (lines.empty()) throw DataError(std::string(what) + " CSV: empty file");
  const bool ok = prefix_header ? lines[0].rfind(header, 0) == 0 : lines[0] == header;
  if (!ok) throw DataError(std::string(what) + " CSV: expected header '" + std::string(header) + "'");
  const std::size_t cols = split(lines[0]).size();
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto cells = split(lines[i]);
    if (cells.size() != cols)
      throw DataError(std::string(what) + " CSV line " + std::to_string(i + 1) + ": expected " +
                      std::to_string(cols) + " fields");
    rows.push_back(std::move(cells));
  }
  return rows;
}

double parse_real(const std::string& s, const char* what) {
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw DataError(std::string(what) + ": cannot parse number '" + s + "'");
  return v;
}

template <typename F>
auto as_data_error(F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw DataError(e.what());
  }
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string read_file(const std::string& path) { return read_text_file(path); }

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw DataError("short write to " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw DataError("cannot rename " + tmp + ": " + ec.message());
}

// ---- volume container ----------------------------------------------------

VolumeFiles volume_files(const std::string& dir, const std::string& lane_id) {
  const fs::path d(dir);
  return {(d / (lane_id + ".json")).string(), (d / (lane_id + ".f32")).string(),
          (d / (lane_id + "_truth.csv")).string()};
}

VolumeFiles write_lane(const std::string& dir, const LaneDataset& lane) {
  const VolumeFiles f = volume_files(dir, lane.lane_id);
  const GprVolume& v = lane.volume;
  std::string bytes(v.samples().size() * 4, '\0');
  std::size_t i = 0;
  for (double s : v.samples().data()) {
    const auto u = std::bit_cast<std::uint32_t>(static_cast<float>(s));
    for (int b = 0; b < 4; ++b) bytes[i++] = static_cast<char>((u >> (8 * b)) & 0xff);
  }
  write_file_atomic(f.samples, bytes);
  write_file_atomic(f.truth, truth_csv(lane.truth));
  json h = {{"format", "gprbtd-volume"},
            {"version", 1},
            {"lane_id", lane.lane_id},
            {"nt", v.nt()},
            {"nx", v.nx()},
            {"ny", v.ny()},
            {"dt", v.dt()},
            {"dx", v.dx()},
            {"dy", v.dy()},
            {"ground_index", v.ground_index() ? json(*v.ground_index()) : json(nullptr)},
            {"area_m2", lane.area_m2},
            {"dtype", "float32le"},
            {"order", "t,x,y"},
            {"samples", fs::path(f.samples).filename().string()},
            {"truth", fs::path(f.truth).filename().string()}};
  write_file_atomic(f.header, h.dump(2) + "\n");
  return f;
}

LaneDataset read_lane(const std::string& header_path) {
  json h;
  try {
    h = json::parse(read_file(header_path));
  } catch (const json::exception& e) {
    throw DataError(header_path + ": " + e.what());
  }
  try {
    if (h.at("format") != "gprbtd-volume" || h.at("version") != 1)
      throw DataError(header_path + ": not a version 1 volume container");
    const fs::path dir = fs::path(header_path).parent_path();
    const int nt = h.at("nt"), nx = h.at("nx"), ny = h.at("ny");
    if (nt < 1 || nx < 1 || ny < 1) throw DataError(header_path + ": dimensions must be positive");
    const std::string bytes = read_file((dir / h.at("samples").get<std::string>()).string());
    Array3 a(nt, nx, ny);
    if (bytes.size() != a.size() * 4) throw DataError(header_path + ": sample file size mismatch");
    std::size_t i = 0;
    for (double& s : a.data()) {
      std::uint32_t u = 0;
      for (int b = 0; b < 4; ++b) u |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i++])) << (8 * b);
      s = std::bit_cast<float>(u);
      if (!std::isfinite(s)) throw DataError(header_path + ": non-finite sample");
    }
    std::optional<int> g;
    if (!h.at("ground_index").is_null()) g = h.at("ground_index").get<int>();
    GprVolume vol(std::move(a), h.at("dt"), h.at("dx"), h.at("dy"), g);
    auto truth = parse_truth_csv(read_file((dir / h.at("truth").get<std::string>()).string()));
    LaneDataset lane{h.at("lane_id"), std::move(vol), std::move(truth), h.at("area_m2")};
    validate_lane_dataset(lane);
    return lane;
  } catch (const json::exception& e) {
    throw DataError(header_path + ": " + e.what());
  } catch (const std::domain_error& e) {
    throw DataError(header_path + ": " + e.what());
  }
}

std::vector<std::string> list_lane_headers(const std::string& dir) {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    const auto p = e.path();
    const std::string name = p.filename().string();
    if (p.extension() != ".json" || name.ends_with("manifest.json")) continue;
    out.push_back(p.string());
  }
  if (ec) throw DataError("cannot list " + dir + ": " + ec.message());
  std::sort(out.begin(), out.end());
  if (out.empty()) throw DataError("no lane headers in " + dir);
  return out;
}

// ---- truth ---------------------------------------------------------------

std::string truth_csv(std::span<const GroundTruthEntry> truth) {
  std::string s = "lane_id,x_m,y_m,depth_category,metal\n";
  for (const auto& g : truth)
    s += g.lane_id + ',' + format_real(g.x_m) + ',' + format_real(g.y_m) + ',' +
         std::string(to_string(g.depth_category)) + ',' + std::string(to_string(g.metal)) + '\n';
  return s;
}

std::vector<GroundTruthEntry> parse_truth_csv(const std::string& text) {
  std::vector<GroundTruthEntry> out;
  for (const auto& c : parse_table(text, "lane_id,x_m,y_m,depth_category,metal", "truth"))
    out.push_back(as_data_error([&] {
      return GroundTruthEntry{c[0], parse_real(c[1], "truth x_m"), parse_real(c[2], "truth y_m"),
                              parse_depth_category(c[3]), parse_metal_content(c[4])};
    }));
  return out;
}

// ---- alarms --------------------------------------------------------------

std::string alarms_csv(std::span<const Alarm> alarms) {
  std::string s = "lane_id,x_m,y_m,statistic,source\n";
  for (const auto& a : alarms)
    s += a.lane_id + ',' + format_real(a.x_m) + ',' + format_real(a.y_m) + ',' +
         format_real(a.statistic) + ',' + std::string(to_string(a.source)) + '\n';
  return s;
}

std::vector<Alarm> parse_alarms_csv(const std::string& text) {
  std::vector<Alarm> out;
  for (const auto& c : parse_table(text, "lane_id,x_m,y_m,statistic,source", "alarm")) {
    Alarm a{c[0], parse_real(c[1], "alarm x_m"), parse_real(c[2], "alarm y_m"),
            parse_real(c[3], "alarm statistic"), as_data_error([&] { return parse_alarm_source(c[4]); })};
    if (!std::isfinite(a.statistic)) throw DataError("alarm CSV: non-finite statistic");
    out.push_back(std::move(a));
  }
  return out;
}

// ---- decision statistics ---------------------------------------------------

std::string stats_csv(std::span<const StatsRow> rows) {
  std::string s = "lane_id,x_m,y_m,is_threat,depth_category,stat_ehd,stat_lg,stat_gprhog,stat_sed,stat_fused\n";
  for (const auto& r : rows) {
    s += r.lane_id + ',' + format_real(r.x_m) + ',' + format_real(r.y_m) + ',' + (r.is_threat ? "1" : "0") + ',';
    if (r.depth) s += to_string(*r.depth);
    for (double v : r.stat) s += ',' + format_real(v);
    s += ',' + format_real(r.fused) + '\n';
  }
  return s;
}

std::vector<StatsRow> parse_stats_csv(const std::string& text) {
  std::vector<StatsRow> out;
  auto cell = [](const std::string& s) { return s.empty() ? kMissing : parse_real(s, "stats value"); };
  for (const auto& c : parse_table(
           text, "lane_id,x_m,y_m,is_threat,depth_category,stat_ehd,stat_lg,stat_gprhog,stat_sed,stat_fused", "stats")) {
    StatsRow r;
    r.lane_id = c[0];
    r.x_m = parse_real(c[1], "stats x_m");
    r.y_m = parse_real(c[2], "stats y_m");
    if (c[3] != "0" && c[3] != "1") throw DataError("stats CSV: is_threat must be 0 or 1");
    r.is_threat = c[3] == "1";
    if (!c[4].empty()) r.depth = as_data_error([&] { return parse_depth_category(c[4]); });
    for (int k = 0; k < 4; ++k) r.stat[k] = cell(c[5 + k]);
    r.fused = cell(c[9]);
    out.push_back(std::move(r));
  }
  return out;
}

// ---- ROC -------------------------------------------------------------------

std::string roc_csv(const RocCurve& curve) {
  std::string s = "far_per_m2,pd\n";
  for (const auto& p : curve.points) s += format_real(p.far_per_m2) + ',' + format_real(p.pd) + '\n';
  return s;
}

RocCurve parse_roc_csv(const std::string& text) {
  RocCurve c;
  for (const auto& r : parse_table(text, "far_per_m2,pd", "ROC"))
    c.points.push_back({parse_real(r[0], "ROC far"), parse_real(r[1], "ROC pd")});
  return c;
}

RocSummary summarize_roc(const RocCurve& curve, std::span<const LabeledAlarm> alarms) {
  RocSummary s;
  s.auc = auc_full(curve);
  s.max_pd = curve.max_pd();
  s.n_threats = curve.n_threats;
  s.n_false = static_cast<int>(std::count_if(alarms.begin(), alarms.end(), [](const LabeledAlarm& a) { return !a.hit; }));
  s.area_m2 = curve.area_m2;
  return s;
}

// ---- features ----------------------------------------------------------------

std::string features_csv(std::span<const FeatureRow> rows) {
  std::size_t dim = 0;
  for (const auto& r : rows) dim = std::max(dim, r.values.size());
  std::string s = "lane_id,x_m,y_m,t,kind,label";
  for (std::size_t i = 0; i < dim; ++i) s += ",v" + std::to_string(i);
  s += '\n';
  for (const auto& r : rows) {
    s += r.lane_id + ',' + format_real(r.x_m) + ',' + format_real(r.y_m) + ',' + std::to_string(r.t) + ',' +
         std::string(to_string(r.kind)) + ',' + std::to_string(r.label);
    for (std::size_t i = 0; i < dim; ++i) s += ',' + (i < r.values.size() ? format_real(r.values[i]) : "");
    s += '\n';
  }
  return s;
}

}  // namespace gprbtd
