#include "gprbtd/simulate.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <numeric>
#include <sstream>
#include <variant>

#include "gprbtd/config.hpp"
#include "gprbtd/random.hpp"

namespace gprbtd {

namespace {

using Member = std::variant<int SimSpec::*, double SimSpec::*, std::uint64_t SimSpec::*,
                            std::string SimSpec::*>;

struct Field {
  const char* name;
  Member member;
};

#define SIM_FIELD(name) Field{#name, &SimSpec::name}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      SIM_FIELD(lanes),           SIM_FIELD(lane_prefix),     SIM_FIELD(nx),
      SIM_FIELD(ny),              SIM_FIELD(nt),              SIM_FIELD(dt),
      SIM_FIELD(dx),              SIM_FIELD(dy),              SIM_FIELD(ground_t),
      SIM_FIELD(ground_jitter),   SIM_FIELD(ground_amp_db),   SIM_FIELD(pulse_sigma),
      SIM_FIELD(n_threats),       SIM_FIELD(deep_fraction),   SIM_FIELD(standard_t0_min),
      SIM_FIELD(standard_t0_max), SIM_FIELD(deep_t0_min),     SIM_FIELD(deep_t0_max),
      SIM_FIELD(snr_standard_lo), SIM_FIELD(snr_standard_hi), SIM_FIELD(snr_deep_lo),
      SIM_FIELD(snr_deep_hi),     SIM_FIELD(velocity),        SIM_FIELD(footprint_m),
      SIM_FIELD(min_separation_m), SIM_FIELD(edge_margin_m),  SIM_FIELD(clutter_density),
      SIM_FIELD(clutter_radius_m), SIM_FIELD(clutter_snr_lo), SIM_FIELD(clutter_snr_hi),
      SIM_FIELD(noise_sigma),     SIM_FIELD(seed),
  };
  return table;
}

#undef SIM_FIELD

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  auto r = std::from_chars(value.data(), value.data() + value.size(), out);
  if (r.ec != std::errc() || r.ptr != value.data() + value.size())
    throw ConfigError("sim spec key '" + key + "': cannot parse '" + value + "'");
  return out;
}

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigError(std::string("sim spec key '") + key + "': " + what);
}

// Zero-phase pulse used for the ground reflection; peak 1 at tau = 0.
double ricker(double tau, double sigma) {
  const double u = tau * tau / (sigma * sigma);
  return (1.0 - u) * std::exp(-0.5 * u);
}

double amplitude(const SimSpec& s, double snr_db) {
  const double ref = s.noise_sigma > 0 ? s.noise_sigma : 1.0;
  return ref * std::pow(10.0, snr_db / 20.0);
}

// Encounter counts (metal, low metal, non metal) per burial category.
MetalContent draw_metal(Rng& rng, DepthCategory d) {
  const double w_std[3] = {1441, 2121, 465};
  const double w_deep[3] = {308, 0, 217};
  const double* w = d == DepthCategory::deep ? w_deep : w_std;
  double u = rng.uniform() * (w[0] + w[1] + w[2]);
  if (u < w[0]) return MetalContent::metal;
  if (u < w[0] + w[1]) return MetalContent::low_metal;
  return MetalContent::non_metal;
}

}  // namespace

SimSpec parse_sim_spec(std::string_view text) {
  SimSpec s;
  for (const auto& kv : parse_key_values(text)) {
    auto it = std::find_if(fields().begin(), fields().end(),
                           [&](const Field& f) { return kv.key == f.name; });
    if (it == fields().end()) throw ConfigError("unknown sim spec key '" + kv.key + "'");
    std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(s.*member)>;
          if constexpr (std::is_same_v<T, std::string>)
            s.*member = kv.value;
          else
            s.*member = parse_number<T>(kv.key, kv.value);
        },
        it->member);
  }
  validate_sim_spec(s);
  return s;
}

SimSpec load_sim_spec(const std::string& path) { return parse_sim_spec(read_text_file(path)); }

void validate_sim_spec(const SimSpec& s) {
  require(s.lanes >= 1, "lanes", "must be >= 1");
  require(!s.lane_prefix.empty() &&
              std::all_of(s.lane_prefix.begin(), s.lane_prefix.end(),
                          [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }),
          "lane_prefix", "must be non-empty [A-Za-z0-9_-]");
  require(s.nx >= 1 && s.ny >= 1 && s.nt >= 1, "nt", "lane dims must be positive");
  require(s.dt > 0 && s.dx > 0 && s.dy > 0, "dt", "spacings must be positive");
  require(s.ground_jitter >= 0, "ground_jitter", "must be >= 0");
  require(s.ground_t - s.ground_jitter >= 0, "ground_t", "ground minus jitter must be >= 0");
  require(std::isfinite(s.ground_amp_db), "ground_amp_db", "must be finite");
  require(s.pulse_sigma > 0, "pulse_sigma", "must be > 0");
  require(s.n_threats >= 0, "n_threats", "must be >= 0");
  require(s.deep_fraction >= 0 && s.deep_fraction <= 1, "deep_fraction", "must be in [0,1]");
  require(s.standard_t0_min > s.ground_t && s.standard_t0_min <= s.standard_t0_max,
          "standard_t0_min", "need ground_t < standard_t0_min <= standard_t0_max");
  require(s.deep_t0_min > s.standard_t0_max + 2 * s.ground_jitter && s.deep_t0_min <= s.deep_t0_max,
          "deep_t0_min", "deep range must lie strictly below the standard range");
  require(s.deep_t0_max + s.ground_jitter < s.nt, "deep_t0_max", "must fit inside nt");
  require(s.snr_standard_lo <= s.snr_standard_hi, "snr_standard_lo", "must be <= snr_standard_hi");
  require(s.snr_deep_lo <= s.snr_deep_hi, "snr_deep_lo", "must be <= snr_deep_hi");
  require(s.velocity > 0, "velocity", "must be > 0");
  require(s.footprint_m > 0, "footprint_m", "must be > 0");
  require(s.min_separation_m > 0, "min_separation_m", "must be > 0");
  require(s.edge_margin_m >= 0, "edge_margin_m", "must be >= 0");
  require(s.clutter_density >= 0, "clutter_density", "must be >= 0");
  require(s.clutter_radius_m > 0, "clutter_radius_m", "must be > 0");
  require(s.clutter_snr_lo <= s.clutter_snr_hi, "clutter_snr_lo", "must be <= clutter_snr_hi");
  require(s.noise_sigma >= 0, "noise_sigma", "must be >= 0");
}

std::string dump_sim_spec(const SimSpec& s) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& f : fields()) {
    os << f.name << " = ";
    std::visit([&](auto member) { os << s.*member; }, f.member);
    os << '\n';
  }
  return os.str();
}

double sim_wavelet(double tau, double sigma) {
  const double u = tau / sigma;
  return -u * std::exp(0.5 - 0.5 * u * u);
}

SimLane synth_lane(const SimSpec& s, int index) {
  validate_sim_spec(s);
  Rng rng(derive_seed(s.seed, static_cast<std::uint64_t>(index)));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "_%02d", index);
  const std::string lane_id = s.lane_prefix + buf;
  const double width = s.nx * s.dx, length = s.ny * s.dy;

  const double usable = length - 2.0 * s.edge_margin_m;
  const double spacing = s.n_threats > 0 ? usable / s.n_threats : usable;
  if (s.n_threats > 0 && (usable <= 0 || spacing < s.min_separation_m))
    throw std::domain_error("synth_lane: " + std::to_string(s.n_threats) +
                            " threats do not fit at the minimum separation");

  Array3 a(s.nt, s.nx, s.ny);
  std::vector<int> ground(static_cast<std::size_t>(s.nx) * s.ny);
  const double ground_amp = amplitude(s, s.ground_amp_db);
  const int half = static_cast<int>(std::ceil(4.0 * s.pulse_sigma));
  for (int y = 0; y < s.ny; ++y)
    for (int x = 0; x < s.nx; ++x) {
      const int j = s.ground_jitter > 0
                        ? static_cast<int>(rng.index(2 * s.ground_jitter + 1)) - s.ground_jitter
                        : 0;
      const int g = s.ground_t + j;
      ground[static_cast<std::size_t>(y) * s.nx + x] = g;
      for (int t = std::max(0, g - half); t <= std::min(s.nt - 1, g + half); ++t)
        a(t, x, y) += ground_amp * ricker(t - g, s.pulse_sigma);
    }
  auto ground_at = [&](int x, int y) { return ground[static_cast<std::size_t>(y) * s.nx + x]; };

  // threat layout: one per down-track slot, jittered within the slot
  const int n_deep = static_cast<int>(std::lround(s.deep_fraction * s.n_threats));
  std::vector<int> order(s.n_threats);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<int>(order));
  std::vector<bool> deep(s.n_threats, false);
  for (int k = 0; k < n_deep; ++k) deep[order[k]] = true;

  std::vector<RenderedThreat> rendered;
  std::vector<GroundTruthEntry> truth;
  const double xr = 0.2 * width;
  for (int k = 0; k < s.n_threats; ++k) {
    const double slack = 0.5 * (spacing - s.min_separation_m);
    const double y_m = s.edge_margin_m + spacing * (k + 0.5) + rng.uniform(-slack, slack);
    const double x_m = 0.5 * width + rng.uniform(-xr, xr);
    const DepthCategory cat = deep[k] ? DepthCategory::deep : DepthCategory::standard;
    const int lo = deep[k] ? s.deep_t0_min : s.standard_t0_min;
    const int hi = deep[k] ? s.deep_t0_max : s.standard_t0_max;
    const int depth = lo + static_cast<int>(rng.index(static_cast<std::size_t>(hi - lo + 1))) - s.ground_t;
    // SNR decays linearly with depth across the category range
    const double frac = hi > lo ? static_cast<double>(depth + s.ground_t - lo) / (hi - lo) : 0.0;
    const double snr = deep[k] ? s.snr_deep_hi - frac * (s.snr_deep_hi - s.snr_deep_lo)
                               : s.snr_standard_hi - frac * (s.snr_standard_hi - s.snr_standard_lo);
    const double amp = amplitude(s, snr);

    const int xi = std::clamp(static_cast<int>(std::lround(x_m / s.dx)), 0, s.nx - 1);
    const int yi = std::clamp(static_cast<int>(std::lround(y_m / s.dy)), 0, s.ny - 1);
    const double lat = 0.5 * s.footprint_m;
    for (int y = 0; y < s.ny; ++y) {
      const double ry = y * s.dy - yi * s.dy;
      if (std::abs(ry) > s.footprint_m) continue;
      for (int x = 0; x < s.nx; ++x) {
        const double rx = x * s.dx - xi * s.dx;
        const double r2 = rx * rx + ry * ry;
        if (r2 > s.footprint_m * s.footprint_m) continue;
        const double tc = ground_at(x, y) + std::sqrt(double(depth) * depth + r2 / (s.velocity * s.velocity));
        const double w = amp * std::exp(-0.5 * r2 / (lat * lat));
        const int t_lo = std::max(0, static_cast<int>(std::floor(tc)) - half);
        const int t_hi = std::min(s.nt - 1, static_cast<int>(std::ceil(tc)) + half);
        for (int t = t_lo; t <= t_hi; ++t) a(t, x, y) += w * sim_wavelet(t - tc, s.pulse_sigma);
      }
    }
    truth.push_back({lane_id, xi * s.dx, yi * s.dy, cat, draw_metal(rng, cat)});
    rendered.push_back({xi, yi, ground_at(xi, yi) + depth, snr});
  }

  // clutter: flat compact reflectors, kept off the threat halos
  const int n_clutter = static_cast<int>(std::lround(s.clutter_density * width * length));
  for (int c = 0; c < n_clutter; ++c) {
    double x_m = 0, y_m = 0;
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      x_m = rng.uniform(0.0, width);
      y_m = rng.uniform(0.0, length);
      placed = std::none_of(truth.begin(), truth.end(), [&](const GroundTruthEntry& g) {
        return std::hypot(g.x_m - x_m, g.y_m - y_m) < s.footprint_m + s.clutter_radius_m;
      });
    }
    const int depth = s.standard_t0_min +
                      static_cast<int>(rng.index(static_cast<std::size_t>(s.deep_t0_max - s.standard_t0_min + 1))) -
                      s.ground_t;
    const double amp = amplitude(s, rng.uniform(s.clutter_snr_lo, s.clutter_snr_hi));
    if (!placed) continue;
    const double rad = s.clutter_radius_m;
    for (int y = 0; y < s.ny; ++y) {
      const double ry = y * s.dy - y_m;
      if (std::abs(ry) > 3 * rad) continue;
      for (int x = 0; x < s.nx; ++x) {
        const double rx = x * s.dx - x_m;
        const double r2 = rx * rx + ry * ry;
        if (r2 > 9 * rad * rad) continue;
        const double w = amp * std::exp(-0.5 * r2 / (rad * rad));
        const int tc = ground_at(x, y) + depth;
        for (int t = std::max(0, tc - half); t <= std::min(s.nt - 1, tc + half); ++t)
          a(t, x, y) += w * sim_wavelet(t - tc, s.pulse_sigma);
      }
    }
  }

  if (s.noise_sigma > 0)
    for (double& v : a.data()) v += s.noise_sigma * rng.normal();

  return {make_lane_dataset(lane_id, GprVolume(std::move(a), s.dt, s.dx, s.dy), std::move(truth)),
          std::move(rendered)};
}

}  // namespace gprbtd
