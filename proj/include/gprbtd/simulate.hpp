#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gprbtd/core.hpp"

namespace gprbtd {

// Synthetic lane description. Times are sample indices of the raw volume,
// SNR values are peak amplitude over noise sigma in dB.
struct SimSpec {
  int lanes = 1;
  std::string lane_prefix = "lane";
  int nx = 40;
  int ny = 320;
  int nt = 440;
  double dt = 1e-10;
  double dx = 0.05;
  double dy = 0.05;

  int ground_t = 30;
  int ground_jitter = 2;
  double ground_amp_db = 34.0;
  double pulse_sigma = 2.5;  // samples

  int n_threats = 8;
  double deep_fraction = 0.115;
  int standard_t0_min = 100;
  int standard_t0_max = 200;
  int deep_t0_min = 230;
  int deep_t0_max = 290;
  double snr_standard_lo = 16.0;
  double snr_standard_hi = 22.0;
  double snr_deep_lo = 12.0;
  double snr_deep_hi = 16.0;
  double velocity = 0.0065;     // meters per sample along the wavefront
  double footprint_m = 0.3;     // lateral extent of the hyperbolic arms
  double min_separation_m = 1.0;
  double edge_margin_m = 0.5;

  double clutter_density = 0.5;  // blobs per square meter
  double clutter_radius_m = 0.08;
  double clutter_snr_lo = 12.0;
  double clutter_snr_hi = 20.0;

  double noise_sigma = 1.0;
  std::uint64_t seed = 1;
};

SimSpec parse_sim_spec(std::string_view text);
SimSpec load_sim_spec(const std::string& path);
void validate_sim_spec(const SimSpec& s);
std::string dump_sim_spec(const SimSpec& s);

struct RenderedThreat {
  int x = 0;  // nearest sample indices of the apex
  int y = 0;
  int t0 = 0;
  double snr_db = 0.0;
};

struct SimLane {
  LaneDataset lane;
  std::vector<RenderedThreat> threats;  // parallel to lane.truth
};

// Bipolar pulse: negative derivative of a Gaussian, peak magnitude 1 at +-sigma,
// zero crossing at tau = 0.
double sim_wavelet(double tau, double sigma);

// Renders lane number `index` of the spec (seed derived from spec.seed and index).
SimLane synth_lane(const SimSpec& spec, int index = 0);

}  // namespace gprbtd
