#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "gprbtd/features.hpp"
#include "oracles.hpp"

using namespace gprbtd;

namespace {

constexpr double kPi = std::numbers::pi;

DataCube cube_of(Array3 a) { return {std::move(a), {0, 0, 0}}; }

Array3 random_cube(Rng& rng, int nt, int nx, int ny, double scale = 4.0) {
  return oracle::random_array(rng, nt, nx, ny, scale);
}

// Direct 3x3 responses of the four kernels, first maximum on ties.
EdgeLabel direct_label(const Image2& img, int r, int c, double thr) {
  static const int k[4][3][3] = {{{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}},
                                 {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}},
                                 {{0, 1, 2}, {-1, 0, 1}, {-2, -1, 0}},
                                 {{-2, -1, 0}, {-1, 0, 1}, {0, 1, 2}}};
  double best = -1;
  int arg = 4;
  for (int i = 0; i < 4; ++i) {
    double s = 0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) s += k[i][a][b] * img(r - 1 + a, c - 1 + b);
    if (std::abs(s) > best) best = std::abs(s), arg = i;
  }
  return best > thr ? static_cast<EdgeLabel>(arg) : EdgeLabel::NONE;
}

}  // namespace

// ---- Sobel ----------------------------------------------------------------

TEST_CASE("constant image has no edges") {
  auto e = sobel_edges(Image2(8, 8, 3.0), 0.5);
  for (auto l : e.labels) CHECK(l == EdgeLabel::NONE);
}

TEST_CASE("vertical step edge is labelled V along the edge") {
  Image2 img(8, 8);
  for (int r = 0; r < 8; ++r)
    for (int c = 4; c < 8; ++c) img(r, c) = 10.0;
  auto e = sobel_edges(img, 3.0);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) {
      const bool interior = r > 0 && r < 7 && c > 0 && c < 7;
      const EdgeLabel want = interior ? direct_label(img, r, c, 3.0) : EdgeLabel::NONE;
      CHECK(e(r, c) == want);
      if (interior && (c == 3 || c == 4)) CHECK(e(r, c) == EdgeLabel::V);
    }
}

TEST_CASE("Sobel ties go to the lowest kernel index") {
  Image2 img(3, 3);
  img(0, 1) = -1.0;
  img(1, 2) = 1.0;  // |V| = |H| = |D135| = 2
  CHECK(sobel_edges(img, 0.0)(1, 1) == EdgeLabel::V);

  // every 3x3 patch over {-1, 0, 1} agrees with the direct oracle
  for (int code = 0; code < 19683; ++code) {
    int c = code;
    for (int i = 0; i < 9; ++i, c /= 3) img(i / 3, i % 3) = c % 3 - 1;
    REQUIRE(sobel_edges(img, 0.5)(1, 1) == direct_label(img, 1, 1, 0.5));
  }
}

// ---- EHD ------------------------------------------------------------------

TEST_CASE("EHD has 35 values and a constant cube is all non-edge") {
  auto f = ehd_feature(cube_of(Array3(60, 15, 15, 2.0)), EhdDirection::DT, 3.0);
  REQUIRE(f.size() == 35);
  CHECK(f.kind == FeatureKind::EHD_DT);
  for (int i = 0; i < 7; ++i)
    for (int b = 0; b < 5; ++b) CHECK(f.values[i * 5 + b] == (b == 4 ? 1.0 : 0.0));
  CHECK_THROWS_AS(ehd_feature(cube_of(Array3(50, 15, 15)), EhdDirection::DT, 3.0), std::domain_error);
}

TEST_CASE("EHD sub-image histograms sum to one") {
  Rng rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    auto cube = cube_of(random_cube(rng, 60, 15, 15));
    for (auto dir : {EhdDirection::DT, EhdDirection::CT}) {
      auto f = ehd_feature(cube, dir, 3.0);
      for (int i = 0; i < 7; ++i) {
        double s = 0;
        for (int b = 0; b < 5; ++b) s += f.values[i * 5 + b];
        REQUIRE(std::abs(s - 1.0) <= 1e-12);
      }
    }
  }
}

TEST_CASE("EHD matches a counting oracle over the middle planes") {
  Rng rng(42);
  auto a = random_cube(rng, 60, 15, 15);
  auto f = ehd_feature(cube_of(a), EhdDirection::CT, 3.0);
  std::vector<double> want(35, 0.0);
  for (int y = 4; y <= 10; ++y) {
    Image2 img(60, 15);
    for (int t = 0; t < 60; ++t)
      for (int x = 0; x < 15; ++x) img(t, x) = a(t, x, y);
    for (int i = 0; i < 7; ++i)
      for (int r = 8 * i; r < 8 * i + 12; ++r)
        for (int c = 0; c < 15; ++c) {
          const bool interior = r > 0 && r < 59 && c > 0 && c < 14;
          const auto l = interior ? direct_label(img, r, c, 3.0) : EdgeLabel::NONE;
          want[i * 5 + static_cast<int>(l)] += 1.0 / (7 * 12 * 15);
        }
  }
  for (int i = 0; i < 35; ++i) CHECK(f.values[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("EHD is invariant to shifting an interior pattern down-track") {
  auto make = [](int shift) {
    Array3 a(60, 15, 15);
    for (int x = 0; x < 15; ++x)
      for (int t = 3; t <= 5; ++t)
        for (int y = 5; y <= 7; ++y) a(t, x, y + shift) = 9.0;
    return ehd_feature(cube_of(a), EhdDirection::DT, 3.0).values;
  };
  const auto base = make(0);
  for (int k = -3; k <= 3; ++k) CHECK(make(k) == base);
}

// ---- log-Gabor ------------------------------------------------------------

TEST_CASE("log-Gabor response is one at the center and exp(-1/2) one sigma out") {
  for (double rho0 : {0.35, 0.175, 0.04375})
    for (double th : {0.1, 1.3, 3.0}) {
      CHECK(log_gabor_response(rho0, th, rho0, th, 0.65, 0.2) == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(log_gabor_response(rho0 * 0.65, th, rho0, th, 0.65, 0.2) ==
            doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
      CHECK(log_gabor_response(rho0, th + 0.2, rho0, th, 0.65, 0.2) ==
            doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    }
  CHECK(log_gabor_response(0.0, 0.0, 0.1, 0.0, 0.65, 0.2) == 0.0);
  // the angular distance wraps
  CHECK(log_gabor_response(0.1, kPi - 0.05, 0.1, -kPi + 0.05, 0.65, 0.2) ==
        doctest::Approx(std::exp(-0.01 / 0.08)).epsilon(1e-12));
}

TEST_CASE("bank holds 36 filters at 20 degree spacing over 180 degrees") {
  auto bank = build_log_gabor_bank(64, 16, {});
  REQUIRE(bank.filters.size() == 36);
  for (int o = 0; o < 9; ++o) CHECK(bank.theta0[o] * 180 / kPi == doctest::Approx(10.0 + 20.0 * o));
  CHECK((bank.theta0[8] - bank.theta0[0]) * 180 / kPi + 20.0 == doctest::Approx(180.0));
  for (int s = 0; s < 4; ++s) CHECK(bank.rho0[s] == doctest::Approx(0.35 / (1 << s)));
  for (const auto& f : bank.filters) {
    CHECK(f[0] == 0.0);  // DC
    for (double v : f) REQUIRE((v >= 0.0 && v <= 1.0));
  }
  CHECK_THROWS_AS(build_log_gabor_bank(7, 16, {}), std::domain_error);
}

TEST_CASE("bin layout: 15 half-overlapping depth bins and three regions") {
  auto b = lg_bin_starts(384);
  for (int i = 0; i < 15; ++i) CHECK(b[i] == 24 * i);
  CHECK(b[14] + 48 == 384);
  auto r = lg_region_starts(15);
  CHECK(r == std::array<int, 3>{0, 3, 7});
  std::set<int> all;
  for (const auto& g : lg_region_orientations())
    for (int o : g) all.insert(o);
  CHECK(all.size() == 9);
}

TEST_CASE("LG matrix is 15 x 144 and zero for a zero cube") {
  LogGaborBank bank = build_log_gabor_bank(32, 8, {});
  auto m = lg_feature_matrix(cube_of(Array3(32, 15, 15)), bank);
  REQUIRE(m.size() == 15);
  for (const auto& row : m)
    for (double v : row) CHECK(v == 0.0);
  auto f = lg_feature(m);
  CHECK(f.size() == 144);
  CHECK_THROWS_AS(lg_feature_matrix(cube_of(Array3(48, 15, 15)), bank), std::domain_error);
}

TEST_CASE("LG energy equals a direct spatial circular convolution") {
  Rng rng(43);
  const int nt = 32, n = 15, w = 8;
  auto a = random_cube(rng, nt, n, n, 1.0);
  auto bank = build_log_gabor_bank(nt, w, {});
  auto m = lg_feature_matrix(cube_of(a), bank);
  const auto starts = lg_region_starts(n);

  struct Probe {
    int plane, region, j, scale, bin;
  };
  for (Probe pr : {Probe{0, 0, 0, 0, 0}, Probe{1, 1, 2, 1, 7}, Probe{2, 2, 1, 2, 14}, Probe{3, 1, 0, 3, 3}}) {
    const int o = lg_region_orientations()[pr.region][pr.j];
    const auto& H = bank.filter(pr.scale, o);
    // spatial kernel by a direct inverse DFT
    std::vector<std::complex<double>> k(nt * w);
    for (int t = 0; t < nt; ++t)
      for (int c = 0; c < w; ++c) {
        std::complex<double> s = 0;
        for (int u = 0; u < nt; ++u)
          for (int v = 0; v < w; ++v)
            s += H[u * w + v] * std::polar(1.0, 2 * kPi * (double(u * t) / nt + double(v * c) / w));
        k[t * w + c] = s / double(nt * w);
      }
    Image2 region(nt, w);
    for (int t = 0; t < nt; ++t)
      for (int c = 0; c < w; ++c) {
        const int kk = starts[pr.region] + c;
        const int x = pr.plane == 0 ? n / 2 : kk;
        const int y = pr.plane == 0 ? kk : pr.plane == 1 ? n / 2 : pr.plane == 2 ? kk : n - 1 - kk;
        region(t, c) = a(t, x, y);
      }
    double energy = 0.0;
    const int b0 = lg_bin_starts(nt)[pr.bin];
    for (int t = b0; t < b0 + nt / 8; ++t)
      for (int c = 0; c < w; ++c) {
        std::complex<double> s = 0;
        for (int tt = 0; tt < nt; ++tt)
          for (int cc = 0; cc < w; ++cc)
            s += region(tt, cc) * k[((t - tt + nt) % nt) * w + (c - cc + w) % w];
        energy += std::norm(s);
      }
    const double got = m[pr.bin][pr.plane * 36 + pr.region * 12 + pr.j * 4 + pr.scale];
    CHECK(got == doctest::Approx(energy).epsilon(1e-6));
  }
}

TEST_CASE("LG feature is the column maximum") {
  Rng rng(44);
  std::vector<std::array<double, kLgDim>> m(15);
  for (auto& row : m)
    for (double& v : row) v = rng.uniform(0, 10);
  auto f = lg_feature(m);
  for (int c = 0; c < kLgDim; ++c) {
    double best = -1;
    for (const auto& row : m) best = std::max(best, row[c]);
    REQUIRE(f.values[c] == best);
  }
  for (auto& row : m) row[5] = 2.5;
  CHECK(lg_feature(m).values[5] == 2.5);
}

TEST_CASE("no log-Gabor filter is dead on random cubes") {
  Rng rng(45);
  auto bank = build_log_gabor_bank(384, 8, {});
  for (int trial = 0; trial < 3; ++trial) {
    auto f = lg_feature(lg_feature_matrix(cube_of(random_cube(rng, 384, 15, 15, 1.0)), bank));
    for (double v : f.values) REQUIRE(v > 1e-6);
  }
}

// ---- gprHOG ---------------------------------------------------------------

TEST_CASE("single-cell HOG matches per-pixel gradient binning") {
  Rng rng(46);
  HogParams p{6, 6, 9};
  for (int trial = 0; trial < 20; ++trial) {
    Image2 img(6, 6);
    for (double& v : img.data()) v = rng.normal();
    std::vector<double> want(9, 0.0);
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c) {
        const double gr = img.at_or_zero(r == 5 ? 5 : r + 1, c) - img(r == 0 ? 0 : r - 1, c);
        const double gc = img(r, c == 5 ? 5 : c + 1) - img(r, c == 0 ? 0 : c - 1);
        double deg = std::atan2(gr, gc) * 180 / kPi;
        if (deg < 0) deg += 180;
        if (deg >= 180) deg -= 180;
        want[std::min(8, static_cast<int>(deg / 20))] += std::sqrt(gr * gr + gc * gc);
      }
    auto h = hog_descriptor(img, p);
    REQUIRE(h.size() == 9);
    for (int b = 0; b < 9; ++b) REQUIRE(h[b] == doctest::Approx(want[b]).epsilon(1e-12));
  }
}

TEST_CASE("gprHOG: identical slices, constant cubes, linearity") {
  Rng rng(47);
  HogParams p;
  CHECK(p.dim() == 81);
  Image2 slice(18, 18);
  for (double& v : slice.data()) v = rng.normal();
  Array3 a(18, 18, 18);
  for (int t = 0; t < 18; ++t)
    for (int x = 0; x < 18; ++x)
      for (int y = 0; y < 18; ++y) a(t, x, y) = slice(t, y);
  auto pair = gprhog_feature(cube_of(a), p);
  auto single = hog_descriptor(slice, p);
  for (int d = 0; d < 81; ++d) CHECK(pair.tx.values[d] == doctest::Approx(single[d]).epsilon(1e-12));

  auto flat = gprhog_feature(cube_of(Array3(18, 18, 18, 5.0)), p);
  for (double v : flat.tx.values) CHECK(v == 0.0);
  for (double v : flat.ty.values) CHECK(v == 0.0);

  auto b = random_cube(rng, 18, 18, 18);
  Array3 scaled = b;
  for (double& v : scaled.data()) v *= 3.5;
  auto f1 = gprhog_feature(cube_of(b), p), f2 = gprhog_feature(cube_of(scaled), p);
  for (int d = 0; d < 81; ++d) {
    REQUIRE(f2.tx.values[d] == doctest::Approx(3.5 * f1.tx.values[d]).epsilon(1e-12));
    REQUIRE(f2.ty.values[d] == doctest::Approx(3.5 * f1.ty.values[d]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gprhog_feature(cube_of(Array3(18, 18, 17)), p), std::domain_error);
}

// ---- SED ------------------------------------------------------------------

TEST_CASE("SED has 36 values and is zero on constant scans") {
  SedParams p;
  CHECK(p.dim() == 36);
  CHECK(p.edge_threshold == 3.0);
  // the patch stays inside the array, so no artificial border edges appear
  Array3 interior(60, 21, 21, 4.0);
  auto f = sed_feature(interior, 10, 10, 5, p);
  REQUIRE(f.size() == 36);
  for (double v : f.values) CHECK(v == 0.0);
}

TEST_CASE("SED edge threshold suppresses weak edges") {
  SedParams p;
  p.scans = 1;
  Array3 a(1, 21, 21);
  for (int x = 0; x < 21; ++x)
    for (int y = 11; y < 21; ++y) a(0, x, y) = 0.74;  // |V| = 4 * 0.74 = 2.96 < 3
  for (double v : sed_feature(a, 10, 10, 0, p).values) CHECK(v == 0.0);
  for (double& v : a.data()) v *= 1.02;  // 3.02 > 3
  double sum = 0;
  for (double v : sed_feature(a, 10, 10, 0, p).values) sum += v;
  CHECK(sum > 0.0);
}

TEST_CASE("rotating every T-scan by 90 degrees permutes the SED cells and bins") {
  Rng rng(48);
  SedParams p;
  p.scans = 20;
  const int n = 15;
  const int swap_bin[4] = {1, 0, 3, 2};  // V<->H, D45<->D135
  for (int trial = 0; trial < 10; ++trial) {
    auto a = random_cube(rng, 20, n, n);
    Array3 r(20, n, n);
    for (int t = 0; t < 20; ++t)
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) r(t, x, y) = a(t, y, n - 1 - x);
    auto f = sed_feature(a, 7, 7, 0, p), g = sed_feature(r, 7, 7, 0, p);
    for (int ci = 0; ci < 3; ++ci)
      for (int cj = 0; cj < 3; ++cj)
        for (int b = 0; b < 4; ++b)
          REQUIRE(g.values[((2 - cj) * 3 + ci) * 4 + swap_bin[b]] == f.values[(ci * 3 + cj) * 4 + b]);
  }
}

TEST_CASE("label volume prefix sums equal direct SED windows") {
  Rng rng(49);
  auto a = random_cube(rng, 40, 12, 17);
  SedLabelVolume lv(a, 3.0);
  for (int trial = 0; trial < 60; ++trial) {
    SedParams p;
    p.scans = 1 + static_cast<int>(rng.index(50));
    const int x0 = static_cast<int>(rng.index(16)) - 2, y0 = static_cast<int>(rng.index(21)) - 2;
    const int t0 = static_cast<int>(rng.index(50)) - 5;
    auto want = sed_feature(a, x0, y0, t0, p), got = lv.feature(x0, y0, t0, p);
    for (int d = 0; d < 36; ++d) REQUIRE(std::abs(got.values[d] - want.values[d]) <= 1e-12);
  }
}

// ---- MSEK -----------------------------------------------------------------

namespace {

Array3 bumps(int nt, std::vector<std::pair<double, double>> centers_amps) {
  Array3 a(nt, 5, 5);
  for (int t = 0; t < nt; ++t) {
    double v = 0;
    for (auto [c, amp] : centers_amps) v += amp * std::exp(-(t - c) * (t - c) / (2 * 16.0));
    for (int x = 0; x < 5; ++x)
      for (int y = 0; y < 5; ++y) a(t, x, y) = v;
  }
  return a;
}

}  // namespace

TEST_CASE("MSEK finds a single bump at its center") {
  auto r = msek_depths(bumps(120, {{47.0, 2.0}}), 2, 2, 7, 2);
  REQUIRE(r.depths.size() == 1);
  CHECK(std::abs(r.depths[0] - 47) <= 1);
  CHECK_FALSE(r.warning);
}

TEST_CASE("MSEK orders two bumps by energy and matches a direct scan") {
  auto a = bumps(200, {{50.0, 1.0}, {140.0, 2.0}});
  auto r = msek_depths(a, 2, 2, 7, 2);
  REQUIRE(r.depths.size() == 2);
  CHECK(std::abs(r.depths[0] - 140) <= 1);
  CHECK(std::abs(r.depths[1] - 50) <= 1);

  Rng rng(50);
  auto noisy = random_cube(rng, 150, 6, 6, 1.0);
  auto got = msek_depths(noisy, 3, 1, 7, 5);
  std::vector<double> e(150, 0.0), sm(150, 0.0);
  for (int t = 0; t < 150; ++t) {
    int c = 0;
    for (int x = 2; x <= 4; ++x)
      for (int y = 0; y <= 2; ++y) e[t] += noisy(t, x, y) * noisy(t, x, y), ++c;
    e[t] /= c;
  }
  for (int t = 0; t < 150; ++t) {
    int c = 0;
    for (int k = t - 3; k <= t + 3; ++k)
      if (k >= 0 && k < 150) sm[t] += e[k], ++c;
    sm[t] /= c;
  }
  std::vector<int> peaks;
  for (int t = 1; t < 149; ++t)
    if (sm[t] > sm[t - 1] && sm[t] > sm[t + 1]) peaks.push_back(t);
  std::sort(peaks.begin(), peaks.end(), [&](int x, int y) { return sm[x] > sm[y]; });
  peaks.resize(5);
  CHECK(got.depths == peaks);
}

TEST_CASE("MSEK on a zero A-scan falls back to index 0 with a warning") {
  auto r = msek_depths(Array3(50, 3, 3), 1, 1, 7, 2);
  CHECK(r.depths == std::vector<int>{0});
  CHECK(r.warning);
  CHECK_THROWS_AS(msek_depths(Array3(50, 3, 3), 1, 1, 7, 0), std::domain_error);
}

// ---- dimensions -----------------------------------------------------------

TEST_CASE("every feature kind keeps its dimension on random cubes") {
  Rng rng(51);
  HogParams hp;
  SedParams sp;
  auto bank = build_log_gabor_bank(32, 8, {});
  for (int trial = 0; trial < 1000; ++trial) {
    const double scale = rng.uniform(0.01, 20);
    auto e = cube_of(random_cube(rng, 60, 15, 15, scale));
    REQUIRE(ehd_feature(e, EhdDirection::DT, 3.0).size() == 35);
    REQUIRE(ehd_feature(e, EhdDirection::CT, 3.0).size() == 35);
    auto h = gprhog_feature(cube_of(random_cube(rng, 18, 18, 18, scale)), hp);
    REQUIRE(h.tx.size() == 81);
    REQUIRE(h.ty.size() == 81);
    auto s = sed_feature(e.samples, 7, 7, 5, sp);
    REQUIRE(s.size() == 36);
    auto l = lg_feature(lg_feature_matrix(cube_of(random_cube(rng, 32, 15, 15, scale)), bank));
    REQUIRE(l.size() == 144);
    for (const auto* v : {&s.values, &l.values, &h.tx.values})
      for (double x : *v) REQUIRE(std::isfinite(x));
  }
}
