#include <cmath>

#include "doctest.h"
#include "gprbtd/evaluate.hpp"
#include "gprbtd/prescreen.hpp"
#include "oracles.hpp"

using namespace gprbtd;

namespace {

GprVolume vol(Array3 a) { return GprVolume(std::move(a), 1e-10, 0.05, 0.05); }

PipelineConfig toy_f2() {
  PipelineConfig c;
  c.f2_median_length = 3;
  c.f2_depth_bin = 2;
  c.f2_cfar1d_half = 2;
  c.f2_cfar1d_guard = 0;
  c.f2_cfar2d_half = 2;
  c.f2_cfar2d_guard = 0;
  c.f2_smooth_sigma = 0.8;
  return c;
}

void check_f2_against_oracle(const Array3& a, const PipelineConfig& c, double tol) {
  auto m = f2_map(vol(a), c);
  auto o = oracle::f2_map(a, c.f2_median_length, c.f2_depth_bin, c.f2_cfar1d_half, c.f2_cfar1d_guard,
                          c.f2_cfar2d_half, c.f2_cfar2d_guard, c.f2_smooth_sigma, c.cfar_eps);
  REQUIRE(m.nx == a.nx());
  REQUIRE(m.ny == a.ny());
  for (int x = 0; x < m.nx; ++x)
    for (int y = 0; y < m.ny; ++y) REQUIRE(std::abs(m(x, y) - o[x][y]) <= tol);
}

SpatialMap random_map(Rng& rng, int nx, int ny) {
  SpatialMap m(nx, ny, 0.05, 0.05);
  for (double& v : m.values) v = rng.normal();
  return m;
}

oracle::Slice to_slice(const Image2& img) {
  oracle::Slice s(img.rows(), std::vector<double>(img.cols()));
  for (int t = 0; t < img.rows(); ++t)
    for (int z = 0; z < img.cols(); ++z) s[t][z] = img(t, z);
  return s;
}

double oracle_concavity(const Image2& img, int z0, const ConcavityParams& p, double sign) {
  return oracle::subsequence_average(
      oracle::trace_chain(to_slice(img), z0, p.omega, p.gamma, p.max_arm, sign));
}

}  // namespace

// ---- F2 ----------------------------------------------------------------

TEST_CASE("F2 on a toy volume with one hot voxel matches the step-by-step oracle") {
  Array3 a(6, 4, 4);
  a(3, 1, 2) = 5.0;
  check_f2_against_oracle(a, toy_f2(), 1e-9);
}

TEST_CASE("F2 matches the oracle on random volumes") {
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    auto a = oracle::random_array(rng, 13, 7, 9);
    auto c = toy_f2();
    c.f2_median_length = 1 + 2 * static_cast<int>(rng.index(3));
    c.f2_depth_bin = 2 + static_cast<int>(rng.index(2));
    check_f2_against_oracle(a, c, 1e-9);
  }
}

TEST_CASE("F2 of a constant volume is zero") {
  auto m = f2_map(vol(Array3(6, 4, 4, 3.25)), toy_f2());
  for (double v : m.values) CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("depth bins keep the mean of their top two values") {
  const std::vector<double> bin{1, 5, 3, 2};
  CHECK(top_two_mean(bin) == 4.0);
  const std::vector<double> one{-2.5};
  CHECK(top_two_mean(one) == -2.5);
}

TEST_CASE("F2 ignores per-depth offsets constant across track") {
  Rng rng(22);
  auto a = oracle::random_array(rng, 12, 6, 10);
  Array3 b = a;
  for (int t = 0; t < 12; ++t)
    for (int y = 0; y < 10; ++y) {
      const double off = rng.uniform(-3, 3);
      for (int x = 0; x < 6; ++x) b(t, x, y) += off;
    }
  auto c = toy_f2();
  c.f2_median_length = 1;  // the offset varies down-track, so no median mixing
  auto ma = f2_map(vol(a), c), mb = f2_map(vol(b), c);
  for (std::size_t i = 0; i < ma.values.size(); ++i) REQUIRE(std::abs(ma.values[i] - mb.values[i]) <= 1e-9);

  // With a median window the zero padding at the down-track ends breaks the
  // offset's additivity; rows further than median + CFAR + smoothing reach
  // from either end are unaffected.
  auto e = oracle::random_array(rng, 12, 6, 30);
  Array3 d = e;
  for (int t = 0; t < 12; ++t) {
    const double off = rng.uniform(-3, 3);
    for (int y = 0; y < 30; ++y)
      for (int x = 0; x < 6; ++x) d(t, x, y) += off;
  }
  auto me = f2_map(vol(e), toy_f2()), md = f2_map(vol(d), toy_f2());
  const int reach = 1 + 2 + 3;
  for (int y = reach; y < 30 - reach; ++y)
    for (int x = 0; x < 6; ++x) REQUIRE(std::abs(me(x, y) - md(x, y)) <= 1e-9);
}

TEST_CASE("F2 rejects volumes smaller than its windows") {
  CHECK_THROWS_AS(f2_map(vol(Array3(6, 4, 4)), PipelineConfig{}), std::domain_error);
  auto c = toy_f2();
  c.f2_median_length = 5;
  CHECK_THROWS_AS(f2_map(vol(Array3(6, 4, 4)), c), std::domain_error);
}

// ---- connected components ---------------------------------------------

TEST_CASE("components: nothing above threshold and two blobs") {
  SpatialMap m(10, 10, 0.1, 0.2);
  CHECK(map_alarms_cc(m, 0.5, "L").empty());
  m(1, 1) = 2.0;
  m(2, 1) = 1.0;
  m(7, 8) = 3.0;
  auto alarms = map_alarms_cc(m, 0.5, "L");
  REQUIRE(alarms.size() == 2);
  CHECK(alarms[0].x_m == doctest::Approx((1 * 2.0 + 2 * 1.0) / 3.0 * 0.1));
  CHECK(alarms[0].y_m == doctest::Approx(0.2));
  CHECK(alarms[0].statistic == 2.0);
  CHECK(alarms[1].statistic == 3.0);
  CHECK(alarms[1].x_m == doctest::Approx(0.7));
  CHECK(alarms[1].y_m == doctest::Approx(1.6));
  CHECK(map_alarms_cc(SpatialMap(), 0.0, "L").empty());
}

TEST_CASE("components match a flood-fill oracle on random binary maps") {
  Rng rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    SpatialMap m(12 + static_cast<int>(rng.index(8)), 9 + static_cast<int>(rng.index(8)), 0.05, 0.05);
    for (double& v : m.values) v = rng.uniform() < 0.35 ? 1.0 + rng.uniform() : 0.0;
    auto got = map_alarms_cc(m, 0.5, "L");
    auto want = oracle::components(m, 0.5);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      REQUIRE(std::abs(got[i].x_m - want[i].cx * 0.05) <= 1e-12);
      REQUIRE(std::abs(got[i].y_m - want[i].cy * 0.05) <= 1e-12);
      REQUIRE(got[i].statistic == want[i].max);
    }
  }
}

// ---- concavity ----------------------------------------------------------

TEST_CASE("concavity of a zero slice is zero") {
  Image2 s(30, 15);
  auto c = concavity_pair(SliceView::of(s), 7, {2, 1.0, 5});
  CHECK(c.c_plus == 0.0);
  CHECK(c.c_minus == 0.0);
  CHECK(trace_concavity_chain(SliceView::of(s), 7, {2, 1.0, 5}).empty());
}

TEST_CASE("traced chains never exceed eleven points") {
  Rng rng(24);
  ConcavityParams p{2, 0.5, 5};
  for (int trial = 0; trial < 50; ++trial) {
    Image2 s(20, 25);
    for (double& v : s.data()) v = 2.0 * rng.normal();
    const int z0 = static_cast<int>(rng.index(25));
    auto chain = trace_concavity_chain(SliceView::of(s), z0, p);
    REQUIRE(chain.size() <= 11);
    for (std::size_t i = 1; i < chain.size(); ++i) REQUIRE(chain[i].z == chain[i - 1].z + 1);
  }
}

TEST_CASE("an eleven-column arc scores the exhaustive subsequence average") {
  Image2 s(40, 11);
  const int apex = 10;
  std::vector<ChainPoint> expected;
  for (int z = 0; z < 11; ++z) {
    const int t = apex + (z - 5) * (z - 5) / 3;
    s(t, z) = 4.0;
    expected.push_back({t, z});
  }
  ConcavityParams p{4, 1.0, 5};
  auto chain = trace_concavity_chain(SliceView::of(s), 5, p);
  CHECK(chain == expected);
  std::vector<oracle::Point> pts;
  for (auto c : expected) pts.push_back({c.t, c.z});
  const double want = oracle::subsequence_average(pts);
  auto c = concavity_pair(SliceView::of(s), 5, p);
  CHECK(c.c_plus == doctest::Approx(want).epsilon(1e-12));
  CHECK(c.c_plus > 0.0);
  CHECK(c.c_minus == 0.0);
}

TEST_CASE("concavity traces match the oracle on random slices") {
  Rng rng(25);
  for (int trial = 0; trial < 200; ++trial) {
    Image2 s(15, 14);
    for (double& v : s.data()) v = rng.normal();
    ConcavityParams p{1 + static_cast<int>(rng.index(3)), 0.3 + rng.uniform(), 1 + static_cast<int>(rng.index(6))};
    const int z0 = static_cast<int>(rng.index(14));
    for (double sign : {1.0, -1.0}) {
      auto chain = trace_concavity_chain(SliceView::of(s), z0, p, sign);
      auto want = oracle::trace_chain(to_slice(s), z0, p.omega, p.gamma, p.max_arm, sign);
      REQUIRE(chain.size() == want.size());
      for (std::size_t i = 0; i < chain.size(); ++i) {
        REQUIRE(chain[i].t == want[i].t);
        REQUIRE(chain[i].z == want[i].z);
      }
      REQUIRE(chain_concavity(chain) == doctest::Approx(oracle::subsequence_average(want)).epsilon(1e-12));
    }
  }
}

TEST_CASE("negating the slice swaps the two concavity measures") {
  Rng rng(26);
  for (int trial = 0; trial < 50; ++trial) {
    Image2 s(18, 13), neg(18, 13);
    for (std::size_t i = 0; i < s.data().size(); ++i) {
      s.data()[i] = 1.5 * rng.normal();
      neg.data()[i] = -s.data()[i];
    }
    const int z0 = static_cast<int>(rng.index(13));
    ConcavityParams p{2, 1.0, 5};
    auto a = concavity_pair(SliceView::of(s), z0, p);
    auto b = concavity_pair(SliceView::of(neg), z0, p);
    REQUIRE(a.c_plus == b.c_minus);
    REQUIRE(a.c_minus == b.c_plus);
  }
}

TEST_CASE("chain concavity handles short chains and even runs") {
  std::vector<ChainPoint> two{{3, 0}, {4, 1}};
  CHECK(chain_concavity(two) == 0.0);
  std::vector<ChainPoint> four{{6, 0}, {4, 1}, {4, 2}, {6, 3}};
  // runs: (6,4,4) -> 1, (4,4,6) -> 1, (6,4,4,6) -> 2
  CHECK(chain_concavity(four) == doctest::Approx(4.0 / 3.0));
}

// ---- CCY map and alarms -------------------------------------------------

TEST_CASE("CCY map of a zero volume is zero") {
  auto m = ccy_map(vol(Array3(20, 9, 9)), {2, 1.0, 5}, 1.5);
  for (double v : m.values) CHECK(v == 0.0);
}

TEST_CASE("unsmoothed CCY map is the sum of four concavity terms") {
  Rng rng(27);
  auto a = oracle::random_array(rng, 16, 8, 11, 1.5);
  ConcavityParams p{2, 1.0, 5};
  auto m = ccy_map(vol(a), p, 0.0);
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 11; ++y) {
      Image2 down(16, 11), cross(16, 8);
      for (int t = 0; t < 16; ++t) {
        for (int yy = 0; yy < 11; ++yy) down(t, yy) = a(t, x, yy);
        for (int xx = 0; xx < 8; ++xx) cross(t, xx) = a(t, xx, y);
      }
      const double want = oracle_concavity(down, y, p, 1) + oracle_concavity(down, y, p, -1) +
                          oracle_concavity(cross, x, p, 1) + oracle_concavity(cross, x, p, -1);
      REQUIRE(m(x, y) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("CCY map peaks near the apex of a synthetic hyperbola") {
  const int nt = 60, n = 25, x0 = 12, y0 = 11;
  Array3 a(nt, n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      const double r2 = (x - x0) * (x - x0) + (y - y0) * (y - y0);
      const int t = static_cast<int>(std::lround(std::sqrt(15.0 * 15.0 + 6.0 * r2)));
      if (t < nt) a(t, x, y) = 3.0;
    }
  auto m = ccy_map(vol(a), {2, 1.5, 5}, 1.5);
  int bx = 0, by = 0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (m(x, y) > m(bx, by)) bx = x, by = y;
  CHECK(std::abs(bx - x0) <= 2);
  CHECK(std::abs(by - y0) <= 2);
  CHECK(m(bx, by) > 0.0);
}

TEST_CASE("CCY alarms: constant map and single spike") {
  SpatialMap m(20, 20, 0.05, 0.05);
  for (double& v : m.values) v = 2.0;
  CHECK(ccy_alarms(m, 1.0, "L").empty());
  for (double& v : m.values) v = 0.0;
  m(13, 4) = 5.0;
  auto alarms = ccy_alarms(m, 1.0, "L");
  REQUIRE(alarms.size() == 1);
  CHECK(alarms[0].x_m == doctest::Approx(13 * 0.05));
  CHECK(alarms[0].y_m == doctest::Approx(4 * 0.05));
  CHECK(alarms[0].statistic == 5.0);
  CHECK(alarms[0].source == AlarmSource::CCY);
}

TEST_CASE("CCY alarms match the exhaustive window oracle and respect the tile bound") {
  Rng rng(28);
  for (int trial = 0; trial < 25; ++trial) {
    const int nx = 9 + static_cast<int>(rng.index(25)), ny = 9 + static_cast<int>(rng.index(25));
    auto m = random_map(rng, nx, ny);
    const double thr = rng.uniform(-0.5, 1.0);
    auto alarms = ccy_alarms(m, thr, "L");
    std::set<std::pair<int, int>> got;
    for (const auto& a : alarms)
      got.insert({static_cast<int>(std::lround(a.x_m / 0.05)), static_cast<int>(std::lround(a.y_m / 0.05))});
    REQUIRE(got == oracle::window_maxima(m, thr, 9));
    REQUIRE(static_cast<int>(alarms.size()) <= ((nx + 8) / 9) * ((ny + 8) / 9));
  }
}

// ---- rescale and merge --------------------------------------------------

TEST_CASE("identity rescale leaves statistics unchanged") {
  RescaleParams id;
  for (double s : {-3.5, -0.25, 0.0, 0.7, 12.0}) CHECK(id.apply(s) == s);
  RescaleParams p{10.0, 0.5, 0.0};
  CHECK(p.apply(4.0) == doctest::Approx(20.0));
  CHECK(p.apply(-4.0) == doctest::Approx(-20.0));
}

TEST_CASE("positive rescales keep the CCY-only ranking and ROC") {
  Rng rng(29);
  std::vector<Alarm> ccy;
  std::vector<GroundTruthEntry> truth;
  for (int i = 0; i < 6; ++i) truth.push_back({"L", 0.5 + i, 1.0});
  for (int i = 0; i < 30; ++i) ccy.push_back({"L", rng.uniform(0, 6), rng.uniform(0.5, 1.5), rng.uniform(0.01, 5), AlarmSource::CCY});
  auto base = roc(label_alarms(ccy, truth, 0.25).alarms, 6, 10.0);
  for (const auto& p : rescale_grid()) {
    auto r = roc(label_alarms(rescale_alarms(ccy, p), truth, 0.25).alarms, 6, 10.0);
    REQUIRE(r.points.size() == base.points.size());
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      REQUIRE(r.points[i].far_per_m2 == base.points[i].far_per_m2);
      REQUIRE(r.points[i].pd == base.points[i].pd);
    }
  }
}

namespace {

// Merge by the oracle's greedy pairing, then score with the oracle ROC.
double oracle_merged_auc(const std::vector<Alarm>& f2, const std::vector<Alarm>& ccy,
                         const std::vector<GroundTruthEntry>& truth, double area, double prox,
                         double halo) {
  auto pairs = oracle::greedy_pairs(f2, ccy, prox);
  std::vector<bool> uf(f2.size()), uc(ccy.size());
  std::vector<Alarm> merged;
  for (auto [i, j] : pairs) {
    uf[i] = uc[j] = true;
    const double wa = 0.5 * std::max(f2[i].statistic, 0.0), wb = 0.5 * std::max(ccy[j].statistic, 0.0);
    merged.push_back({"L", (wa * f2[i].x_m + wb * ccy[j].x_m) / (wa + wb),
                      (wa * f2[i].y_m + wb * ccy[j].y_m) / (wa + wb),
                      0.5 * f2[i].statistic + 0.5 * ccy[j].statistic});
  }
  for (std::size_t i = 0; i < f2.size(); ++i)
    if (!uf[i]) merged.push_back(f2[i]);
  for (std::size_t j = 0; j < ccy.size(); ++j)
    if (!uc[j]) merged.push_back(ccy[j]);
  std::vector<LabeledAlarm> labeled;
  for (const auto& a : merged) {
    LabeledAlarm la{a};
    double best = halo;
    for (std::size_t k = 0; k < truth.size(); ++k) {
      const double d = std::hypot(a.x_m - truth[k].x_m, a.y_m - truth[k].y_m);
      if (d <= best && (la.threat < 0 || d < best)) best = d, la.threat = static_cast<int>(k), la.hit = true;
    }
    labeled.push_back(la);
  }
  auto pts = oracle::roc_enumerate(labeled, static_cast<int>(truth.size()), area);
  const double hi = pts.back().far_per_m2;
  return hi > 0 ? oracle::auc_grid(pts, 0.0, hi) : pts.back().pd;
}

}  // namespace

TEST_CASE("rescale search on ten alarms matches exhaustive enumeration over the grid") {
  std::vector<GroundTruthEntry> truth{{"L", 1.0, 1.0}, {"L", 3.0, 1.0}, {"L", 5.0, 1.0}};
  std::vector<Alarm> f2{{"L", 1.05, 1.0, 0.9, AlarmSource::F2},
                        {"L", 2.0, 1.0, 1.4, AlarmSource::F2},
                        {"L", 3.1, 1.05, 0.6, AlarmSource::F2},
                        {"L", 6.5, 1.0, 2.5, AlarmSource::F2},
                        {"L", 8.0, 1.0, 1.1, AlarmSource::F2}};
  std::vector<Alarm> ccy{{"L", 1.0, 1.1, 3.0, AlarmSource::CCY},
                         {"L", 4.0, 1.0, 6.0, AlarmSource::CCY},
                         {"L", 5.0, 0.95, 0.05, AlarmSource::CCY},
                         {"L", 7.0, 1.0, 0.5, AlarmSource::CCY},
                         {"L", 3.0, 0.9, 0.2, AlarmSource::CCY}};
  const double area = 8.0, prox = 0.25, halo = 0.25;
  auto fit = fit_rescale(ccy, f2, truth, area, prox, {}, halo);
  CHECK_FALSE(fit.degenerate);

  double best = -1.0;
  RescaleParams arg;
  for (const auto& p : rescale_grid()) {
    const double a = oracle_merged_auc(f2, rescale_alarms(ccy, p), truth, area, prox, halo);
    if (a > best + 1e-12) best = a, arg = p;
  }
  CHECK(fit.auc == doctest::Approx(best).epsilon(1e-9));
  CHECK(fit.params.a == arg.a);
  CHECK(fit.params.b == arg.b);
  CHECK(fit.params.c == 0.0);
}

TEST_CASE("single-class rescale training returns the identity") {
  std::vector<GroundTruthEntry> truth{{"L", 1.0, 1.0}};
  std::vector<Alarm> far{{"L", 5.0, 5.0, 1.0, AlarmSource::CCY}};
  auto fit = fit_rescale(far, {}, truth, 10.0, 0.25, {}, 0.25);
  CHECK(fit.degenerate);
  CHECK(fit.params.a == 1.0);
  CHECK(fit.params.b == 1.0);
  CHECK(fit.params.c == 0.0);
}

TEST_CASE("merging distant alarms keeps the union") {
  std::vector<Alarm> f2{{"L", 0.0, 0.0, 1.0, AlarmSource::F2}, {"L", 2.0, 0.0, 2.0, AlarmSource::F2}};
  std::vector<Alarm> ccy{{"L", 0.0, 1.0, 3.0, AlarmSource::CCY}};
  auto out = merge_alarms(f2, ccy, 0.25);
  REQUIRE(out.size() == 3);
  std::multiset<double> stats;
  for (const auto& a : out) {
    stats.insert(a.statistic);
    CHECK(a.source == AlarmSource::FUSED_PRESCREEN);
  }
  CHECK(stats == std::multiset<double>{1.0, 2.0, 3.0});
}

TEST_CASE("a close F2/CCY pair averages its statistics") {
  std::vector<Alarm> f2{{"L", 1.0, 1.0, 2.0, AlarmSource::F2}};
  std::vector<Alarm> ccy{{"L", 1.1, 1.0, 4.0, AlarmSource::CCY}};
  auto out = merge_alarms(f2, ccy, 0.25, {0.5, 0.5});
  REQUIRE(out.size() == 1);
  CHECK(out[0].statistic == 3.0);
  CHECK(out[0].x_m == doctest::Approx((2.0 * 1.0 + 4.0 * 1.1) / 6.0));
  CHECK(out[0].source == AlarmSource::FUSED_PRESCREEN);
}

TEST_CASE("merging a chain of alarms follows greedy nearest pairing") {
  std::vector<Alarm> f2{{"L", 0.0, 0.0, 1.0, AlarmSource::F2}, {"L", 0.38, 0.0, 1.0, AlarmSource::F2}};
  std::vector<Alarm> ccy{{"L", 0.2, 0.0, 1.0, AlarmSource::CCY}};
  // A (f2) at 0, B (ccy) at 0.2, C (f2) at 0.38: B pairs with C.
  auto pairs = oracle::greedy_pairs(f2, ccy, 0.25);
  REQUIRE(pairs == std::vector<std::pair<int, int>>{{1, 0}});
  auto out = merge_alarms(f2, ccy, 0.25);
  REQUIRE(out.size() == 2);
  CHECK(out[0].x_m == 0.0);
  CHECK(out[1].x_m == doctest::Approx(0.29));

  Rng rng(30);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Alarm> a, b;
    for (int i = 0; i < 8; ++i) a.push_back({"L", rng.uniform(0, 2), rng.uniform(0, 1), rng.uniform(0.1, 2), AlarmSource::F2});
    for (int i = 0; i < 8; ++i) b.push_back({"L", rng.uniform(0, 2), rng.uniform(0, 1), rng.uniform(0.1, 2), AlarmSource::CCY});
    auto got = merge_alarms(a, b, 0.3);
    REQUIRE(got.size() == a.size() + b.size() - oracle::greedy_pairs(a, b, 0.3).size());
    for (std::size_t i = 1; i < got.size(); ++i)
      REQUIRE((got[i - 1].y_m < got[i].y_m || (got[i - 1].y_m == got[i].y_m && got[i - 1].x_m <= got[i].x_m)));
  }
}

TEST_CASE("merge errors") {
  std::vector<Alarm> none;
  CHECK_THROWS_AS(merge_alarms(none, none, -0.1), std::domain_error);
  CHECK_THROWS_AS(merge_alarms(none, none, 0.25, {0.7, 0.7}), std::domain_error);
}

TEST_CASE("fused list keeps an alarm within halo plus proximity of every hit threat") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<GroundTruthEntry> truth;
    for (int i = 0; i < 5; ++i) truth.push_back({"L", 1.0 + 2.0 * i, rng.uniform(0.5, 1.5)});
    std::vector<Alarm> f2, ccy;
    for (int i = 0; i < 12; ++i) {
      const auto& t = truth[rng.index(5)];
      f2.push_back({"L", t.x_m + rng.uniform(-0.3, 0.3), t.y_m + rng.uniform(-0.3, 0.3), rng.uniform(0.1, 3), AlarmSource::F2});
      ccy.push_back({"L", t.x_m + rng.uniform(-0.3, 0.3), t.y_m + rng.uniform(-0.3, 0.3), rng.uniform(0.1, 3), AlarmSource::CCY});
    }
    auto fused = merge_alarms(f2, ccy, 0.25);
    for (const auto& t : truth) {
      bool hit = false, kept = false;
      for (const auto* list : {&f2, &ccy})
        for (const auto& a : *list) hit = hit || std::hypot(a.x_m - t.x_m, a.y_m - t.y_m) <= 0.25;
      for (const auto& a : fused)
        kept = kept || std::hypot(a.x_m - t.x_m, a.y_m - t.y_m) <= 0.25 + 0.25;
      if (hit) REQUIRE(kept);
    }
  }
}
