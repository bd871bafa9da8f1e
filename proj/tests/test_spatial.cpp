#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pointproc/spatial.hpp"
#include "support/oracles.hpp"

using namespace pointproc;

namespace {

const Region unit(0, 1, 0, 1);

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = a + (b - a) * double(i) / double(n - 1);
  return r;
}

SpatialPattern uniform_points(RngStream& rng, std::size_t n, const Region& r = unit) {
  std::vector<Point> p(n);
  for (auto& q : p) q = {rng.uniform(r.xmin, r.xmax), rng.uniform(r.ymin, r.ymax)};
  return SpatialPattern(std::move(p), r);
}

}  // namespace

TEST(Csr, CountWithinThreeSigma) {
  int inside = 0;
  for (int s = 0; s < 300; ++s) {
    RngStream rng(s);
    inside += std::abs(double(simulate_csr(100, unit, rng).size()) - 100.0) <= 30.0;
  }
  EXPECT_GE(inside, 297);
}

TEST(Csr, CountsArePoisson) {
  std::vector<long> counts;
  for (int s = 0; s < 1000; ++s) {
    RngStream rng(20000 + s);
    counts.push_back(long(simulate_csr(20, Region(0, 2, 0, 0.5), rng).size()));
  }
  EXPECT_GT(oracle::poisson_gof(counts, 20).p_value, 0.01);
}

TEST(Csr, VanishingMeanAndDeterminism) {
  int empty = 0;
  for (int s = 0; s < 100; ++s) {
    RngStream rng(s);
    empty += simulate_csr(1e-9, unit, rng).size() == 0;
  }
  EXPECT_GE(empty, 99);
  RngStream a(1), b(1), c(2);
  const auto pa = simulate_csr(50, unit, a), pb = simulate_csr(50, unit, b),
             pc = simulate_csr(50, unit, c);
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa.points()[i], pb.points()[i]);
  EXPECT_FALSE(pa.size() == pc.size() && pa.points()[0] == pc.points()[0]);
  EXPECT_THROW(simulate_csr(0, unit, a), ParameterError);
}

TEST(Kde, SinglePointFixture) {
  const GridSpec g(unit, 10, 10);
  const SpatialPattern p({{0.35, 0.55}}, unit);
  const double d = 0.04;
  const auto s = kde_surface(p, g, d);
  const double peak = 1.0 / (std::numbers::pi * d * d);
  for (std::size_t iy = 0; iy < 10; ++iy) {
    for (std::size_t ix = 0; ix < 10; ++ix) {
      EXPECT_EQ(s.at(ix, iy), ix == 3 && iy == 5 ? peak : 0.0);
    }
  }
}

TEST(Kde, EmptyPatternIsZero) {
  const auto s = kde_surface(SpatialPattern({}, unit), GridSpec(unit, 5, 4), 0.1);
  for (double v : s.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(s.values.size(), 20u);
}

TEST(Kde, MatchesDirectCount) {
  RngStream rng(5);
  const auto p = uniform_points(rng, 150);
  const GridSpec g(unit, 17, 13);
  const double d = 0.09;
  const auto s = kde_surface(p, g, d);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    std::size_t k = 0;
    for (const auto& q : p.points()) k += oracle::bf_distance(g.center(g.unflat(c)), q) <= d;
    EXPECT_EQ(s.values[c], double(k) / (std::numbers::pi * d * d));
  }
}

TEST(Kde, InteriorMeanMatchesIntensity) {
  const double lambda = 500, d = 0.05;
  const GridSpec g(unit, 50, 50);
  double sum = 0;
  std::size_t cells = 0;
  for (int s = 0; s < 100; ++s) {
    RngStream rng(300 + s);
    const auto surf = kde_surface(simulate_csr(lambda, unit, rng), g, d);
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
      if (unit.boundary_distance(g.center(g.unflat(c))) < d) continue;
      sum += surf.values[c];
      ++cells;
    }
  }
  EXPECT_NEAR(sum / double(cells), lambda, 0.1 * lambda);
}

TEST(Quadrat, HandExamples) {
  std::vector<Point> one(100, Point{0.1, 0.1});
  const auto q = quadrat_counts(SpatialPattern(one, unit), GridSpec(unit, 2, 2));
  EXPECT_DOUBLE_EQ(q.chi_square, 300.0);
  EXPECT_EQ(q.df, 3u);
  EXPECT_EQ(q.counts.at(0, 0), 100);

  const auto e = quadrat_counts(
      SpatialPattern({{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}}, unit),
      GridSpec(unit, 2, 2));
  EXPECT_EQ(e.chi_square, 0.0);
  EXPECT_NEAR(e.p_value, 1.0, 1e-12);
}

TEST(Quadrat, Degenerate) {
  EXPECT_THROW(quadrat_counts(SpatialPattern({{0.5, 0.5}}, unit), GridSpec(unit, 1, 1)),
               DegenerateError);
  EXPECT_THROW(quadrat_counts(SpatialPattern({}, unit), GridSpec(unit, 2, 2)),
               DegenerateError);
}

TEST(Quadrat, NullPValuesAreUniform) {
  std::vector<double> p;
  for (int s = 0; s < 500; ++s) {
    RngStream rng(4000 + s);
    p.push_back(quadrat_counts(simulate_csr(200, unit, rng), GridSpec(unit, 5, 5)).p_value);
  }
  EXPECT_GT(oracle::ks_one_sample(p, [](double x) { return x; }).p_value, 0.01);
}

TEST(Dispersion, EqualCountsGiveZero) {
  std::vector<Point> pts;
  const GridSpec g(unit, 4, 4);
  for (std::size_t c = 0; c < 16; ++c) {
    pts.push_back(g.center(g.unflat(c)));
    pts.push_back(g.center(g.unflat(c)));
  }
  const std::vector<std::size_t> blocks{1, 2};
  for (const auto& d : dispersion_by_block(SpatialPattern(pts, unit), g, blocks)) {
    EXPECT_EQ(d.index, 0.0);
  }
}

TEST(Dispersion, Errors) {
  RngStream rng(1);
  const auto p = uniform_points(rng, 50);
  const std::vector<std::size_t> bad{3};
  EXPECT_THROW(dispersion_by_block(p, GridSpec(unit, 4, 4), bad), ParameterError);
}

TEST(Dispersion, CsrNearOneAndClustersStandOut) {
  const GridSpec g(unit, 8, 8);
  const std::vector<std::size_t> blocks{1, 2, 4};
  std::vector<std::vector<double>> reps(blocks.size());
  for (int s = 0; s < 200; ++s) {
    RngStream rng(s);
    const auto d = dispersion_by_block(simulate_csr(300, unit, rng), g, blocks);
    for (std::size_t b = 0; b < blocks.size(); ++b) reps[b].push_back(d[b].index);
  }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    EXPECT_NEAR(oracle::mean_of(reps[b]), 1.0, 0.1) << "block " << blocks[b];
  }
  RngStream rng(77);
  const auto clustered = oracle::clustered_fixture(rng, unit, 6, 50, 0.01);
  const auto d = dispersion_by_block(clustered, g, blocks);
  EXPECT_GT(d[0].index, *std::max_element(reps[0].begin(), reps[0].end()));
}

TEST(GFunction, Examples) {
  const SpatialPattern two({{0.25, 0.5}, {0.75, 0.5}}, unit);
  const std::vector<double> r{0.3, 0.4999, 0.5, 0.9};
  const auto g = g_function(two, r);
  EXPECT_EQ(g, (std::vector<double>{0, 0, 1, 1}));
  EXPECT_THROW(g_function(SpatialPattern({{0.1, 0.1}}, unit), r), InsufficientDataError);

  RngStream rng(3);
  const auto p = uniform_points(rng, 60);
  const std::vector<double> diag{std::sqrt(2.0)};
  EXPECT_EQ(g_function(p, diag)[0], 1.0);
}

TEST(FFunction, SingleEventAtCentre) {
  const SpatialPattern p({{0.5, 0.5}}, unit);
  const GridSpec probes(unit, 20, 20);
  const auto r = linspace(0.05, 0.5, 10);
  EXPECT_EQ(f_function(p, probes, r), oracle::bf_f(p, probes, r));
  const std::vector<double> diam{std::sqrt(2.0)};
  EXPECT_EQ(f_function(p, probes, diam)[0], 1.0);
  EXPECT_THROW(f_function(SpatialPattern({}, unit), probes, r), InsufficientDataError);
}

TEST(MeanMinDistance, Examples) {
  const Region line(0, 3, -1, 1);
  EXPECT_DOUBLE_EQ(mean_min_distance(SpatialPattern({{0, 0}, {1, 0}, {3, 0}}, line)),
                   4.0 / 3.0);
  const SpatialPattern same({{0.3, 0.3}, {0.3, 0.3}, {0.3, 0.3}}, unit);
  EXPECT_EQ(mean_min_distance(same), 0.0);
  EXPECT_EQ(nni(same), 0.0);
  EXPECT_THROW(mean_min_distance(SpatialPattern({{0.1, 0.1}}, unit)), InsufficientDataError);
  EXPECT_THROW(nni(SpatialPattern({}, unit)), InsufficientDataError);
}

TEST(Nni, CsrCalibration) {
  int inside = 0;
  for (int s = 0; s < 500; ++s) {
    RngStream rng(8000 + s);
    const double v = nni(simulate_csr(200, unit, rng));
    inside += v >= 0.9 && v <= 1.1;
  }
  EXPECT_GE(inside, 475);
}

TEST(Nni, HexLatticeApproachesPackingLimit) {
  // Unit spacing: density 2/sqrt(3), so d_min / (1 / (2 sqrt(density))).
  const double limit = 2.0 * std::sqrt(2.0 / std::sqrt(3.0));
  EXPECT_NEAR(limit, 2.1491, 1e-4);
  for (double a : {0.02, 0.01, 0.005}) {
    EXPECT_NEAR(nni(oracle::hex_lattice(unit, a)), limit, 0.01) << "spacing " << a;
  }
}

TEST(RipleysK, Examples) {
  const SpatialPattern two({{0.2, 0.5}, {0.8, 0.5}}, unit);
  const std::vector<double> r{0.5};
  EXPECT_EQ(ripleys_k(two, r)[0], 0.0);
  // Border correction: no event is 0.6 from the boundary.
  const std::vector<double> r2{0.1, 0.6};
  const auto k = ripleys_k(two, r2, EdgeCorrection::border);
  EXPECT_EQ(k[0], 0.0);
  EXPECT_TRUE(std::isnan(k[1]));
}

TEST(BruteForce, AllStatisticsMatchExactly) {
  const auto radii = linspace(0.005, 0.25, 25);
  const GridSpec probes(unit, 23, 19);
  for (int s = 0; s < 100; ++s) {
    RngStream rng(600 + s);
    const std::size_t n = 2 + rng.index(199);
    const auto p = s % 3 == 0 ? oracle::clustered_fixture(rng, unit, 1 + n / 20, 20, 0.02)
                              : uniform_points(rng, n);
    const auto pts = p.points();
    EXPECT_EQ(nearest_neighbour_distances(p), oracle::bf_nn_distances(pts));
    EXPECT_EQ(mean_min_distance(p), oracle::bf_mean_min_distance(pts));
    EXPECT_EQ(g_function(p, radii), oracle::bf_g(p, radii));
    EXPECT_EQ(f_function(p, probes, radii), oracle::bf_f(p, probes, radii));
    const auto k = ripleys_k(p, radii);
    EXPECT_EQ(k, oracle::bf_k(p, radii, false));
    const auto kb = ripleys_k(p, radii, EdgeCorrection::border);
    const auto kb_ref = oracle::bf_k(p, radii, true);
    for (std::size_t j = 0; j < radii.size(); ++j) {
      if (std::isnan(kb_ref[j])) {
        EXPECT_TRUE(std::isnan(kb[j]));
      } else {
        EXPECT_EQ(kb[j], kb_ref[j]);
      }
    }
  }
}

TEST(BruteForce, DuplicatePointsAllowed) {
  const SpatialPattern p({{0.5, 0.5}, {0.5, 0.5}, {0.9, 0.9}}, unit);
  const auto d = nearest_neighbour_distances(p);
  EXPECT_EQ(d, oracle::bf_nn_distances(p.points()));
  EXPECT_EQ(d[0], 0.0);
}

TEST(Curves, MonotoneAndBounded) {
  RngStream rng(9);
  const auto p = simulate_csr(150, unit, rng);
  const auto r = linspace(0.0, 0.3, 40);
  const auto g = g_function(p, r);
  const auto f = f_function(p, GridSpec(unit, 30, 30), r);
  const auto k = ripleys_k(p, linspace(1e-9, 0.3, 40));
  for (std::size_t j = 0; j < r.size(); ++j) {
    EXPECT_GE(g[j], 0.0);
    EXPECT_LE(g[j], 1.0);
    EXPECT_GE(f[j], 0.0);
    EXPECT_LE(f[j], 1.0);
    if (j > 0) {
      EXPECT_GE(g[j], g[j - 1]);
      EXPECT_GE(f[j], f[j - 1]);
      EXPECT_GE(k[j], k[j - 1]);
    }
  }
  EXPECT_EQ(k[0], 0.0);
}

TEST(Invariance, TranslationAndRotation) {
  RngStream rng(31);
  // Points inside the inscribed disc so any rotation about the centre stays
  // inside the same square.
  std::vector<Point> pts;
  while (pts.size() < 120) {
    const Point q{rng.uniform(), rng.uniform()};
    if (std::hypot(q.x - 0.5, q.y - 0.5) < 0.5) pts.push_back(q);
  }
  const SpatialPattern base(pts, unit);
  const auto r = linspace(0.01, 0.2, 20);
  const double th = 0.7;
  std::vector<Point> rot, shift;
  for (const auto& q : pts) {
    const double dx = q.x - 0.5, dy = q.y - 0.5;
    rot.push_back({0.5 + dx * std::cos(th) - dy * std::sin(th),
                   0.5 + dx * std::sin(th) + dy * std::cos(th)});
    shift.push_back({q.x + 12.5, q.y - 3.25});
  }
  const SpatialPattern rp(rot, unit), sp(shift, Region(12.5, 13.5, -3.25, -2.25));
  for (const auto* p : {&rp, &sp}) {
    EXPECT_NEAR(mean_min_distance(*p), mean_min_distance(base), 1e-9);
    EXPECT_NEAR(nni(*p), nni(base), 1e-9);
    const auto g0 = g_function(base, r), g1 = g_function(*p, r);
    const auto k0 = ripleys_k(base, r), k1 = ripleys_k(*p, r);
    for (std::size_t j = 0; j < r.size(); ++j) {
      EXPECT_NEAR(g1[j], g0[j], 1e-9);
      EXPECT_NEAR(k1[j], k0[j], 1e-9);
    }
  }
}

TEST(Invariance, Scaling) {
  RngStream rng(32);
  const auto p = uniform_points(rng, 90);
  const double c = 3.7;
  std::vector<Point> scaled;
  for (const auto& q : p.points()) scaled.push_back({q.x * c, q.y * c});
  const SpatialPattern sp(scaled, Region(0, c, 0, c));
  EXPECT_NEAR(mean_min_distance(sp), c * mean_min_distance(p), 1e-9);
  EXPECT_NEAR(nni(sp), nni(p), 1e-9);
}

TEST(Envelope, BoundsAreExtremesOfReplicates) {
  RngStream rng(1);
  const auto p = simulate_csr(80, unit, rng);
  const auto r = linspace(0.01, 0.15, 8);
  StatisticConfig cfg{Statistic::G};
  RngStream env_rng(55);
  const auto env = csr_envelope(p, cfg, r, 19, env_rng);
  EXPECT_EQ(env.nsim, 19u);
  EXPECT_EQ(env.observed, g_function(p, r));

  // Recompute the 19 curves by hand from the documented stream derivation.
  RngStream again(55);
  const auto base = again.next_u64();
  std::vector<double> lo(r.size(), 2), hi(r.size(), -1);
  for (std::size_t i = 0; i < 19; ++i) {
    auto s = RngStream::derived(base, i);
    const auto c = g_function(simulate_csr(p.intensity(), unit, s), r);
    for (std::size_t j = 0; j < r.size(); ++j) {
      lo[j] = std::min(lo[j], c[j]);
      hi[j] = std::max(hi[j], c[j]);
    }
  }
  EXPECT_EQ(env.lower, lo);
  EXPECT_EQ(env.upper, hi);
  for (std::size_t j = 0; j < r.size(); ++j) EXPECT_LE(env.lower[j], env.upper[j]);

  RngStream bad(1);
  EXPECT_THROW(csr_envelope(p, cfg, r, 18, bad), ParameterError);
}

TEST(Envelope, ThreadCountDoesNotChangeResult) {
  RngStream rng(2);
  const auto p = simulate_csr(100, unit, rng);
  const auto r = linspace(0.01, 0.1, 10);
  StatisticConfig cfg{Statistic::K, EdgeCorrection::border};
  RngStream a(9), b(9);
  const auto e1 = csr_envelope(p, cfg, r, 39, a, 1);
  const auto e4 = csr_envelope(p, cfg, r, 39, b, 4);
  EXPECT_EQ(e1.lower, e4.lower);
  EXPECT_EQ(e1.upper, e4.upper);
}

TEST(Envelope, CsrEscapeRateNearNominal) {
  // Rank-1 envelope of 99 replicates: pointwise escape probability 2/100.
  const auto r = linspace(0.01, 0.1, 10);
  StatisticConfig cfg{Statistic::G};
  std::size_t escapes = 0, total = 0;
  for (int t = 0; t < 100; ++t) {
    RngStream rng(12000 + t);
    const auto p = simulate_csr(100, unit, rng);
    const auto env = csr_envelope(p, cfg, r, 99, rng);
    for (std::size_t j = 0; j < r.size(); ++j, ++total) {
      escapes += env.observed[j] < env.lower[j] || env.observed[j] > env.upper[j];
    }
  }
  EXPECT_LE(double(escapes) / double(total), 0.03);
}

TEST(Envelope, CsrGStaysInsideForMostInteriorRadii) {
  RngStream rng(41);
  const auto p = simulate_csr(100, unit, rng);
  const auto r = linspace(0.01, 0.1, 20);
  const auto env = csr_envelope(p, StatisticConfig{Statistic::G}, r, 199, rng);
  std::size_t in = 0;
  for (std::size_t j = 0; j < r.size(); ++j) {
    in += env.observed[j] >= env.lower[j] && env.observed[j] <= env.upper[j];
  }
  EXPECT_GE(double(in) / double(r.size()), 0.95);
}

TEST(Envelope, CsrBorderKInsideAroundDiscArea) {
  RngStream rng(42);
  const auto p = simulate_csr(100, unit, rng);
  const auto r = linspace(0.01, 0.1, 10);
  const auto env = csr_envelope(p, StatisticConfig{Statistic::K, EdgeCorrection::border},
                                r, 199, rng);
  for (std::size_t j = 0; j < r.size(); ++j) {
    const double disc = std::numbers::pi * r[j] * r[j];
    EXPECT_LE(env.lower[j], disc);
    EXPECT_GE(env.upper[j], disc);
  }
  // Whether the observed curve escapes is a per-pattern coin flip; the pooled
  // escape rate is checked by the acceptance suite.
}

TEST(Envelope, ClusteredKAboveAndClusteredFBelow) {
  RngStream rng(43);
  const auto p = oracle::clustered_fixture(rng, unit, 8, 25, 0.015);
  const auto r = linspace(0.01, 0.05, 5);
  const auto k = csr_envelope(p, StatisticConfig{Statistic::K}, r, 199, rng);
  for (std::size_t j = 0; j < r.size(); ++j) EXPECT_GT(k.observed[j], k.upper[j]);

  // Mid radii for F: clustered empty space is larger.
  const auto rf = linspace(0.03, 0.08, 6);
  const auto f = csr_envelope(p, StatisticConfig{Statistic::F}, rf, 199, rng);
  RngStream rng2(44);
  std::vector<double> mean(rf.size(), 0.0);
  for (int i = 0; i < 199; ++i) {
    const auto c = f_function(simulate_csr(p.intensity(), unit, rng2), GridSpec(unit, 50, 50), rf);
    for (std::size_t j = 0; j < rf.size(); ++j) mean[j] += c[j] / 199.0;
  }
  for (std::size_t j = 0; j < rf.size(); ++j) EXPECT_LE(f.observed[j], mean[j]);
}

TEST(Envelope, RegularGFallsBelowAtSmallRadius) {
  RngStream rng(45);
  const auto p = oracle::regular_fixture(rng, unit, 10, 0.1);
  const std::vector<double> r{0.02, 0.04, 0.06};
  const auto env = csr_envelope(p, StatisticConfig{Statistic::G}, r, 99, rng);
  for (std::size_t j = 0; j < r.size(); ++j) EXPECT_LT(env.observed[j], env.lower[j]);
}
