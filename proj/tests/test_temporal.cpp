#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "pointproc/temporal.hpp"
#include "support/oracles.hpp"

using namespace pointproc;

namespace {

std::vector<double> bin_counts(const EventTimes& ev, double width, std::size_t bins) {
  std::vector<double> c(bins, 0.0);
  for (double t : ev.times()) {
    const auto b = std::min(bins - 1, static_cast<std::size_t>(t / width));
    c[b] += 1.0;
  }
  return c;
}

std::vector<double> vec(const EventTimes& ev) {
  return {ev.times().begin(), ev.times().end()};
}

}  // namespace

TEST(PoissonPmf, Examples) {
  EXPECT_NEAR(poisson_count_pmf(1, 0, 1, 0), std::exp(-1.0), 1e-15);
  unsigned mode = 0;
  double best = 0;
  for (unsigned n = 0; n < 30; ++n) {
    const double p = poisson_count_pmf(2, 0, 3, n);
    if (p > best) best = p, mode = n;
  }
  EXPECT_TRUE(mode == 5 || mode == 6);
  EXPECT_NEAR(poisson_count_pmf(2, 0, 3, 5), poisson_count_pmf(2, 0, 3, 6), 1e-15);
}

TEST(PoissonPmf, MeanEqualsVariance) {
  double total = 0, mean = 0, second = 0;
  for (unsigned n = 0; n < 60; ++n) {
    const double p = poisson_count_pmf(0.5, 1, 3, n);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    total += p;
    mean += n * p;
    second += double(n) * n * p;
  }
  EXPECT_NEAR(total, 1.0, 1e-14);
  EXPECT_NEAR(mean, 1.0, 1e-14);
  EXPECT_NEAR(second - mean * mean, 1.0, 1e-13);
}

TEST(PoissonPmf, Errors) {
  EXPECT_THROW(poisson_count_pmf(1, 2, 2, 0), IntervalError);
  EXPECT_THROW(poisson_count_pmf(1, 3, 2, 0), IntervalError);
  EXPECT_THROW(poisson_count_pmf(0, 0, 1, 0), ParameterError);
}

TEST(Hpp, Errors) {
  RngStream rng(1);
  EXPECT_THROW(simulate_hpp(0, 1, rng), ParameterError);
  EXPECT_THROW(simulate_hpp(1, 0, rng), ParameterError);
}

TEST(Hpp, TotalCountWithinThreeSigmaForNearlyAllSeeds) {
  int inside = 0;
  const int seeds = 300;
  for (int s = 0; s < seeds; ++s) {
    RngStream rng(1000 + s);
    const auto ev = simulate_hpp(2, 1000, rng);
    for (double t : ev.times()) ASSERT_LE(t, 1000.0);
    inside += std::abs(double(ev.size()) - 2000.0) <= 3 * std::sqrt(2000.0);
  }
  EXPECT_GE(inside, static_cast<int>(0.99 * seeds));
}

TEST(Hpp, InterArrivalsAreExponential) {
  RngStream rng(7);
  const auto q = inter_arrival_times(simulate_hpp(1, 1000, rng));
  const auto ks = oracle::ks_one_sample(q, [](double x) { return 1 - std::exp(-x); });
  EXPECT_GT(ks.p_value, 0.01);
}

TEST(Hpp, VanishingHorizonIsAlmostAlwaysEmpty) {
  int empty = 0;
  for (int s = 0; s < 100; ++s) {
    RngStream rng(s);
    empty += simulate_hpp(5, 1e-12, rng).size() == 0;
  }
  EXPECT_GE(empty, 99);
}

TEST(Hpp, SameSeedSameOutput) {
  RngStream a(5), b(5);
  EXPECT_EQ(vec(simulate_hpp(3, 50, a)), vec(simulate_hpp(3, 50, b)));
}

TEST(Hpp, MeanEqualsVarianceInUnitBins) {
  std::vector<double> all;
  for (int s = 0; s < 20; ++s) {
    RngStream rng(40 + s);
    const auto c = bin_counts(simulate_hpp(5, 200, rng), 1.0, 200);
    all.insert(all.end(), c.begin(), c.end());
  }
  const double ratio = oracle::variance_of(all) / oracle::mean_of(all);
  EXPECT_GE(ratio, 0.9);
  EXPECT_LE(ratio, 1.1);
}

TEST(Hpp, Memorylessness) {
  // Residual wait beyond elapsed r, from a fixed origin, in each replicate.
  const double r = 0.5;
  std::vector<double> residual, unconditional;
  for (int s = 0; s < 3000; ++s) {
    RngStream rng(9000 + s);
    const auto ev = simulate_hpp(1, 20, rng);
    const auto q = inter_arrival_times(ev);
    if (!q.empty() && q[0] > r) residual.push_back(q[0] - r);
    if (q.size() > 1) unconditional.push_back(q[1]);
  }
  ASSERT_GT(residual.size(), 1000u);
  EXPECT_GT(oracle::ks_two_sample(residual, unconditional).p_value, 0.01);
}

TEST(IntensityFn, EnvelopeViolationsFailConstruction) {
  EXPECT_THROW(IntensityFn([](double t) { return t; }, {{0, 2, 1.5}}), EnvelopeError);
  EXPECT_THROW(IntensityFn([](double) { return 1.0; }, {{0, 1, 1}, {1.5, 2, 1}}),
               EnvelopeError);
  EXPECT_THROW(IntensityFn([](double) { return 1.0; }, {{0.1, 1, 1}}), EnvelopeError);
  EXPECT_THROW(IntensityFn([](double) { return -1.0; }, {{0, 1, 1}}), ParameterError);
  EXPECT_NO_THROW(IntensityFn([](double t) { return t; }, {{0, 1, 1}, {1, 2, 2}}));
}

TEST(IntensityFn, Factories) {
  const auto s = IntensityFn::sinusoid(3, 2, 24, 96);
  EXPECT_DOUBLE_EQ(s.horizon(), 96.0);
  EXPECT_NEAR(s(6), 5.0, 1e-12);
  EXPECT_NEAR(s.max_envelope(), 5.0, 1e-9);
  EXPECT_THROW(IntensityFn::sinusoid(1, 2, 24, 96), ParameterError);
  const auto p = IntensityFn::piecewise_linear({{0, 1}, {2, 3}, {4, 0}});
  EXPECT_DOUBLE_EQ(p(1), 2.0);
  EXPECT_DOUBLE_EQ(p(3), 1.5);
  EXPECT_THROW(IntensityFn::piecewise_linear({{1, 1}, {2, 3}}), ParameterError);
}

TEST(Nhpp, MeanExamples) {
  EXPECT_NEAR(nhpp_mean(IntensityFn::constant(2, 5), 0, 5), 10.0, 1e-9);
  const IntensityFn lin([](double t) { return t; }, {{0, 2, 2}});
  EXPECT_NEAR(nhpp_mean(lin, 0, 2), 2.0, 1e-9);
  EXPECT_NEAR(nhpp_mean(IntensityFn::sinusoid(3, 2, 24, 24), 0, 24), 72.0, 1e-6);
  // Increment mean integrates from t, not from the origin.
  EXPECT_NEAR(nhpp_mean(lin, 1, 2), 1.5, 1e-9);
}

TEST(Nhpp, MeanErrors) {
  const auto c = IntensityFn::constant(2, 5);
  EXPECT_THROW(nhpp_mean(c, 2, 2), IntervalError);
  EXPECT_THROW(nhpp_mean(c, 3, 2), IntervalError);
  EXPECT_THROW(nhpp_mean(c, 1, 6), IntervalError);
}

TEST(Nhpp, ZeroIntensityIsEmpty) {
  RngStream rng(3);
  EXPECT_EQ(simulate_nhpp(IntensityFn::constant(0, 10), 10, rng).size(), 0u);
}

TEST(Nhpp, RuntimeEnvelopeViolationAborts) {
  // Passes the construction samples, then misbehaves once simulation starts.
  auto armed = std::make_shared<bool>(false);
  const IntensityFn bad([armed](double) { return *armed ? 5.0 : 1.0; }, {{0, 100, 1}});
  *armed = true;
  RngStream rng(3);
  EXPECT_THROW(simulate_nhpp(bad, 100, rng), EnvelopeError);
}

TEST(Nhpp, ConstantRateMatchesHppCounts) {
  // Chi-square on 20-bin counts pooled over 500 replicates, against the
  // HPP expectation rate * width per bin.
  const double rate = 2, horizon = 20;
  std::vector<double> obs(20, 0.0);
  std::vector<double> hpp_gaps, nhpp_gaps;
  for (int s = 0; s < 500; ++s) {
    RngStream rng(s), rng2(100000 + s);
    const auto ev = simulate_nhpp(IntensityFn::constant(rate, horizon), horizon, rng);
    const auto c = bin_counts(ev, 1.0, 20);
    for (std::size_t b = 0; b < 20; ++b) obs[b] += c[b];
    const auto q = inter_arrival_times(ev);
    nhpp_gaps.insert(nhpp_gaps.end(), q.begin(), q.end());
    const auto h = inter_arrival_times(simulate_hpp(rate, horizon, rng2));
    hpp_gaps.insert(hpp_gaps.end(), h.begin(), h.end());
  }
  const std::vector<double> expected(20, 500 * rate * 1.0);
  EXPECT_GT(oracle::chi_square_gof(obs, expected).p_value, 0.01);
  EXPECT_GT(oracle::ks_two_sample(nhpp_gaps, hpp_gaps).p_value, 0.01);
}

TEST(Nhpp, IndependentIncrements) {
  const auto f = IntensityFn::sinusoid(3, 2, 24, 48);
  std::vector<double> a, b;
  for (int s = 0; s < 1000; ++s) {
    RngStream rng(500 + s);
    const auto ev = simulate_nhpp(f, 48, rng);
    a.push_back(double(ev.count(12)));
    b.push_back(double(ev.count(36) - ev.count(24)));
  }
  EXPECT_NEAR(oracle::pearson(a, b), 0.0, 0.05);
}

TEST(Hawkes, IntensityExamples) {
  const HawkesModel e(0.7, ExponentialKernel{0.5, 1});
  EXPECT_DOUBLE_EQ(hawkes_intensity(e, EventTimes({}, 5), 2), 0.7);
  EXPECT_NEAR(hawkes_intensity(e, EventTimes({1}, 5), 1 + std::log(2.0)), 0.95, 1e-15);
  const HawkesModel p(0.7, PowerLawKernel{1, 1, 1});
  // History [0] is outside (0, T]; a tiny offset keeps the time valid.
  EXPECT_NEAR(hawkes_intensity(p, EventTimes({1e-300}, 5), 1), 0.95, 1e-12);
}

TEST(Hawkes, IntensityUsesLeftLimitAndJumpsByAlpha) {
  const HawkesModel m(1, ExponentialKernel{0.8, 2});
  const EventTimes h({1, 2}, 5);
  EXPECT_DOUBLE_EQ(hawkes_intensity(m, h, 1), 1.0);
  const double left = hawkes_intensity(m, h, 2);
  const double right = hawkes_intensity(m, h, std::nextafter(2.0, 3.0));
  EXPECT_NEAR(right - left, 0.8, 1e-12);
  for (double t = 0.01; t < 5; t += 0.01) EXPECT_GE(hawkes_intensity(m, h, t), 1.0);
}

TEST(Hawkes, BranchingClosedForms) {
  auto b = branching_factor(HawkesModel(1, ExponentialKernel{0.5, 1}));
  EXPECT_NEAR(b.n_star, 0.5, 1e-12);
  EXPECT_EQ(b.regime, Regime::subcritical);
  b = branching_factor(HawkesModel(1, PowerLawKernel{1, 2, 1}));
  EXPECT_NEAR(b.n_star, 0.5, 1e-12);
  EXPECT_EQ(b.regime, Regime::subcritical);
  b = branching_factor(HawkesModel(1, ExponentialKernel{2, 1}));
  EXPECT_NEAR(b.n_star, 2.0, 1e-12);
  EXPECT_EQ(b.regime, Regime::supercritical);
  EXPECT_EQ(branching_factor(HawkesModel(1, ExponentialKernel{1, 1})).regime,
            Regime::critical);
}

TEST(Hawkes, ExpectedClusterSize) {
  EXPECT_NEAR(expected_cluster_size(0.5), 2.0, 1e-12);
  EXPECT_NEAR(expected_cluster_size(0.0), 1.0, 1e-12);
  EXPECT_THROW(expected_cluster_size(1.0), UnboundedRegimeError);
  EXPECT_THROW(expected_cluster_size(3.0), UnboundedRegimeError);
}

TEST(Hawkes, SimulationErrors) {
  RngStream rng(1);
  EXPECT_THROW(simulate_hawkes(HawkesModel(1, PowerLawKernel{1, 2, 1}), 10, rng),
               UnsupportedKernelError);
  EXPECT_THROW(simulate_hawkes(HawkesModel(0, ExponentialKernel{0.5, 1}), 10, rng),
               ParameterError);
  EXPECT_THROW(simulate_hawkes(HawkesModel(1, ExponentialKernel{0.5, 1}), 0, rng),
               ParameterError);
}

TEST(Hawkes, SupercriticalWarnsAndRespectsBudget) {
  std::vector<std::string> warnings;
  HawkesSimOptions opt;
  opt.warn = [&](const std::string& w) { warnings.push_back(w); };
  RngStream rng(2);
  const auto ev = simulate_hawkes(HawkesModel(1, ExponentialKernel{2, 1}), 3, rng, opt);
  EXPECT_EQ(warnings.size(), 1u);
  for (double t : ev.times()) EXPECT_LE(t, 3.0);

  opt.max_events = 1000;
  RngStream rng2(2);
  EXPECT_THROW(simulate_hawkes(HawkesModel(1, ExponentialKernel{2, 1}), 100, rng2, opt),
               BudgetError);
}

TEST(Hawkes, NoExcitationReducesToHpp) {
  std::vector<double> hk, hp;
  for (int s = 0; s < 20; ++s) {
    RngStream a(s), b(50 + s);
    const auto q1 = inter_arrival_times(
        simulate_hawkes(HawkesModel(2, ExponentialKernel{0, 1}), 500, a));
    const auto q2 = inter_arrival_times(simulate_hpp(2, 500, b));
    hk.insert(hk.end(), q1.begin(), q1.end());
    hp.insert(hp.end(), q2.begin(), q2.end());
  }
  EXPECT_GT(oracle::ks_two_sample(hk, hp).p_value, 0.01);
  EXPECT_GT(oracle::ks_one_sample(hk, [](double x) { return 1 - std::exp(-2 * x); }).p_value,
            0.01);
}

TEST(Hawkes, SelfExcitationOverdisperses) {
  std::vector<double> all;
  for (int s = 0; s < 100; ++s) {
    RngStream rng(700 + s);
    const auto c =
        bin_counts(simulate_hawkes(HawkesModel(1, ExponentialKernel{0.8, 1}), 100, rng), 1, 100);
    all.insert(all.end(), c.begin(), c.end());
  }
  EXPECT_GT(oracle::variance_of(all), oracle::mean_of(all));
}

TEST(Hawkes, SameSeedSameOutput) {
  const HawkesModel m(1, ExponentialKernel{0.5, 1});
  RngStream a(77), b(77);
  EXPECT_EQ(vec(simulate_hawkes(m, 200, a)), vec(simulate_hawkes(m, 200, b)));
}
