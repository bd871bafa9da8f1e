#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "pointproc/core.hpp"

namespace pointproc {

// Pr{N(a, b] = n} for a homogeneous Poisson process of the given rate.
double poisson_count_pmf(double rate, double a, double b, unsigned n);

// Homogeneous Poisson process on (0, horizon] from cumulative exponential
// inter-arrival times. The first arrival past the horizon is discarded.
EventTimes simulate_hpp(double rate, double horizon, RngStream& rng);

// One piece of a piecewise-constant dominating rate.
struct EnvelopeSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  double rate = 0.0;
};

// Time-varying intensity lambda(t) together with a piecewise-constant upper
// bound covering [0, horizon]. Construction samples lambda densely on every
// segment and rejects envelopes that are violated anywhere on the samples.
class IntensityFn {
 public:
  using Function = std::function<double(double)>;

  static constexpr std::size_t kSamplesPerSegment = 1000;

  IntensityFn(Function lambda, std::vector<EnvelopeSegment> envelope);

  static IntensityFn constant(double rate, double horizon);
  // Linear interpolation between (time, rate) knots; knots[0].first must be
  // 0 and times strictly increasing. Each knot interval is one segment.
  static IntensityFn piecewise_linear(
      std::vector<std::pair<double, double>> knots);
  // base + amplitude * sin(2*pi*t / period), requires base >= |amplitude|.
  // The envelope uses `segments_per_period` pieces per period, each bounded
  // by the exact supremum of the sinusoid on that piece.
  static IntensityFn sinusoid(double base, double amplitude, double period,
                              double horizon,
                              std::size_t segments_per_period = 8);

  double operator()(double t) const { return lambda_(t); }
  const std::vector<EnvelopeSegment>& envelope() const noexcept {
    return envelope_;
  }
  double horizon() const noexcept { return envelope_.back().t_end; }
  double max_envelope() const noexcept;

 private:
  Function lambda_;
  std::vector<EnvelopeSegment> envelope_;
};

// Non-homogeneous Poisson process by piecewise thinning. Throws
// EnvelopeError if lambda(s) exceeds the segment bound at any candidate.
EventTimes simulate_nhpp(const IntensityFn& intensity, double horizon,
                         RngStream& rng);

// Lambda(t1, t2), the integral of the intensity over [t1, t2], by adaptive
// Simpson quadrature on each envelope segment.
double nhpp_mean(const IntensityFn& intensity, double t1, double t2);

struct ExponentialKernel {
  double alpha = 0.0;
  double beta = 1.0;
};

struct PowerLawKernel {
  double alpha = 0.0;
  double delta = 1.0;
  double eta = 1.0;
};

using HawkesKernel = std::variant<ExponentialKernel, PowerLawKernel>;

class HawkesModel {
 public:
  HawkesModel(double mu, HawkesKernel kernel);

  double mu() const noexcept { return mu_; }
  const HawkesKernel& kernel() const noexcept { return kernel_; }
  // phi(x) for x > 0.
  double kernel_value(double x) const noexcept;

 private:
  double mu_;
  HawkesKernel kernel_;
};

// lambda(t | H_t) = mu + sum over T_i < t of phi(t - T_i).
double hawkes_intensity(const HawkesModel& model, const EventTimes& history,
                        double t);

enum class Regime { subcritical, critical, supercritical };

const char* to_string(Regime r) noexcept;

struct Branching {
  double n_star = 0.0;
  Regime regime = Regime::subcritical;
};

Branching branching_factor(const HawkesModel& model);

// 1 / (1 - n*), the expected size of a cluster rooted at one immigrant.
double expected_cluster_size(double n_star);

using WarningSink = std::function<void(const std::string&)>;

struct HawkesSimOptions {
  // Upper bound on accepted events; exceeding it throws BudgetError.
  std::size_t max_events = 10'000'000;
  WarningSink warn;
};

// Ogata thinning for an exponential-kernel Hawkes process on (0, horizon].
EventTimes simulate_hawkes(const HawkesModel& model, double horizon,
                           RngStream& rng, const HawkesSimOptions& opts = {});

}  // namespace pointproc
