#include "pointproc/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace pointproc {

double poisson_count_pmf(double rate, double a, double b, unsigned n) {
  if (!(rate > 0.0)) throw ParameterError("rate must be positive");
  if (!(a >= 0.0) || !(b > a)) {
    throw IntervalError("count interval requires 0 <= a < b");
  }
  const double mean = rate * (b - a);
  const double k = static_cast<double>(n);
  if (n == 0) return std::exp(-mean);
  return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

EventTimes simulate_hpp(double rate, double horizon, RngStream& rng) {
  if (!(rate > 0.0)) throw ParameterError("rate must be positive");
  if (!(horizon > 0.0)) throw ParameterError("horizon must be positive");
  std::vector<double> times;
  double t = 0.0;
  while (true) {
    t += exponential_draw(rng, rate);
    if (t > horizon) break;
    times.push_back(t);
  }
  return EventTimes(std::move(times), horizon);
}

// ---------------------------------------------------------------------------
// IntensityFn

IntensityFn::IntensityFn(Function lambda, std::vector<EnvelopeSegment> envelope)
    : lambda_(std::move(lambda)), envelope_(std::move(envelope)) {
  if (!lambda_) throw ParameterError("intensity function is empty");
  if (envelope_.empty()) throw EnvelopeError("envelope has no segments");
  double expected_start = 0.0;
  for (std::size_t s = 0; s < envelope_.size(); ++s) {
    const auto& seg = envelope_[s];
    if (seg.t_start != expected_start || !(seg.t_end > seg.t_start)) {
      throw EnvelopeError("envelope segment " + std::to_string(s) +
                          " is not contiguous from 0");
    }
    if (!(seg.rate >= 0.0) || !std::isfinite(seg.rate)) {
      throw EnvelopeError("envelope segment " + std::to_string(s) +
                          " has an invalid rate");
    }
    expected_start = seg.t_end;
    const double step =
        (seg.t_end - seg.t_start) / static_cast<double>(kSamplesPerSegment);
    for (std::size_t i = 0; i <= kSamplesPerSegment + 1; ++i) {
      // Samples 0..N cover the segment, the extra one hits t_end exactly.
      const double t = i > kSamplesPerSegment
                           ? seg.t_end
                           : seg.t_start + step * static_cast<double>(i);
      const double v = lambda_(t);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ParameterError("intensity is negative or not finite at t=" +
                             std::to_string(t));
      }
      if (v > seg.rate) {
        throw EnvelopeError("intensity " + std::to_string(v) + " at t=" +
                            std::to_string(t) + " exceeds envelope rate " +
                            std::to_string(seg.rate) + " of segment " +
                            std::to_string(s));
      }
    }
  }
}

IntensityFn IntensityFn::constant(double rate, double horizon) {
  if (!(rate >= 0.0)) throw ParameterError("rate must be non-negative");
  if (!(horizon > 0.0)) throw ParameterError("horizon must be positive");
  return IntensityFn([rate](double) { return rate; },
                     {{0.0, horizon, rate}});
}

IntensityFn IntensityFn::piecewise_linear(
    std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw ParameterError("piecewise intensity needs >= 2 knots");
  if (knots.front().first != 0.0) {
    throw ParameterError("piecewise intensity must start at t=0");
  }
  std::vector<EnvelopeSegment> env;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (!(knots[i + 1].first > knots[i].first)) {
      throw ParameterError("piecewise knot times must be strictly increasing");
    }
    if (knots[i].second < 0.0 || knots[i + 1].second < 0.0) {
      throw ParameterError("piecewise knot rates must be non-negative");
    }
    env.push_back({knots[i].first, knots[i + 1].first,
                   std::max(knots[i].second, knots[i + 1].second)});
  }
  auto eval = [knots = std::move(knots)](double t) {
    if (t <= knots.front().first) return knots.front().second;
    if (t >= knots.back().first) return knots.back().second;
    auto hi = std::upper_bound(
        knots.begin(), knots.end(), t,
        [](double v, const auto& k) { return v < k.first; });
    auto lo = hi - 1;
    const double w = (t - lo->first) / (hi->first - lo->first);
    // Convex combination stays within [min, max] of the two knot rates.
    return std::clamp(lo->second + w * (hi->second - lo->second),
                      std::min(lo->second, hi->second),
                      std::max(lo->second, hi->second));
  };
  return IntensityFn(std::move(eval), std::move(env));
}

namespace {

// max of sign * sin(theta) over [a, b].
double max_signed_sine(double a, double b, double sign) {
  double best = std::max(sign * std::sin(a), sign * std::sin(b));
  const double peak = sign > 0 ? std::numbers::pi / 2 : 3 * std::numbers::pi / 2;
  const double two_pi = 2 * std::numbers::pi;
  const double k = std::ceil((a - peak) / two_pi);
  if (peak + two_pi * k <= b) best = 1.0;
  return best;
}

}  // namespace

IntensityFn IntensityFn::sinusoid(double base, double amplitude, double period,
                                  double horizon,
                                  std::size_t segments_per_period) {
  if (!(period > 0.0)) throw ParameterError("period must be positive");
  if (!(horizon > 0.0)) throw ParameterError("horizon must be positive");
  if (!(base >= std::abs(amplitude))) {
    throw ParameterError("sinusoid requires base >= |amplitude|");
  }
  if (segments_per_period < 1) segments_per_period = 1;
  const double omega = 2 * std::numbers::pi / period;
  const double width = period / static_cast<double>(segments_per_period);
  const double sign = amplitude >= 0 ? 1.0 : -1.0;
  std::vector<EnvelopeSegment> env;
  for (std::size_t i = 0;; ++i) {
    const double a = static_cast<double>(i) * width;
    if (a >= horizon) break;
    const double b = std::min(horizon, static_cast<double>(i + 1) * width);
    const double sup =
        base + std::abs(amplitude) * max_signed_sine(omega * a, omega * b, sign);
    // Relative slack absorbs rounding in the evaluated sinusoid.
    env.push_back({a, b, sup * (1.0 + 1e-12) + 1e-300});
  }
  return IntensityFn(
      [base, amplitude, omega](double t) {
        return std::max(0.0, base + amplitude * std::sin(omega * t));
      },
      std::move(env));
}

double IntensityFn::max_envelope() const noexcept {
  double m = 0.0;
  for (const auto& s : envelope_) m = std::max(m, s.rate);
  return m;
}

EventTimes simulate_nhpp(const IntensityFn& intensity, double horizon,
                         RngStream& rng) {
  if (!(horizon > 0.0)) throw ParameterError("horizon must be positive");
  if (horizon > intensity.horizon()) {
    throw EnvelopeError("envelope does not cover the simulation horizon");
  }
  std::vector<double> times;
  for (const auto& seg : intensity.envelope()) {
    if (seg.t_start >= horizon) break;
    const double end = std::min(seg.t_end, horizon);
    if (seg.rate <= 0.0) continue;
    // Restarting the candidate stream at each segment start is exact by
    // memorylessness of the exponential waiting time.
    double s = seg.t_start;
    while (true) {
      s += exponential_draw(rng, seg.rate);
      if (s > end) break;
      const double ratio = intensity(s) / seg.rate;
      if (ratio > 1.0) {
        throw EnvelopeError("intensity exceeds envelope at t=" +
                            std::to_string(s));
      }
      if (rng.uniform() <= ratio) times.push_back(s);
    }
  }
  return EventTimes(std::move(times), horizon);
}

namespace {

struct SimpsonPanel {
  double a, b, fa, fm, fb, whole;
};

double adaptive_simpson(const IntensityFn& f, const SimpsonPanel& p,
                        double tol, int depth) {
  const double m = 0.5 * (p.a + p.b);
  const double lm = 0.5 * (p.a + m);
  const double rm = 0.5 * (m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
  const double right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
  const double delta = left + right - p.whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, {p.a, m, p.fa, flm, p.fm, left}, tol / 2, depth - 1) +
         adaptive_simpson(f, {m, p.b, p.fm, frm, p.fb, right}, tol / 2, depth - 1);
}

double simpson(const IntensityFn& f, double a, double b, double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, {a, b, fa, fm, fb, whole}, tol, 50);
}

}  // namespace

double nhpp_mean(const IntensityFn& intensity, double t1, double t2) {
  if (!(t2 > t1) || t1 < 0.0) {
    throw IntervalError("integration interval requires 0 <= t1 < t2");
  }
  if (t2 > intensity.horizon()) {
    throw IntervalError("integration interval extends past the envelope");
  }
  const double tol = 1e-9 * (t2 - t1) * std::max(intensity.max_envelope(), 1e-300);
  double total = 0.0;
  for (const auto& seg : intensity.envelope()) {
    const double a = std::max(seg.t_start, t1);
    const double b = std::min(seg.t_end, t2);
    if (b <= a) continue;
    total += simpson(intensity, a, b, tol * (b - a) / (t2 - t1));
  }
  return std::max(total, 0.0);
}

// ---------------------------------------------------------------------------
// Hawkes

HawkesModel::HawkesModel(double mu, HawkesKernel kernel)
    : mu_(mu), kernel_(kernel) {
  if (!(mu_ >= 0.0) || !std::isfinite(mu_)) {
    throw ParameterError("mu must be non-negative");
  }
  if (const auto* e = std::get_if<ExponentialKernel>(&kernel_)) {
    if (!(e->alpha >= 0.0)) throw ParameterError("alpha must be non-negative");
    if (!(e->beta > 0.0)) throw ParameterError("beta must be positive");
  } else {
    const auto& p = std::get<PowerLawKernel>(kernel_);
    if (!(p.alpha >= 0.0)) throw ParameterError("alpha must be non-negative");
    if (!(p.delta > 0.0)) throw ParameterError("delta must be positive");
    if (!(p.eta > 0.0)) throw ParameterError("eta must be positive");
  }
}

double HawkesModel::kernel_value(double x) const noexcept {
  if (const auto* e = std::get_if<ExponentialKernel>(&kernel_)) {
    return e->alpha * std::exp(-e->beta * x);
  }
  const auto& p = std::get<PowerLawKernel>(kernel_);
  return p.alpha / std::pow(x + p.delta, p.eta + 1.0);
}

double hawkes_intensity(const HawkesModel& model, const EventTimes& history,
                        double t) {
  double sum = 0.0;
  for (double ti : history.times()) {
    if (!(ti < t)) break;
    sum += model.kernel_value(t - ti);
  }
  return model.mu() + sum;
}

const char* to_string(Regime r) noexcept {
  switch (r) {
    case Regime::subcritical: return "subcritical";
    case Regime::critical: return "critical";
    case Regime::supercritical: return "supercritical";
  }
  return "unknown";
}

Branching branching_factor(const HawkesModel& model) {
  double n = 0.0;
  if (const auto* e = std::get_if<ExponentialKernel>(&model.kernel())) {
    n = e->alpha / e->beta;
  } else {
    const auto& p = std::get<PowerLawKernel>(model.kernel());
    n = p.alpha / (p.eta * std::pow(p.delta, p.eta));
  }
  const Regime r = n < 1.0   ? Regime::subcritical
                   : n > 1.0 ? Regime::supercritical
                             : Regime::critical;
  return {n, r};
}

double expected_cluster_size(double n_star) {
  if (!(n_star >= 0.0)) throw ParameterError("n* must be non-negative");
  if (n_star >= 1.0) {
    throw UnboundedRegimeError("cluster size is unbounded for n* >= 1");
  }
  return 1.0 / (1.0 - n_star);
}

EventTimes simulate_hawkes(const HawkesModel& model, double horizon,
                           RngStream& rng, const HawkesSimOptions& opts) {
  const auto* kernel = std::get_if<ExponentialKernel>(&model.kernel());
  if (kernel == nullptr) {
    throw UnsupportedKernelError(
        "thinning simulation supports the exponential kernel only");
  }
  if (!(model.mu() > 0.0)) throw ParameterError("mu must be positive");
  if (!(horizon > 0.0)) throw ParameterError("horizon must be positive");

  const auto branching = branching_factor(model);
  if (branching.regime != Regime::subcritical && opts.warn) {
    opts.warn(std::string(to_string(branching.regime)) +
              " regime (n*=" + std::to_string(branching.n_star) +
              "): the number of triggered events is unbounded; output is "
              "finite only because of the horizon");
  }

  const double alpha = kernel->alpha;
  const double beta = kernel->beta;
  std::vector<double> times;
  double s = 0.0;
  // Self-excitation just after s: sum of alpha * exp(-beta (s - T_i)).
  double excitation = 0.0;
  while (true) {
    const double bound = model.mu() + excitation;
    const double wait = exponential_draw(rng, bound);
    const double next = s + wait;
    if (next > horizon) break;
    if (!(next > s)) {
      throw BudgetError("intensity too large to resolve distinct event times");
    }
    excitation *= std::exp(-beta * wait);
    s = next;
    const double current = model.mu() + excitation;
    if (current > bound) {
      throw EnvelopeError("Hawkes intensity rose between events");
    }
    if (rng.uniform() * bound <= current) {
      times.push_back(s);
      if (times.size() > opts.max_events) {
        throw BudgetError("Hawkes simulation exceeded " +
                          std::to_string(opts.max_events) + " events");
      }
      excitation += alpha;
    }
  }
  return EventTimes(std::move(times), horizon);
}

}  // namespace pointproc
