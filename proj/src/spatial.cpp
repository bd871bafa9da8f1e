#include "pointproc/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "neighbour_index.hpp"
#include "parallel.hpp"

namespace pointproc {

namespace {

using detail::distance;
using detail::NeighbourIndex;

void require_ascending(std::span<const double> radii, bool strictly_positive) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!std::isfinite(radii[i]) || radii[i] < 0.0 ||
        (strictly_positive && radii[i] == 0.0)) {
      throw ParameterError("radius " + std::to_string(radii[i]) +
                           " is not a valid distance");
    }
    if (i > 0 && radii[i] < radii[i - 1]) {
      throw ParameterError("radii must be ascending");
    }
  }
}

void require_points(const SpatialPattern& p, std::size_t n) {
  if (p.size() < n) {
    throw InsufficientDataError("statistic needs at least " +
                                std::to_string(n) + " points, pattern has " +
                                std::to_string(p.size()));
  }
}

bool covers(const Region& outer, const Region& inner) {
  return outer.xmin <= inner.xmin && outer.xmax >= inner.xmax &&
         outer.ymin <= inner.ymin && outer.ymax >= inner.ymax;
}

// Fraction of sorted distances <= r for each radius.
std::vector<double> empirical_cdf(std::vector<double> d,
                                  std::span<const double> radii) {
  std::sort(d.begin(), d.end());
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii) {
    const auto k = std::upper_bound(d.begin(), d.end(), r) - d.begin();
    out.push_back(static_cast<double>(k) / static_cast<double>(d.size()));
  }
  return out;
}

CountGrid count_points(const SpatialPattern& pattern, const GridSpec& spec) {
  CountGrid grid(spec);
  for (const auto& p : pattern.points()) {
    const auto c = spec.locate(p);
    if (!c) throw OutOfBoundsError("point lies outside the grid region");
    ++grid.at(c->ix, c->iy);
  }
  return grid;
}

}  // namespace

SpatialPattern simulate_csr(double rate, const Region& region, RngStream& rng) {
  if (!(rate > 0.0)) throw ParameterError("rate must be positive");
  // Poisson count: unit-rate arrivals on [0, rate * area].
  const double mass = rate * region.area();
  std::size_t n = 0;
  for (double s = exponential_draw(rng, 1.0); s <= mass;
       s += exponential_draw(rng, 1.0)) {
    ++n;
  }
  std::vector<Point> pts(n);
  for (auto& p : pts) {
    p.x = rng.uniform(region.xmin, region.xmax);
    p.y = rng.uniform(region.ymin, region.ymax);
  }
  return SpatialPattern(std::move(pts), region);
}

DensitySurface kde_surface(const SpatialPattern& pattern, const GridSpec& spec,
                           double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw ParameterError("bandwidth must be positive");
  }
  std::vector<std::int64_t> hits(spec.cell_count(), 0);
  const Region& r = spec.region();
  const double w = spec.cell_width();
  const double h = spec.cell_height();
  const auto span_of = [](double lo, double hi, double origin, double step,
                          std::size_t n) {
    // Cell indices whose centres may lie in [lo, hi], padded by one.
    const double a = std::floor((lo - origin) / step - 0.5) - 1.0;
    const double b = std::ceil((hi - origin) / step - 0.5) + 1.0;
    const auto first = a < 0.0 ? std::size_t{0} : static_cast<std::size_t>(a);
    const auto last = b < 0.0 ? std::size_t{0}
                      : b >= static_cast<double>(n - 1)
                          ? n - 1
                          : static_cast<std::size_t>(b);
    return std::pair{first, last};
  };
  for (const auto& p : pattern.points()) {
    const auto [x0, x1] =
        span_of(p.x - bandwidth, p.x + bandwidth, r.xmin, w, spec.nx());
    const auto [y0, y1] =
        span_of(p.y - bandwidth, p.y + bandwidth, r.ymin, h, spec.ny());
    if (x0 > x1 || y0 > y1) continue;
    for (std::size_t iy = y0; iy <= y1; ++iy) {
      for (std::size_t ix = x0; ix <= x1; ++ix) {
        if (distance(spec.center({ix, iy}), p) <= bandwidth) {
          ++hits[spec.flat({ix, iy})];
        }
      }
    }
  }
  const double disc = std::numbers::pi * bandwidth * bandwidth;
  DensitySurface out{spec, std::vector<double>(hits.size())};
  for (std::size_t k = 0; k < hits.size(); ++k) {
    out.values[k] = static_cast<double>(hits[k]) / disc;
  }
  return out;
}

QuadratTest quadrat_counts(const SpatialPattern& pattern, const GridSpec& spec) {
  if (!covers(spec.region(), pattern.region())) {
    throw ParameterError("quadrat grid does not cover the pattern region");
  }
  QuadratTest out;
  out.counts = count_points(pattern, spec);
  const std::size_t k = spec.cell_count();
  if (k < 2) throw DegenerateError("quadrat test needs at least 2 cells");
  const double mean =
      static_cast<double>(out.counts.total()) / static_cast<double>(k);
  if (!(mean > 0.0)) throw DegenerateError("quadrat test with zero mean count");
  double chi = 0.0;
  for (auto c : out.counts.counts()) {
    const double d = static_cast<double>(c) - mean;
    chi += d * d / mean;
  }
  out.chi_square = chi;
  out.df = k - 1;
  out.p_value = boost::math::gamma_q(static_cast<double>(out.df) / 2.0, chi / 2.0);
  return out;
}

std::vector<DispersionPoint> dispersion_by_block(
    const SpatialPattern& pattern, const GridSpec& base_spec,
    std::span<const std::size_t> block_sizes) {
  const CountGrid base = count_points(pattern, base_spec);
  std::vector<DispersionPoint> out;
  for (std::size_t b : block_sizes) {
    if (b == 0 || base_spec.nx() % b != 0 || base_spec.ny() % b != 0) {
      throw ParameterError("block size " + std::to_string(b) +
                           " does not divide the base grid");
    }
    const std::size_t mx = base_spec.nx() / b;
    const std::size_t my = base_spec.ny() / b;
    if (mx * my < 2) {
      throw ParameterError("block size " + std::to_string(b) +
                           " leaves fewer than two blocks");
    }
    std::vector<double> merged(mx * my, 0.0);
    for (std::size_t iy = 0; iy < base_spec.ny(); ++iy) {
      for (std::size_t ix = 0; ix < base_spec.nx(); ++ix) {
        merged[(iy / b) * mx + ix / b] += static_cast<double>(base.at(ix, iy));
      }
    }
    double mean = 0.0;
    for (double m : merged) mean += m;
    mean /= static_cast<double>(merged.size());
    if (!(mean > 0.0)) throw DegenerateError("dispersion index with zero mean");
    double ss = 0.0;
    for (double m : merged) ss += (m - mean) * (m - mean);
    const double var = ss / static_cast<double>(merged.size() - 1);
    out.push_back({b, var / mean});
  }
  return out;
}

std::vector<double> nearest_neighbour_distances(const SpatialPattern& pattern) {
  require_points(pattern, 2);
  const auto pts = pattern.points();
  NeighbourIndex index(pts, pattern.region(),
                       NeighbourIndex::default_bucket(pts.size(), pattern.region()));
  std::vector<double> d(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) d[i] = index.nearest(pts[i], i);
  return d;
}

std::vector<double> g_function(const SpatialPattern& pattern,
                               std::span<const double> radii) {
  require_ascending(radii, false);
  return empirical_cdf(nearest_neighbour_distances(pattern), radii);
}

std::vector<double> f_function(const SpatialPattern& pattern,
                               const GridSpec& probe_spec,
                               std::span<const double> radii) {
  require_ascending(radii, false);
  require_points(pattern, 1);
  const auto pts = pattern.points();
  NeighbourIndex index(pts, pattern.region(),
                       NeighbourIndex::default_bucket(pts.size(), pattern.region()));
  const auto probes = probe_spec.centers();
  std::vector<double> d(probes.size());
  constexpr auto none = std::numeric_limits<std::size_t>::max();
  for (std::size_t k = 0; k < probes.size(); ++k) {
    d[k] = index.nearest(probes[k], none);
  }
  return empirical_cdf(std::move(d), radii);
}

double mean_min_distance(const SpatialPattern& pattern) {
  const auto d = nearest_neighbour_distances(pattern);
  double sum = 0.0;
  for (double v : d) sum += v;
  return sum / static_cast<double>(d.size());
}

double nni(const SpatialPattern& pattern) {
  const double dmin = mean_min_distance(pattern);
  const double expected = 1.0 / (2.0 * std::sqrt(pattern.intensity()));
  return dmin / expected;
}

std::vector<double> ripleys_k(const SpatialPattern& pattern,
                              std::span<const double> radii,
                              EdgeCorrection correction) {
  require_points(pattern, 2);
  require_ascending(radii, true);
  if (radii.empty()) return {};
  const auto pts = pattern.points();
  const std::size_t n = pts.size();
  const std::size_t nr = radii.size();
  const double rmax = radii.back();
  NeighbourIndex index(
      pts, pattern.region(),
      std::max(rmax, NeighbourIndex::default_bucket(n, pattern.region())));

  // pair_sum[j]: neighbours within radii[j] summed over contributing events.
  std::vector<std::int64_t> pair_sum(nr, 0);
  std::vector<std::int64_t> events(nr, 0);
  std::vector<std::int64_t> hist(nr);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(hist.begin(), hist.end(), 0);
    index.within(pts[i], rmax, i, [&](std::size_t, double d) {
      const auto j = std::lower_bound(radii.begin(), radii.end(), d) - radii.begin();
      ++hist[static_cast<std::size_t>(j)];
    });
    const double edge = pattern.region().boundary_distance(pts[i]);
    std::int64_t cumulative = 0;
    for (std::size_t j = 0; j < nr; ++j) {
      cumulative += hist[j];
      if (correction == EdgeCorrection::border && edge < radii[j]) continue;
      pair_sum[j] += cumulative;
      ++events[j];
    }
  }
  const double lambda = pattern.intensity();
  std::vector<double> k(nr);
  for (std::size_t j = 0; j < nr; ++j) {
    k[j] = events[j] == 0
               ? std::numeric_limits<double>::quiet_NaN()
               : static_cast<double>(pair_sum[j]) /
                     static_cast<double>(events[j]) / lambda;
  }
  return k;
}

std::vector<double> evaluate_statistic(const SpatialPattern& pattern,
                                       const StatisticConfig& config,
                                       std::span<const double> radii) {
  switch (config.statistic) {
    case Statistic::G:
      return g_function(pattern, radii);
    case Statistic::F:
      return f_function(pattern,
                        GridSpec(pattern.region(), config.probe_nx, config.probe_ny),
                        radii);
    case Statistic::K:
      return ripleys_k(pattern, radii, config.correction);
  }
  throw ParameterError("unknown statistic");
}

EnvelopeResult csr_envelope(const SpatialPattern& pattern,
                            const StatisticConfig& config,
                            std::span<const double> radii, std::size_t nsim,
                            RngStream& rng, std::size_t threads) {
  if (nsim < 19) throw ParameterError("envelope needs nsim >= 19");
  EnvelopeResult out;
  out.distances.assign(radii.begin(), radii.end());
  out.observed = evaluate_statistic(pattern, config, radii);
  out.nsim = nsim;

  const double lambda = pattern.intensity();
  const std::uint64_t base = rng.next_u64();
  std::vector<std::vector<double>> curves(nsim);
  detail::parallel_for(nsim, threads, [&](std::size_t i) {
    auto stream = RngStream::derived(base, i);
    const auto sim = simulate_csr(lambda, pattern.region(), stream);
    curves[i] = evaluate_statistic(sim, config, radii);
  });

  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.lower.assign(radii.size(), nan);
  out.upper.assign(radii.size(), nan);
  for (const auto& c : curves) {
    for (std::size_t j = 0; j < radii.size(); ++j) {
      if (std::isnan(c[j])) continue;
      if (std::isnan(out.lower[j]) || c[j] < out.lower[j]) out.lower[j] = c[j];
      if (std::isnan(out.upper[j]) || c[j] > out.upper[j]) out.upper[j] = c[j];
    }
  }
  return out;
}

}  // namespace pointproc
