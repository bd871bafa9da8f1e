#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pointproc/core.hpp"

namespace pointproc {

// Grid of non-negative density values in events per unit area.
struct DensitySurface {
  GridSpec spec;
  std::vector<double> values;  // row-major, see GridSpec::flat

  double at(std::size_t ix, std::size_t iy) const {
    return values.at(spec.flat({ix, iy}));
  }
};

// CSR: N ~ Poisson(rate * area), then N uniform points in the region.
SpatialPattern simulate_csr(double rate, const Region& region, RngStream& rng);

// Naive kernel estimate: per cell, the number of events within `bandwidth`
// of the cell centre divided by pi * bandwidth^2. No edge correction.
DensitySurface kde_surface(const SpatialPattern& pattern, const GridSpec& spec,
                           double bandwidth);

struct QuadratTest {
  CountGrid counts;
  double chi_square = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;  // upper tail of chi-square(df)
};

QuadratTest quadrat_counts(const SpatialPattern& pattern, const GridSpec& spec);

struct DispersionPoint {
  std::size_t block_size = 1;
  double index = 0.0;  // sample variance / sample mean of merged counts
};

// Index of dispersion of b-by-b merged quadrats for each block size b.
std::vector<DispersionPoint> dispersion_by_block(
    const SpatialPattern& pattern, const GridSpec& base_spec,
    std::span<const std::size_t> block_sizes);

// Distance from each event to its nearest other event (index order).
std::vector<double> nearest_neighbour_distances(const SpatialPattern& pattern);

// Empirical CDF of event-to-nearest-event distances at each radius.
std::vector<double> g_function(const SpatialPattern& pattern,
                               std::span<const double> radii);

// Empirical CDF of probe-to-nearest-event distances; probes are the cell
// centres of `probe_spec`.
std::vector<double> f_function(const SpatialPattern& pattern,
                               const GridSpec& probe_spec,
                               std::span<const double> radii);

double mean_min_distance(const SpatialPattern& pattern);

// Clark-Evans ratio: mean minimum distance over 1 / (2 sqrt(n / area)).
double nni(const SpatialPattern& pattern);

enum class EdgeCorrection { none, border };

// Ripley's K. With border correction only events at least d from the region
// boundary are averaged at radius d; a radius with no such event yields NaN.
std::vector<double> ripleys_k(const SpatialPattern& pattern,
                              std::span<const double> radii,
                              EdgeCorrection correction = EdgeCorrection::none);

enum class Statistic { G, F, K };

struct StatisticConfig {
  Statistic statistic = Statistic::K;
  EdgeCorrection correction = EdgeCorrection::none;  // K only
  std::size_t probe_nx = 50;                         // F only
  std::size_t probe_ny = 50;
};

// Evaluates the configured statistic on a pattern.
std::vector<double> evaluate_statistic(const SpatialPattern& pattern,
                                       const StatisticConfig& config,
                                       std::span<const double> radii);

struct EnvelopeResult {
  std::vector<double> distances;
  std::vector<double> observed;
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t nsim = 0;
};

// Pointwise min/max envelope of the statistic over nsim CSR patterns with
// the observed intensity on the observed region. Replicate i uses the stream
// derived from one base draw of `rng` and index i, so results do not depend
// on `threads`.
EnvelopeResult csr_envelope(const SpatialPattern& pattern,
                            const StatisticConfig& config,
                            std::span<const double> radii, std::size_t nsim,
                            RngStream& rng, std::size_t threads = 1);

}  // namespace pointproc
