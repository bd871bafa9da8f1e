#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pointproc/core.hpp"

namespace pointproc {

// Per-cell point counts; throws OutOfBoundsError naming every point that
// falls outside the grid region.
CountGrid aggregate_to_grid(const SpatialPattern& points, const GridSpec& spec);

// Residual sum of squares between two count grids on the same spec.
double rss(const CountGrid& a, const CountGrid& b);

struct ZScoreGrid {
  GridSpec spec;
  std::vector<double> z;  // row-major

  double at(std::size_t ix, std::size_t iy) const {
    return z.at(spec.flat({ix, iy}));
  }
  // Flat indices of cells with z >= threshold.
  std::vector<std::size_t> hot_cells(double threshold = 1.96) const;
};

// Getis-Ord Gi* with binary weights: cells whose centres lie within
// `neighbourhood_radius` of cell i (itself included) are its neighbours.
ZScoreGrid gi_star(const CountGrid& counts, double neighbourhood_radius);

struct Cylinder {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
};

struct ScanResult {
  Cylinder cylinder;
  std::int64_t observed = 0;
  double expected = 0.0;
  double llr = 0.0;
  double p_value = 1.0;
};

// Population at risk on a space-time lattice: `slices` equal time slices of
// [0, horizon] times the cells of `spec`. A cylinder covers every cell whose
// centre is within its radius for every slice inside its time interval.
class ScanBaseline {
 public:
  ScanBaseline(GridSpec spec, double horizon, std::vector<double> mass);

  static ScanBaseline uniform(GridSpec spec, std::size_t slices, double horizon);
  // One count grid per time slice, oldest first; all on the same spec.
  static ScanBaseline from_grids(const std::vector<CountGrid>& slices,
                                 double horizon);

  const GridSpec& spec() const noexcept { return spec_; }
  std::size_t slices() const noexcept { return slices_; }
  double horizon() const noexcept { return horizon_; }
  double slice_width() const noexcept {
    return horizon_ / static_cast<double>(slices_);
  }
  // Mass of cell k in slice s.
  double mass(std::size_t s, std::size_t k) const {
    return mass_[s * spec_.cell_count() + k];
  }
  double total_mass() const noexcept { return total_; }

  std::size_t slice_of(double t) const noexcept;

 private:
  GridSpec spec_;
  std::size_t slices_ = 1;
  double horizon_ = 1.0;
  std::vector<double> mass_;
  double total_ = 0.0;
};

struct ScanConfig {
  GridSpec lattice;  // candidate centres are the lattice cell centres
  std::vector<double> radii;
  std::vector<double> durations;  // rounded to whole slices, at least one
  std::size_t nsim = 999;
  std::size_t threads = 1;
};

// Whether the event falls in the cylinder under the baseline's lattice rule.
bool cylinder_contains(const ScanBaseline& baseline, const Cylinder& cyl,
                       const SpaceTimePoint& e);

// Kulldorff Poisson log-likelihood ratio (high-rate clusters only).
double scan_llr(std::int64_t observed, double expected, std::int64_t total);

// Exhaustive space-time scan with Monte Carlo p-values. Results cover every
// distinct cylinder, sorted by LLR descending (generation order on ties).
std::vector<ScanResult> space_time_scan(const SpaceTimeEvents& events,
                                        const ScanBaseline& baseline,
                                        const ScanConfig& config,
                                        RngStream& rng);

}  // namespace pointproc
