#include "pointproc/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "neighbour_index.hpp"
#include "parallel.hpp"

namespace pointproc {

using detail::distance;

CountGrid aggregate_to_grid(const SpatialPattern& points, const GridSpec& spec) {
  CountGrid grid(spec);
  std::vector<std::size_t> outside;
  const auto pts = points.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (const auto c = spec.locate(pts[i])) {
      ++grid.at(c->ix, c->iy);
    } else {
      outside.push_back(i);
    }
  }
  if (!outside.empty()) {
    std::string list;
    for (std::size_t k = 0; k < outside.size() && k < 20; ++k) {
      if (k) list += ",";
      list += std::to_string(outside[k]);
    }
    if (outside.size() > 20) list += ",...";
    throw OutOfBoundsError(std::to_string(outside.size()) +
                           " point(s) outside the grid region: indices " + list);
  }
  return grid;
}

double rss(const CountGrid& a, const CountGrid& b) {
  if (!(a.spec() == b.spec())) throw ShapeError("count grids differ in spec");
  double sum = 0.0;
  const auto ca = a.counts();
  const auto cb = b.counts();
  for (std::size_t k = 0; k < ca.size(); ++k) {
    const double d = static_cast<double>(ca[k] - cb[k]);
    sum += d * d;
  }
  return sum;
}

std::vector<std::size_t> ZScoreGrid::hot_cells(double threshold) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (z[k] >= threshold) out.push_back(k);
  }
  return out;
}

ZScoreGrid gi_star(const CountGrid& counts, double neighbourhood_radius) {
  const GridSpec& spec = counts.spec();
  const std::size_t n = spec.cell_count();
  if (n < 2) throw DegenerateError("Gi* needs at least 2 cells");
  if (!(neighbourhood_radius >= 0.0)) {
    throw ParameterError("neighbourhood radius must be non-negative");
  }
  const auto x = counts.counts();
  const double nd = static_cast<double>(n);
  double sum = 0.0, sum_sq = 0.0;
  for (auto v : x) {
    sum += static_cast<double>(v);
    sum_sq += static_cast<double>(v) * static_cast<double>(v);
  }
  const double mean = sum / nd;
  const double var = sum_sq / nd - mean * mean;
  if (!(var > 0.0) || std::all_of(x.begin(), x.end(),
                                  [&](auto v) { return v == x[0]; })) {
    throw DegenerateError("Gi* undefined: counts have zero variance");
  }
  const double s = std::sqrt(var);

  // Neighbour offsets are identical for every cell of a regular grid.
  const double w = spec.cell_width();
  const double h = spec.cell_height();
  const auto rx = static_cast<long>(std::floor(neighbourhood_radius / w));
  const auto ry = static_cast<long>(std::floor(neighbourhood_radius / h));
  std::vector<std::pair<long, long>> offsets;
  for (long dy = -ry; dy <= ry; ++dy) {
    for (long dx = -rx; dx <= rx; ++dx) {
      const double ox = static_cast<double>(dx) * w;
      const double oy = static_cast<double>(dy) * h;
      if (std::sqrt(ox * ox + oy * oy) <= neighbourhood_radius) {
        offsets.emplace_back(dx, dy);
      }
    }
  }

  ZScoreGrid out{spec, std::vector<double>(n)};
  const long nx = static_cast<long>(spec.nx());
  const long ny = static_cast<long>(spec.ny());
  for (long iy = 0; iy < ny; ++iy) {
    for (long ix = 0; ix < nx; ++ix) {
      double weighted = 0.0;
      double wsum = 0.0;
      for (const auto& [dx, dy] : offsets) {
        const long jx = ix + dx, jy = iy + dy;
        if (jx < 0 || jy < 0 || jx >= nx || jy >= ny) continue;
        weighted += static_cast<double>(x[static_cast<std::size_t>(jy * nx + jx)]);
        wsum += 1.0;
      }
      // Binary weights: sum of squared weights equals the weight sum.
      const double spread = (nd * wsum - wsum * wsum) / (nd - 1.0);
      if (!(spread > 0.0)) {
        throw DegenerateError(
            "Gi* undefined: neighbourhood covers the whole grid");
      }
      out.z[static_cast<std::size_t>(iy * nx + ix)] =
          (weighted - mean * wsum) / (s * std::sqrt(spread));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Space-time scan

ScanBaseline::ScanBaseline(GridSpec spec, double horizon, std::vector<double> mass)
    : spec_(spec), horizon_(horizon), mass_(std::move(mass)) {
  if (!(horizon_ > 0.0)) throw ParameterError("baseline horizon must be positive");
  if (mass_.empty() || mass_.size() % spec_.cell_count() != 0) {
    throw ShapeError("baseline mass is not a whole number of slices");
  }
  slices_ = mass_.size() / spec_.cell_count();
  for (double m : mass_) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw BaselineError("baseline mass must be finite and non-negative");
    }
    total_ += m;
  }
  if (!(total_ > 0.0)) throw BaselineError("baseline has zero total mass");
}

ScanBaseline ScanBaseline::uniform(GridSpec spec, std::size_t slices,
                                   double horizon) {
  if (slices < 1) throw ParameterError("baseline needs at least one slice");
  return ScanBaseline(spec, horizon,
                      std::vector<double>(slices * spec.cell_count(), 1.0));
}

ScanBaseline ScanBaseline::from_grids(const std::vector<CountGrid>& slices,
                                      double horizon) {
  if (slices.empty()) throw BaselineError("baseline needs at least one slice");
  std::vector<double> mass;
  for (const auto& g : slices) {
    if (!(g.spec() == slices.front().spec())) {
      throw ShapeError("baseline slices use different grids");
    }
    for (auto c : g.counts()) mass.push_back(static_cast<double>(c));
  }
  return ScanBaseline(slices.front().spec(), horizon, std::move(mass));
}

std::size_t ScanBaseline::slice_of(double t) const noexcept {
  const auto n = static_cast<double>(slices_);
  double guess = std::floor(t / horizon_ * n);
  std::size_t s = guess <= 0.0 ? 0
                  : guess >= n - 1 ? slices_ - 1
                                   : static_cast<std::size_t>(guess);
  const auto edge = [&](std::size_t i) {
    return static_cast<double>(i) * horizon_ / n;
  };
  while (s > 0 && t < edge(s)) --s;
  while (s + 1 < slices_ && t >= edge(s + 1)) ++s;
  return s;
}

double scan_llr(std::int64_t observed, double expected, std::int64_t total) {
  const auto n = static_cast<double>(observed);
  const auto big_n = static_cast<double>(total);
  if (!(n > expected) || !(expected > 0.0)) return 0.0;
  double llr = n * std::log(n / expected);
  if (observed < total) {
    llr += (big_n - n) * std::log((big_n - n) / (big_n - expected));
  }
  return llr;
}

bool cylinder_contains(const ScanBaseline& baseline, const Cylinder& cyl,
                       const SpaceTimePoint& e) {
  const auto cell = baseline.spec().locate({e.x, e.y});
  if (!cell) return false;
  if (distance(baseline.spec().center(*cell), {cyl.cx, cyl.cy}) > cyl.radius) {
    return false;
  }
  const double w = baseline.slice_width();
  const auto s0 = static_cast<std::size_t>(std::llround(cyl.t_start / w));
  const auto s1 = static_cast<std::size_t>(std::llround(cyl.t_end / w));
  const std::size_t s = baseline.slice_of(e.t);
  return s >= s0 && s < s1;
}

namespace {

struct Zone {
  double cx, cy, radius;
  std::vector<std::size_t> cells;
  std::vector<double> mass_by_slice;
};

struct Candidate {
  std::size_t zone;
  std::size_t start;
  std::size_t length;
  double expected;
};

class ScanLattice {
 public:
  ScanLattice(const ScanBaseline& baseline, const ScanConfig& config,
              std::int64_t total)
      : baseline_(baseline), total_(total) {
    const GridSpec& spec = baseline.spec();
    const auto centres = spec.centers();
    std::map<std::vector<std::size_t>, std::size_t> seen;
    for (const auto& c : config.lattice.centers()) {
      for (double r : config.radii) {
        std::vector<std::size_t> cells;
        for (std::size_t k = 0; k < centres.size(); ++k) {
          if (distance(centres[k], c) <= r) cells.push_back(k);
        }
        if (cells.empty() || seen.count(cells)) continue;
        seen.emplace(cells, zones_.size());
        Zone z{c.x, c.y, r, std::move(cells),
               std::vector<double>(baseline.slices(), 0.0)};
        for (std::size_t s = 0; s < baseline.slices(); ++s) {
          for (auto k : z.cells) z.mass_by_slice[s] += baseline.mass(s, k);
        }
        zones_.push_back(std::move(z));
      }
    }
    cell_zones_.resize(spec.cell_count());
    for (std::size_t z = 0; z < zones_.size(); ++z) {
      for (auto k : zones_[z].cells) cell_zones_[k].push_back(z);
    }

    std::vector<std::size_t> lengths;
    for (double d : config.durations) {
      const double slices = std::round(d / baseline.slice_width());
      const auto len = static_cast<std::size_t>(std::clamp(
          slices, 1.0, static_cast<double>(baseline.slices())));
      if (std::find(lengths.begin(), lengths.end(), len) == lengths.end()) {
        lengths.push_back(len);
      }
    }
    const double scale = static_cast<double>(total) / baseline.total_mass();
    for (std::size_t z = 0; z < zones_.size(); ++z) {
      for (auto len : lengths) {
        for (std::size_t s = 0; s + len <= baseline.slices(); ++s) {
          double m = 0.0;
          for (std::size_t u = s; u < s + len; ++u) m += zones_[z].mass_by_slice[u];
          if (!(m > 0.0)) continue;
          candidates_.push_back({z, s, len, m * scale});
        }
      }
    }
  }

  const std::vector<Zone>& zones() const { return zones_; }
  const std::vector<Candidate>& candidates() const { return candidates_; }

  // Per-zone per-slice counts for events given as (slice, cell) pairs.
  std::vector<std::int64_t> zone_series(
      const std::vector<std::pair<std::size_t, std::size_t>>& events) const {
    const std::size_t ns = baseline_.slices();
    std::vector<std::int64_t> series(zones_.size() * ns, 0);
    for (const auto& [s, k] : events) {
      for (auto z : cell_zones_[k]) ++series[z * ns + s];
    }
    return series;
  }

  std::int64_t observed(const std::vector<std::int64_t>& series,
                        const Candidate& c) const {
    const std::size_t ns = baseline_.slices();
    std::int64_t n = 0;
    for (std::size_t u = c.start; u < c.start + c.length; ++u) {
      n += series[c.zone * ns + u];
    }
    return n;
  }

  double max_llr(const std::vector<std::pair<std::size_t, std::size_t>>& events) const {
    const auto series = zone_series(events);
    double best = 0.0;
    for (const auto& c : candidates_) {
      best = std::max(best, scan_llr(observed(series, c), c.expected, total_));
    }
    return best;
  }

 private:
  const ScanBaseline& baseline_;
  std::int64_t total_;
  std::vector<Zone> zones_;
  std::vector<std::vector<std::size_t>> cell_zones_;
  std::vector<Candidate> candidates_;
};

}  // namespace

std::vector<ScanResult> space_time_scan(const SpaceTimeEvents& events,
                                        const ScanBaseline& baseline,
                                        const ScanConfig& config,
                                        RngStream& rng) {
  if (events.size() < 1) throw InsufficientDataError("scan needs at least one event");
  if (config.radii.empty() || config.durations.empty()) {
    throw ParameterError("scan needs at least one radius and one duration");
  }
  if (config.nsim < 99) throw ParameterError("scan needs nsim >= 99");
  for (double r : config.radii) {
    if (!(r > 0.0)) throw ParameterError("scan radii must be positive");
  }
  for (double d : config.durations) {
    if (!(d > 0.0)) throw ParameterError("scan durations must be positive");
  }
  if (!(baseline.total_mass() > 0.0)) throw BaselineError("baseline has zero mass");

  const GridSpec& spec = baseline.spec();
  std::vector<std::pair<std::size_t, std::size_t>> located;
  located.reserve(events.size());
  for (const auto& e : events.events()) {
    const auto cell = spec.locate({e.x, e.y});
    if (!cell || e.t > baseline.horizon()) {
      throw OutOfBoundsError("event lies outside the baseline lattice");
    }
    located.emplace_back(baseline.slice_of(e.t), spec.flat(*cell));
  }
  const auto total = static_cast<std::int64_t>(located.size());
  const ScanLattice lattice(baseline, config, total);

  // Null replicates: N events placed multinomially by baseline mass.
  std::vector<double> cumulative;
  cumulative.reserve(baseline.slices() * spec.cell_count());
  double acc = 0.0;
  for (std::size_t s = 0; s < baseline.slices(); ++s) {
    for (std::size_t k = 0; k < spec.cell_count(); ++k) {
      acc += baseline.mass(s, k);
      cumulative.push_back(acc);
    }
  }
  const std::uint64_t base = rng.next_u64();
  std::vector<double> null_max(config.nsim);
  detail::parallel_for(config.nsim, config.threads, [&](std::size_t i) {
    auto stream = RngStream::derived(base, i);
    std::vector<std::pair<std::size_t, std::size_t>> sim(located.size());
    for (auto& ev : sim) {
      const double u = stream.uniform() * acc;
      auto pos = static_cast<std::size_t>(
          std::upper_bound(cumulative.begin(), cumulative.end(), u) -
          cumulative.begin());
      // upper_bound lands on a positive-mass cell unless u rounded up to acc.
      if (pos == cumulative.size()) {
        --pos;
        while (pos > 0 && cumulative[pos] == cumulative[pos - 1]) --pos;
      }
      ev = {pos / spec.cell_count(), pos % spec.cell_count()};
    }
    null_max[i] = lattice.max_llr(sim);
  });
  std::sort(null_max.begin(), null_max.end());

  const auto series = lattice.zone_series(located);
  const double width = baseline.slice_width();
  std::vector<ScanResult> results;
  results.reserve(lattice.candidates().size());
  for (const auto& c : lattice.candidates()) {
    const auto& z = lattice.zones()[c.zone];
    ScanResult r;
    r.cylinder = {z.cx, z.cy, z.radius, static_cast<double>(c.start) * width,
                  static_cast<double>(c.start + c.length) * width};
    r.observed = lattice.observed(series, c);
    r.expected = c.expected;
    r.llr = scan_llr(r.observed, c.expected, total);
    const auto exceed = null_max.end() -
                        std::lower_bound(null_max.begin(), null_max.end(), r.llr);
    r.p_value = r.llr > 0.0 ? static_cast<double>(1 + exceed) /
                                  static_cast<double>(config.nsim + 1)
                            : 1.0;
    results.push_back(r);
  }
  std::stable_sort(results.begin(), results.end(),
                   [](const ScanResult& a, const ScanResult& b) {
                     return a.llr > b.llr;
                   });
  return results;
}

}  // namespace pointproc
