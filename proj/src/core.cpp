#include "pointproc/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace pointproc {

EventTimes::EventTimes(std::vector<double> times, double horizon)
    : times_(std::move(times)), horizon_(horizon) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw ParameterError("horizon must be positive and finite");
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    const double t = times_[i];
    if (!(t > 0.0) || t > horizon_) {
      throw ParameterError("event time " + std::to_string(t) + " at index " +
                           std::to_string(i) + " lies outside (0, horizon]");
    }
    if (i > 0 && !(times_[i - 1] < t)) {
      throw ParameterError("event times must be strictly increasing (index " +
                           std::to_string(i) + ")");
    }
  }
}

std::size_t EventTimes::count(double t) const {
  return static_cast<std::size_t>(
      std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
}

std::vector<double> inter_arrival_times(const EventTimes& ev) {
  const auto t = ev.times();
  std::vector<double> q(t.size());
  std::adjacent_difference(t.begin(), t.end(), q.begin());
  return q;
}

Region::Region(double x0, double x1, double y0, double y1)
    : xmin(x0), xmax(x1), ymin(y0), ymax(y1) {
  if (!(xmin < xmax) || !(ymin < ymax) || !std::isfinite(area())) {
    throw ParameterError("region requires xmin < xmax and ymin < ymax");
  }
}

double Region::boundary_distance(const Point& p) const noexcept {
  return std::min({p.x - xmin, xmax - p.x, p.y - ymin, ymax - p.y});
}

SpatialPattern::SpatialPattern(std::vector<Point> points, Region region)
    : points_(std::move(points)), region_(region) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!region_.contains(points_[i])) {
      throw OutOfBoundsError("point " + std::to_string(i) +
                             " lies outside the region");
    }
  }
}

SpaceTimeEvents::SpaceTimeEvents(std::vector<SpaceTimePoint> events,
                                 Region region, double horizon)
    : events_(std::move(events)), region_(region), horizon_(horizon) {
  if (!(horizon_ > 0.0)) throw ParameterError("horizon must be positive");
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const auto& e = events_[i];
    if (!region_.contains({e.x, e.y}) || e.t < 0.0 || e.t > horizon_) {
      throw OutOfBoundsError("event " + std::to_string(i) +
                             " lies outside the region or [0, horizon]");
    }
  }
}

GridSpec::GridSpec(Region region, std::size_t nx, std::size_t ny)
    : region_(region), nx_(nx), ny_(ny) {
  if (nx_ < 1 || ny_ < 1) throw ParameterError("grid needs nx >= 1, ny >= 1");
}

Point GridSpec::center(CellIndex c) const noexcept {
  return {region_.xmin + (static_cast<double>(c.ix) + 0.5) * cell_width(),
          region_.ymin + (static_cast<double>(c.iy) + 0.5) * cell_height()};
}

std::vector<Point> GridSpec::centers() const {
  std::vector<Point> out(cell_count());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = center(k);
  return out;
}

namespace {

// Bin of v among n equal bins on [lo, hi]; edges are lo + i*(hi-lo)/n.
std::size_t bin_of(double v, double lo, double hi, std::size_t n) {
  const double span = hi - lo;
  const auto edge = [&](std::size_t i) {
    return lo + static_cast<double>(i) * span / static_cast<double>(n);
  };
  double guess = std::floor((v - lo) / span * static_cast<double>(n));
  std::size_t i = guess <= 0.0 ? 0
                  : guess >= static_cast<double>(n - 1)
                      ? n - 1
                      : static_cast<std::size_t>(guess);
  while (i > 0 && v < edge(i)) --i;
  while (i + 1 < n && v >= edge(i + 1)) ++i;
  return i;
}

}  // namespace

std::optional<CellIndex> GridSpec::locate(const Point& p) const noexcept {
  if (!region_.contains(p)) return std::nullopt;
  return CellIndex{bin_of(p.x, region_.xmin, region_.xmax, nx_),
                   bin_of(p.y, region_.ymin, region_.ymax, ny_)};
}

CountGrid::CountGrid(GridSpec spec)
    : spec_(spec), counts_(spec.cell_count(), 0) {}

CountGrid::CountGrid(GridSpec spec, std::vector<std::int64_t> counts)
    : spec_(spec), counts_(std::move(counts)) {
  if (counts_.size() != spec_.cell_count()) {
    throw ShapeError("count vector has " + std::to_string(counts_.size()) +
                     " entries, grid has " +
                     std::to_string(spec_.cell_count()) + " cells");
  }
  for (auto c : counts_) {
    if (c < 0) throw ParameterError("grid counts must be non-negative");
  }
}

std::int64_t CountGrid::total() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

double RngStream::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double exponential_quantile(double u, double rate) {
  if (!(rate > 0.0)) throw ParameterError("rate must be positive");
  return -std::log(u) / rate;
}

double exponential_draw(RngStream& rng, double rate) {
  return exponential_quantile(rng.uniform(), rate);
}

}  // namespace pointproc
