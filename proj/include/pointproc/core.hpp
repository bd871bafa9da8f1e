#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "pointproc/error.hpp"

namespace pointproc {

// Realization of a temporal point process on (0, horizon].
// Times are strictly increasing; count(t) is the counting process N_t.
class EventTimes {
 public:
  EventTimes() = default;
  EventTimes(std::vector<double> times, double horizon);

  std::span<const double> times() const noexcept { return times_; }
  double horizon() const noexcept { return horizon_; }
  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  double operator[](std::size_t i) const { return times_[i]; }

  // Number of events with T_i <= t.
  std::size_t count(double t) const;

 private:
  std::vector<double> times_;
  double horizon_ = 0.0;
};

// Inter-arrival times Q_1 = T_1, Q_k = T_k - T_{k-1}.
std::vector<double> inter_arrival_times(const EventTimes& ev);

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct Region {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;

  Region() = default;
  Region(double xmin, double xmax, double ymin, double ymax);

  double width() const noexcept { return xmax - xmin; }
  double height() const noexcept { return ymax - ymin; }
  double area() const noexcept { return width() * height(); }
  bool contains(const Point& p) const noexcept {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  // Distance from an inside point to the nearest edge of the rectangle.
  double boundary_distance(const Point& p) const noexcept;

  friend bool operator==(const Region&, const Region&) = default;
};

class SpatialPattern {
 public:
  SpatialPattern() = default;
  SpatialPattern(std::vector<Point> points, Region region);

  std::span<const Point> points() const noexcept { return points_; }
  const Region& region() const noexcept { return region_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  double intensity() const noexcept {
    return static_cast<double>(points_.size()) / region_.area();
  }

 private:
  std::vector<Point> points_;
  Region region_;
};

struct SpaceTimePoint {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
};

class SpaceTimeEvents {
 public:
  SpaceTimeEvents() = default;
  SpaceTimeEvents(std::vector<SpaceTimePoint> events, Region region,
                  double horizon);

  std::span<const SpaceTimePoint> events() const noexcept { return events_; }
  const Region& region() const noexcept { return region_; }
  double horizon() const noexcept { return horizon_; }
  std::size_t size() const noexcept { return events_.size(); }

 private:
  std::vector<SpaceTimePoint> events_;
  Region region_;
  double horizon_ = 1.0;
};

struct CellIndex {
  std::size_t ix = 0;
  std::size_t iy = 0;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

// Regular nx-by-ny dissection of a region. Cells are half-open [x0, x1) x
// [y0, y1) except the last column/row, which are closed on the far side.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(Region region, std::size_t nx, std::size_t ny);

  const Region& region() const noexcept { return region_; }
  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t cell_count() const noexcept { return nx_ * ny_; }
  double cell_width() const noexcept { return region_.width() / nx_; }
  double cell_height() const noexcept { return region_.height() / ny_; }
  double cell_area() const noexcept { return cell_width() * cell_height(); }

  // Row-major flat index: iy * nx + ix.
  std::size_t flat(CellIndex c) const noexcept { return c.iy * nx_ + c.ix; }
  CellIndex unflat(std::size_t k) const noexcept { return {k % nx_, k / nx_}; }

  Point center(CellIndex c) const noexcept;
  Point center(std::size_t k) const noexcept { return center(unflat(k)); }
  std::vector<Point> centers() const;

  // Cell containing p, or nullopt when p lies outside the region.
  std::optional<CellIndex> locate(const Point& p) const noexcept;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  Region region_;
  std::size_t nx_ = 1;
  std::size_t ny_ = 1;
};

class CountGrid {
 public:
  CountGrid() = default;
  explicit CountGrid(GridSpec spec);
  CountGrid(GridSpec spec, std::vector<std::int64_t> counts);

  const GridSpec& spec() const noexcept { return spec_; }
  std::span<const std::int64_t> counts() const noexcept { return counts_; }
  std::int64_t at(std::size_t ix, std::size_t iy) const {
    return counts_.at(spec_.flat({ix, iy}));
  }
  std::int64_t& at(std::size_t ix, std::size_t iy) {
    return counts_.at(spec_.flat({ix, iy}));
  }
  std::int64_t total() const noexcept;

  friend bool operator==(const CountGrid&, const CountGrid&) = default;

 private:
  GridSpec spec_;
  std::vector<std::int64_t> counts_;
};

// Deterministic random stream. Uniform draws are built from the top 53 bits
// of a 64-bit Mersenne Twister and offset by half an ulp, so they lie in the
// open interval (0, 1) on every platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  RngStream(const RngStream&) = delete;
  RngStream& operator=(const RngStream&) = delete;
  RngStream(RngStream&&) = default;
  RngStream& operator=(RngStream&&) = default;

  // Stream for replicate `index` of a computation seeded with `base`.
  static RngStream derived(std::uint64_t base, std::uint64_t index) {
    return RngStream(base + index);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  double uniform() {
    constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
    return (static_cast<double>(engine_() >> 11) + 0.5) * kScale;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Index in [0, n) (n > 0).
  std::size_t index(std::size_t n) {
    auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

  // Standard normal via Box-Muller; one draw per call, the pair's second
  // value is discarded so the stream position stays simple to reason about.
  double normal();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// -ln(u) / rate. The inverse CDF step shared by all thinning algorithms.
double exponential_quantile(double u, double rate);

// One Exp(rate) waiting time drawn from rng. Strictly positive.
double exponential_draw(RngStream& rng, double rate);

}  // namespace pointproc
