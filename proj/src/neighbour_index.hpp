#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "pointproc/core.hpp"

namespace pointproc::detail {

inline double distance(const Point& a, const Point& b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

// Uniform bucket grid over a point set for nearest-neighbour and fixed-radius
// queries. Distances are always computed with `distance` above so results
// match a direct pairwise scan bit for bit.
class NeighbourIndex {
 public:
  NeighbourIndex(std::span<const Point> points, const Region& region,
                 double bucket_size)
      : points_(points), region_(region) {
    const double max_buckets = 4096.0;
    h_ = std::max({bucket_size, region.width() / max_buckets,
                   region.height() / max_buckets});
    nx_ = static_cast<std::size_t>(std::ceil(region.width() / h_)) + 1;
    ny_ = static_cast<std::size_t>(std::ceil(region.height() / h_)) + 1;
    start_.assign(nx_ * ny_ + 1, 0);
    std::vector<std::size_t> bucket(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      bucket[i] = bucket_of(points[i]);
      ++start_[bucket[i] + 1];
    }
    for (std::size_t b = 0; b < nx_ * ny_; ++b) start_[b + 1] += start_[b];
    order_.resize(points.size());
    auto fill = start_;
    for (std::size_t i = 0; i < points.size(); ++i) {
      order_[fill[bucket[i]]++] = i;
    }
  }

  // Bucket size giving roughly two points per bucket.
  static double default_bucket(std::size_t n, const Region& region) {
    return std::sqrt(2.0 * region.area() / std::max<double>(n, 1.0));
  }

  // Distance from q to the nearest indexed point other than `exclude`.
  double nearest(const Point& q, std::size_t exclude) const {
    double best = std::numeric_limits<double>::infinity();
    const auto [cx, cy] = cell(q);
    const std::size_t max_ring = std::max(nx_, ny_);
    for (std::size_t ring = 0; ring <= max_ring; ++ring) {
      visit_ring(cx, cy, ring, [&](std::size_t j) {
        if (j == exclude) return;
        best = std::min(best, distance(q, points_[j]));
      });
      // Points beyond this ring are at least ring*h away, up to rounding in
      // bucket assignment; one ring of slack keeps the result exact.
      if (ring >= 1 && best < static_cast<double>(ring - 1) * h_) break;
    }
    return best;
  }

  // Calls fn(j, d) for every indexed point j with candidate distance
  // d <= radius (excluding `exclude`).
  template <class Fn>
  void within(const Point& q, double radius, std::size_t exclude,
              Fn&& fn) const {
    const auto [cx, cy] = cell(q);
    const auto rings = static_cast<std::size_t>(std::ceil(radius / h_)) + 1;
    const long x0 = static_cast<long>(cx) - static_cast<long>(rings);
    const long x1 = static_cast<long>(cx) + static_cast<long>(rings);
    const long y0 = static_cast<long>(cy) - static_cast<long>(rings);
    const long y1 = static_cast<long>(cy) + static_cast<long>(rings);
    for (long y = std::max(y0, 0L); y <= std::min(y1, long(ny_) - 1); ++y) {
      for (long x = std::max(x0, 0L); x <= std::min(x1, long(nx_) - 1); ++x) {
        const std::size_t b = static_cast<std::size_t>(y) * nx_ + x;
        for (std::size_t k = start_[b]; k < start_[b + 1]; ++k) {
          const std::size_t j = order_[k];
          if (j == exclude) continue;
          const double d = distance(q, points_[j]);
          if (d <= radius) fn(j, d);
        }
      }
    }
  }

 private:
  std::pair<std::size_t, std::size_t> cell(const Point& p) const noexcept {
    const auto clampi = [](double v, std::size_t n) {
      if (!(v > 0.0)) return std::size_t{0};
      const auto i = static_cast<std::size_t>(v);
      return std::min(i, n - 1);
    };
    return {clampi((p.x - region_.xmin) / h_, nx_),
            clampi((p.y - region_.ymin) / h_, ny_)};
  }

  std::size_t bucket_of(const Point& p) const noexcept {
    const auto [x, y] = cell(p);
    return y * nx_ + x;
  }

  template <class Fn>
  void visit_ring(std::size_t cx, std::size_t cy, std::size_t ring,
                  Fn&& fn) const {
    const long r = static_cast<long>(ring);
    const long x0 = static_cast<long>(cx) - r, x1 = static_cast<long>(cx) + r;
    const long y0 = static_cast<long>(cy) - r, y1 = static_cast<long>(cy) + r;
    auto visit = [&](long x, long y) {
      if (x < 0 || y < 0 || x >= long(nx_) || y >= long(ny_)) return;
      const std::size_t b = static_cast<std::size_t>(y) * nx_ + x;
      for (std::size_t k = start_[b]; k < start_[b + 1]; ++k) fn(order_[k]);
    };
    if (r == 0) {
      visit(x0, y0);
      return;
    }
    for (long x = x0; x <= x1; ++x) {
      visit(x, y0);
      visit(x, y1);
    }
    for (long y = y0 + 1; y < y1; ++y) {
      visit(x0, y);
      visit(x1, y);
    }
  }

  std::span<const Point> points_;
  Region region_;
  double h_ = 1.0;
  std::size_t nx_ = 1, ny_ = 1;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> order_;
};

}  // namespace pointproc::detail
