#pragma once

// Blank pockets: ellipsoids whose centres form a homogeneous Poisson process
// in the frame moving with the mean wind. For a Boolean model the covered
// fraction is 1 - exp(-lambda * V), so the intensity is chosen as
// lambda = -ln(1 - sparsity) / V.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "oio/core.hpp"
#include "oio/plume/config.hpp"

namespace oio::plume {

class BlankMask {
 public:
  BlankMask() = default;

  bool empty() const { return !all_ && centres_.empty(); }
  bool all() const { return all_; }
  std::size_t blob_count() const { return centres_.size(); }

  // True when (pos, t) lies inside a blank pocket.
  bool masked(const Vec3& pos, double t) const {
    if (all_) return true;
    if (centres_.empty()) return false;
    const double xc = pos.x - wind_ * t;
    const long b = bucket_of(xc);
    for (long k = b - 1; k <= b + 1; ++k) {
      if (k < 0 || k >= static_cast<long>(bucket_start_.size()) - 1) continue;
      for (std::size_t i = bucket_start_[k]; i < bucket_start_[k + 1]; ++i) {
        const Vec3& c = centres_[i];
        const double dx = (xc - c.x) / shape_.along_wind;
        const double dy = (pos.y - c.y) / shape_.cross_wind;
        const double dz = (pos.z - c.z) / shape_.vertical;
        if (dx * dx + dy * dy + dz * dz <= 1.0) return true;
      }
    }
    return false;
  }

  friend BlankMask insert_blanks(Rng& rng, double sparsity, const Vec3& bounds, double duration,
                                 double wind_speed, const BlankShape& shape);

 private:
  long bucket_of(double xc) const {
    return static_cast<long>(std::floor((xc - x_min_) / bucket_width_));
  }

  bool all_ = false;
  double wind_ = 0.0;
  BlankShape shape_{};
  double x_min_ = 0.0;
  double bucket_width_ = 1.0;
  std::vector<Vec3> centres_;             // sorted by co-moving x
  std::vector<std::size_t> bucket_start_;  // CSR offsets into centres_
};

// Builds a blank schedule covering `bounds` over [0, duration]. The mask is
// stationary in space and time, so any (cell, tick) sample is covered with
// probability `sparsity`.
inline BlankMask insert_blanks(Rng& rng, double sparsity, const Vec3& bounds, double duration,
                               double wind_speed, const BlankShape& shape = {}) {
  if (!(sparsity >= 0.0 && sparsity <= 1.0)) {
    throw std::domain_error("insert_blanks: sparsity must lie in [0, 1]");
  }
  BlankMask m;
  m.shape_ = shape;
  m.wind_ = wind_speed;
  if (sparsity == 0.0) return m;
  if (sparsity >= 1.0) {
    m.all_ = true;
    return m;
  }

  const double volume = 4.0 / 3.0 * kPi * shape.along_wind * shape.cross_wind * shape.vertical;
  const double lambda = -std::log1p(-sparsity) / volume;

  // Co-moving x range that can reach the box during [0, duration].
  const double x_lo = -wind_speed * duration - shape.along_wind;
  const double x_hi = bounds.x + shape.along_wind;
  const double y_lo = -shape.cross_wind, y_hi = bounds.y + shape.cross_wind;
  const double z_lo = -shape.vertical, z_hi = bounds.z + shape.vertical;
  const double area = (y_hi - y_lo) * (z_hi - z_lo);

  // Poisson process along x with exponential gaps; y, z uniform.
  const double rate = lambda * area;
  double x = x_lo;
  for (;;) {
    x += -std::log(1.0 - uniform01(rng)) / rate;
    if (x > x_hi) break;
    const double y = y_lo + (y_hi - y_lo) * uniform01(rng);
    const double z = z_lo + (z_hi - z_lo) * uniform01(rng);
    m.centres_.push_back({x, y, z});
  }

  m.x_min_ = x_lo;
  m.bucket_width_ = 2.0 * shape.along_wind;
  const std::size_t nb =
      static_cast<std::size_t>(std::ceil((x_hi - x_lo) / m.bucket_width_)) + 1;
  m.bucket_start_.assign(nb + 1, 0);
  std::size_t i = 0;
  for (std::size_t b = 0; b < nb; ++b) {
    m.bucket_start_[b] = i;
    const double edge = x_lo + static_cast<double>(b + 1) * m.bucket_width_;
    while (i < m.centres_.size() && m.centres_[i].x < edge) ++i;
  }
  m.bucket_start_[nb] = m.centres_.size();
  return m;
}

}  // namespace oio::plume
