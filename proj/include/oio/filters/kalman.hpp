#pragma once

#include <stdexcept>

namespace oio::filters {

// Scalar random-walk Kalman filter.
struct ScalarKalman {
  double q = 1e-4;  // process noise
  double r = 1e-2;  // measurement noise
  double x = 0.0;
  double p = 1.0;

  ScalarKalman() = default;
  ScalarKalman(double q_, double r_, double x0 = 0.0, double p0 = 1.0) : q(q_), r(r_), x(x0), p(p0) {
    if (!(r_ > 0.0) || !(q_ >= 0.0)) throw std::domain_error("ScalarKalman: need R > 0, Q >= 0");
  }
};

inline double kalman_update(ScalarKalman& kf, double z) {
  const double prior = kf.p + kf.q;
  const double gain = prior / (prior + kf.r);
  kf.x += gain * (z - kf.x);
  kf.p = (1.0 - gain) * prior;
  return kf.x;
}

}  // namespace oio::filters
