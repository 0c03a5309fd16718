#pragma once

// Dryden gust model (MIL-F-8785C low-altitude form) realised as discrete
// shaping filters driven by unit white noise at the simulation tick.

#include <array>
#include <cmath>
#include <vector>

#include "oio/core.hpp"

namespace oio::plume {

struct DrydenScales {
  double sigma_u = 0.0;
  double sigma_v = 0.0;
  double sigma_w = 0.0;
  double length_u = 0.0;  // m
  double length_v = 0.0;
  double length_w = 0.0;
};

// Low-altitude intensities and scale lengths. `sigma_w` is the vertical RMS;
// altitudes below 10 ft use the 10 ft values.
inline DrydenScales dryden_low_altitude(double altitude_m, double sigma_w) {
  constexpr double kFt = 0.3048;
  const double h = std::max(altitude_m / kFt, 10.0);
  const double shape = 0.177 + 0.000823 * h;
  DrydenScales s;
  s.sigma_w = sigma_w;
  s.sigma_u = sigma_w / std::pow(shape, 0.4);
  s.sigma_v = s.sigma_u;
  s.length_w = h * kFt;
  s.length_u = h / std::pow(shape, 1.2) * kFt;
  s.length_v = s.length_u;
  return s;
}

// One longitudinal AR(1) filter: exact discretisation of sigma*sqrt(2L/piV)/(1+(L/V)s).
class DrydenFirstOrder {
 public:
  DrydenFirstOrder(double sigma, double length, double airspeed, double dt)
      : sigma_(sigma), a_(std::exp(-airspeed * dt / length)) {}

  void init(Rng& rng) { x_ = sigma_ * standard_normal(rng); }

  double step(Rng& rng) {
    x_ = a_ * x_ + sigma_ * std::sqrt(1.0 - a_ * a_) * standard_normal(rng);
    return x_;
  }

 private:
  double sigma_;
  double a_;
  double x_ = 0.0;
};

// Lateral/vertical filter (1 + sqrt(3) T s) / (1 + T s)^2, T = L / V. The
// repeated pole makes exp(A dt) closed-form; the output is scaled so its
// stationary standard deviation is exactly `sigma`.
class DrydenSecondOrder {
 public:
  DrydenSecondOrder(double sigma, double length, double airspeed, double dt) {
    const double T = length / airspeed;
    const double e = std::exp(-dt / T);
    // A = [[0, 1], [-1/T^2, -2/T]];  N = A + I/T is nilpotent.
    const double n00 = 1.0 / T, n01 = 1.0, n10 = -1.0 / (T * T), n11 = -1.0 / T;
    ad_ = {e * (1.0 + dt * n00), e * dt * n01, e * dt * n10, e * (1.0 + dt * n11)};
    bd_ = {0.0, std::sqrt(dt)};
    c_ = {1.0 / (T * T), std::sqrt(3.0) / T};

    // Stationary covariance P = Ad P Ad' + Bd Bd' by fixed-point iteration.
    std::array<double, 4> p{0.0, 0.0, 0.0, 0.0};
    for (int it = 0; it < 200000; ++it) {
      const std::array<double, 4> ap{ad_[0] * p[0] + ad_[1] * p[2], ad_[0] * p[1] + ad_[1] * p[3],
                                     ad_[2] * p[0] + ad_[3] * p[2], ad_[2] * p[1] + ad_[3] * p[3]};
      std::array<double, 4> next{ap[0] * ad_[0] + ap[1] * ad_[1], ap[0] * ad_[2] + ap[1] * ad_[3],
                                 ap[2] * ad_[0] + ap[3] * ad_[1], ap[2] * ad_[2] + ap[3] * ad_[3]};
      next[0] += bd_[0] * bd_[0];
      next[1] += bd_[0] * bd_[1];
      next[2] += bd_[1] * bd_[0];
      next[3] += bd_[1] * bd_[1];
      double diff = 0.0;
      for (int i = 0; i < 4; ++i) diff = std::max(diff, std::abs(next[i] - p[i]));
      p = next;
      if (diff <= 1e-15 * std::max(1.0, std::abs(p[3]))) break;
    }
    p_ = p;
    const double var = c_[0] * c_[0] * p[0] + 2.0 * c_[0] * c_[1] * p[1] + c_[1] * c_[1] * p[3];
    gain_ = var > 0.0 ? sigma / std::sqrt(var) : 0.0;
  }

  // Draw the initial state from the stationary distribution (Cholesky of P).
  void init(Rng& rng) {
    const double l00 = std::sqrt(std::max(p_[0], 0.0));
    const double l10 = l00 > 0.0 ? p_[1] / l00 : 0.0;
    const double l11 = std::sqrt(std::max(p_[3] - l10 * l10, 0.0));
    const double n0 = standard_normal(rng);
    const double n1 = standard_normal(rng);
    x_ = {l00 * n0, l10 * n0 + l11 * n1};
  }

  double step(Rng& rng) {
    const double eta = standard_normal(rng);
    const std::array<double, 2> nx{ad_[0] * x_[0] + ad_[1] * x_[1] + bd_[0] * eta,
                                   ad_[2] * x_[0] + ad_[3] * x_[1] + bd_[1] * eta};
    x_ = nx;
    return gain_ * (c_[0] * x_[0] + c_[1] * x_[1]);
  }

 private:
  std::array<double, 4> ad_{};
  std::array<double, 2> bd_{};
  std::array<double, 2> c_{};
  std::array<double, 4> p_{};
  std::array<double, 2> x_{};
  double gain_ = 0.0;
};

// Precomputed gust sequence on the tick grid [0, horizon].
class GustTable {
 public:
  GustTable() = default;

  GustTable(const DrydenScales& scales, double airspeed, double dt, double horizon, Rng rng)
      : dt_(dt) {
    const std::size_t n = static_cast<std::size_t>(std::ceil(horizon / dt)) + 1;
    u_.assign(n, 0.0);
    v_.assign(n, 0.0);
    w_.assign(n, 0.0);
    if (scales.sigma_w <= 0.0) return;
    DrydenFirstOrder fu(scales.sigma_u, scales.length_u, airspeed, dt);
    DrydenSecondOrder fv(scales.sigma_v, scales.length_v, airspeed, dt);
    DrydenSecondOrder fw(scales.sigma_w, scales.length_w, airspeed, dt);
    fu.init(rng);
    fv.init(rng);
    fw.init(rng);
    for (std::size_t i = 0; i < n; ++i) {
      u_[i] = fu.step(rng);
      v_[i] = fv.step(rng);
      w_[i] = fw.step(rng);
    }
  }

  std::size_t size() const { return u_.size(); }
  double dt() const { return dt_; }

  // Tick index for a time on (or near) the tick grid, clamped into the table.
  std::size_t index(double t) const {
    if (u_.empty()) return 0;
    const double k = std::round(t / dt_);
    if (k <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(k), u_.size() - 1);
  }

  Vec3 at_index(std::size_t i) const {
    if (u_.empty()) return {};
    return {u_[i], v_[i], w_[i]};
  }

 private:
  double dt_ = 0.1;
  std::vector<double> u_, v_, w_;
};

}  // namespace oio::plume
