#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oio/core.hpp"

namespace oio::filters {

enum class HeadingMode { Hold, Turn, Cast };

struct HeadingEstimate {
  double tau_hat = 0.0;  // s
  double phi = 0.0;      // deg; 0 unless mode == Turn
  double raw_phi = 0.0;  // deg, before the dead-zone
  HeadingMode mode = HeadingMode::Hold;
};

inline constexpr double kHoldZoneDeg = 5.0;

// Expected inter-sensor lag for a planar front: tau = -dx * u / s^2.
inline double planar_front_lag(double separation, double front_speed, double wind_speed) {
  if (!(wind_speed > 0.0)) throw std::domain_error("planar_front_lag: wind speed must be > 0");
  return -separation * front_speed / (wind_speed * wind_speed);
}

// phi = asin(tau * s / d), with the argument clamped to [-1, 1]. Angles
// strictly inside (-5, 5) degrees hold the current heading.
inline HeadingEstimate heading_from_lag(double tau_hat, double wind_speed, double baseline) {
  if (!(baseline > 0.0)) throw std::domain_error("heading_from_lag: baseline d must be > 0");
  if (!(wind_speed >= 0.0)) throw std::domain_error("heading_from_lag: wind speed must be >= 0");
  double arg = tau_hat * wind_speed / baseline;
  if (std::isnan(arg)) arg = 0.0;
  arg = std::clamp(arg, -1.0, 1.0);
  HeadingEstimate h;
  h.tau_hat = tau_hat;
  h.raw_phi = std::clamp(rad2deg(std::asin(arg)), -90.0, 90.0);
  if (std::abs(h.raw_phi) < kHoldZoneDeg) {
    h.mode = HeadingMode::Hold;
    h.phi = 0.0;
  } else {
    h.mode = HeadingMode::Turn;
    h.phi = std::copysign(std::clamp(std::abs(h.raw_phi), kHoldZoneDeg, 90.0), h.raw_phi);
  }
  return h;
}

}  // namespace oio::filters
