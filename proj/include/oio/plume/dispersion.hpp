#pragma once

#include <cmath>

#include "oio/core.hpp"
#include "oio/plume/config.hpp"

namespace oio::plume {

struct Sigmas {
  double y = 0.0;
  double z = 0.0;
};

// Briggs (1973) open-country dispersion coefficients, x in metres downwind.
// Class G is not part of the Briggs set; it continues the E -> F trend.
inline Sigmas briggs_rural(StabilityClass cls, double x) {
  const double ry = 1.0 / std::sqrt(1.0 + 0.0001 * x);
  switch (cls) {
    case StabilityClass::A: return {0.22 * x * ry, 0.20 * x};
    case StabilityClass::B: return {0.16 * x * ry, 0.12 * x};
    case StabilityClass::C: return {0.11 * x * ry, 0.08 * x / std::sqrt(1.0 + 0.0002 * x)};
    case StabilityClass::D: return {0.08 * x * ry, 0.06 * x / std::sqrt(1.0 + 0.0015 * x)};
    case StabilityClass::E: return {0.06 * x * ry, 0.03 * x / (1.0 + 0.0003 * x)};
    case StabilityClass::F: return {0.04 * x * ry, 0.016 * x / (1.0 + 0.0003 * x)};
    case StabilityClass::G: return {0.02 * x * ry, 0.008 * x / (1.0 + 0.0003 * x)};
  }
  return {};
}

// Dispersion widths actually used by the field: Briggs widths combined in
// quadrature with the source's initial spread, then scaled by `diffusion`.
inline Sigmas plume_sigmas(const PlumeConfig& cfg, double downwind) {
  const Sigmas b = briggs_rural(cfg.stability, downwind);
  const double s0 = cfg.initial_spread * cfg.initial_spread;
  return {cfg.diffusion * std::sqrt(b.y * b.y + s0), cfg.diffusion * std::sqrt(b.z * b.z + s0)};
}

// Wind speed used in the dilution term; the closed form is singular in calm air.
inline constexpr double kMinDilutionWind = 0.1;

// Steady Gaussian plume with ground reflection, in source-aligned coordinates
// (downwind, crosswind, height above ground). Zero at or upwind of the source.
inline double gaussian_plume(const PlumeConfig& cfg, double downwind, double crosswind, double z) {
  if (!(downwind > 0.0)) return 0.0;
  const Sigmas s = plume_sigmas(cfg, downwind);
  if (!(s.y > 0.0 && s.z > 0.0)) return 0.0;
  const double u = std::max(cfg.wind_speed, kMinDilutionWind);
  const double H = cfg.source_height;
  const double lateral = std::exp(-crosswind * crosswind / (2.0 * s.y * s.y));
  const double vertical = std::exp(-(z - H) * (z - H) / (2.0 * s.z * s.z)) +
                          std::exp(-(z + H) * (z + H) / (2.0 * s.z * s.z));
  return cfg.emission_rate / (2.0 * kPi * u * s.y * s.z) * lateral * vertical;
}

}  // namespace oio::plume
