#pragma once

// Electrochemical channel: chronoamperometry governed by the Cottrell law,
// I(t) = n F A c sqrt(D) / sqrt(pi t), with CGS-consistent inputs (A in cm^2,
// c in mol/cm^3, D in cm^2/s) giving a current in amperes.
//
// Fast inference fits I(t) = a / sqrt(t) + b to the first `cutoff` seconds
// and extrapolates the full sequence; a is proportional to c sqrt(D).

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oio/core.hpp"
#include "oio/sensors/mox.hpp"

namespace oio::sensors {

struct EcParams {
  double electrons = 2.0;          // n_e
  double faraday = 96485.0;        // C/mol
  double area = 2.25;              // cm^2
  double concentration = 1e-6;     // c_k, mol/cm^3
  double diffusion = 1e-5;         // D_k, cm^2/s
  double sample_rate = 100.0;      // Hz
  double cutoff = 1.0;             // s, measurement window kept
  double full_duration = 6.0;      // s, nominal chronoamperometry length
  double read_period = 2.0;        // s between navigation readings
  double noise_fraction = 0.01;    // additive noise sigma relative to I(cutoff)
  double concentration_scale = 1e-6;  // mol/cm^3 per plume concentration unit
  double sensitivity = 20.0;       // response per concentration unit

  void validate() const {
    if (!(electrons > 0.0 && faraday > 0.0 && area > 0.0 && concentration >= 0.0 &&
          diffusion > 0.0 && sample_rate > 0.0 && cutoff > 0.0 && full_duration > 0.0 &&
          read_period > 0.0 && noise_fraction >= 0.0 && concentration_scale > 0.0)) {
      throw ConfigError("ec params: physical constants must be positive");
    }
    if (!(cutoff < full_duration)) throw ConfigError("ec params: cutoff must be < full_duration");
  }
};

// Cottrell current at time t for the analyte concentration stored in p.
inline double cottrell_current(const EcParams& p, double t) {
  if (!(t > 0.0)) throw std::domain_error("cottrell_current: t must be > 0");
  return p.electrons * p.faraday * p.area * p.concentration * std::sqrt(p.diffusion) /
         std::sqrt(kPi * t);
}

// Cottrell amplitude a such that I(t) = a / sqrt(t).
inline double cottrell_amplitude(const EcParams& p) {
  return p.electrons * p.faraday * p.area * p.concentration * std::sqrt(p.diffusion) /
         std::sqrt(kPi);
}

struct TimedCurrent {
  double t = 0.0;
  double current = 0.0;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FastInference {
  double amplitude = 0.0;  // a
  double offset = 0.0;     // b
  std::vector<TimedCurrent> predicted;  // fit evaluated on the full-duration grid
};

inline constexpr std::size_t kMinFitSamples = 10;

// Linear least squares on the regressor 1 / sqrt(t).
inline FastInference ec_fast_infer(const std::vector<TimedCurrent>& samples, const EcParams& p) {
  if (samples.size() < kMinFitSamples) {
    throw FitError("ec_fast_infer: at least 10 samples are required");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& s : samples) {
    if (!(s.t > 0.0) || s.t > p.cutoff + 1e-12) {
      throw FitError("ec_fast_infer: sample time outside (0, cutoff]");
    }
    const double x = 1.0 / std::sqrt(s.t);
    sx += x;
    sy += s.current;
    sxx += x * x;
    sxy += x * s.current;
  }
  const double n = static_cast<double>(samples.size());
  const double det = n * sxx - sx * sx;
  if (!(std::abs(det) > 1e-12 * n * sxx)) throw FitError("ec_fast_infer: degenerate design matrix");

  FastInference fit;
  fit.amplitude = (n * sxy - sx * sy) / det;
  fit.offset = (sy - fit.amplitude * sx) / n;
  const auto steps = static_cast<std::size_t>(std::llround(p.full_duration * p.sample_rate));
  fit.predicted.reserve(steps);
  for (std::size_t i = 1; i <= steps; ++i) {
    const double t = static_cast<double>(i) / p.sample_rate;
    fit.predicted.push_back({t, fit.amplitude / std::sqrt(t) + fit.offset});
  }
  return fit;
}

// Synthetic chronoamperometry window sampled at `rate` over (0, duration].
// Noise, when an rng is supplied, is Gaussian with sigma = noise_fraction *
// I(cutoff).
inline std::vector<TimedCurrent> chronoamperometry_trace(const EcParams& p, double rate,
                                                         double duration, Rng* rng) {
  const auto n = static_cast<std::size_t>(std::llround(duration * rate));
  const double sigma = p.noise_fraction * cottrell_current(p, p.cutoff);
  std::vector<TimedCurrent> out;
  out.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / rate;
    double c = cottrell_current(p, t);
    if (rng != nullptr && sigma > 0.0) c += sigma * standard_normal(*rng);
    out.push_back({t, c});
  }
  return out;
}

// One navigation reading: run the truncated measurement at the plume
// concentration and report the fitted amplitude. The response is the
// amplitude normalised by the amplitude of one concentration unit, times the
// channel sensitivity.
inline SensorReading ec_read(const EcParams& base, double plume_concentration, Rng* rng) {
  EcParams p = base;
  p.concentration = std::max(plume_concentration, 0.0) * base.concentration_scale;
  EcParams unit = base;
  unit.concentration = base.concentration_scale;
  const double unit_amp = cottrell_amplitude(unit);

  // Noise is referenced to a unit-concentration current so that clean air
  // still reads as noise rather than as an exact zero.
  const auto n = static_cast<std::size_t>(std::llround(p.cutoff * p.sample_rate));
  const double sigma = base.noise_fraction * cottrell_current(unit, p.cutoff);
  std::vector<TimedCurrent> window;
  window.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / p.sample_rate;
    double c = p.concentration > 0.0 ? cottrell_current(p, t) : 0.0;
    if (rng != nullptr && sigma > 0.0) c += sigma * standard_normal(*rng);
    window.push_back({t, c});
  }
  const FastInference fit = ec_fast_infer(window, p);
  SensorReading r;
  r.value = fit.amplitude;
  r.response = base.sensitivity * fit.amplitude / unit_amp;
  return r;
}

}  // namespace oio::sensors
