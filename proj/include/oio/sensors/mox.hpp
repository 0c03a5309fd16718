#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oio/core.hpp"

namespace oio::sensors {

enum class Channel { Left, Right };

struct SensorReading {
  double t = 0.0;
  Channel channel = Channel::Left;
  double value = 0.0;     // raw output: load voltage (MOX) or fitted amplitude (EC)
  double response = 0.0;  // baseline-relative response used by navigation
};

// Metal-oxide sensor read through a load-resistor divider.
struct MoxParams {
  double circuit_voltage = 5.0;     // Vc, V
  double load_resistance = 10e3;    // RL, ohm
  double clean_air_resistance = 100e3;  // R0, ohm
  double sensitivity = 20.0;        // conductance gain per concentration unit
  double response_tau = 0.8;        // s
  double noise_sigma = 0.002;       // V
  double sample_rate = 1.0;         // Hz

  void validate() const {
    if (!(circuit_voltage > 0.0 && load_resistance > 0.0 && clean_air_resistance > 0.0 &&
          sensitivity > 0.0 && response_tau > 0.0 && noise_sigma >= 0.0 && sample_rate > 0.0)) {
      throw ConfigError("mox params: all parameters must be positive");
    }
  }
};

// Sensor resistance from the load-resistor voltage: Rs = (Vc / VRL - 1) RL.
inline double mox_resistance(double vc, double vrl, double rl) {
  if (!(vrl > 0.0)) throw std::domain_error("mox_resistance: VRL must be > 0");
  if (vrl > vc) throw std::domain_error("mox_resistance: VRL exceeds the circuit voltage");
  return (vc / vrl - 1.0) * rl;
}

// Sensing-layer resistance under exposure: conductance rises linearly with
// concentration, Rs = R0 / (1 + S c).
inline double mox_sensor_resistance(const MoxParams& p, double concentration) {
  return p.clean_air_resistance / (1.0 + p.sensitivity * std::max(concentration, 0.0));
}

// Steady-state load voltage; saturating and increasing in concentration.
inline double mox_target_voltage(const MoxParams& p, double concentration) {
  const double rs = mox_sensor_resistance(p, concentration);
  return p.circuit_voltage * p.load_resistance / (rs + p.load_resistance);
}

// Baseline-relative response R0 / Rs - 1, which equals S c at steady state.
// Voltages are clamped into the physical range before inversion.
inline double mox_response(const MoxParams& p, double vrl) {
  const double v = std::clamp(vrl, 1e-9 * p.circuit_voltage, p.circuit_voltage);
  const double rs = mox_resistance(p.circuit_voltage, v, p.load_resistance);
  if (rs <= 0.0) return p.clean_air_resistance / (1e-9 * p.load_resistance) - 1.0;
  return p.clean_air_resistance / rs - 1.0;
}

// First-order lag state of one MOX channel.
struct MoxState {
  double voltage = 0.0;
  bool initialized = false;
};

// Advances the lag by dt towards the target voltage and returns the noisy
// reading. The first call starts the channel settled at its target.
inline SensorReading mox_read(MoxState& state, const MoxParams& p, double concentration, double dt,
                              Rng* rng) {
  if (!(dt > 0.0)) throw std::domain_error("mox_read: dt must be > 0");
  const double target = mox_target_voltage(p, concentration);
  if (!state.initialized) {
    state.voltage = target;
    state.initialized = true;
  } else {
    state.voltage += (target - state.voltage) * (1.0 - std::exp(-dt / p.response_tau));
  }
  SensorReading r;
  r.value = state.voltage;
  if (rng != nullptr && p.noise_sigma > 0.0) r.value += p.noise_sigma * standard_normal(*rng);
  r.response = mox_response(p, r.value);
  return r;
}

}  // namespace oio::sensors
