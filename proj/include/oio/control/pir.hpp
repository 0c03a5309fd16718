#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace oio::control {

struct PirGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;

  bool valid() const { return kp >= 0.0 && ki >= 0.0 && kd >= 0.0; }
};

// Gains per loop. Ranged entries of the reference table default to their
// midpoints: altitude kd 0.060-0.080, pitch kp 0.010-0.012, yaw kp
// 0.100-0.200, velocity kd 0.000-0.010.
struct GainTable {
  PirGains roll{0.010, 0.002, 0.006};
  PirGains pitch{0.011, 0.002, 0.010};
  PirGains yaw{0.150, 0.012, 0.100};
  PirGains altitude{0.070, 0.015, 0.070};
  PirGains lateral{0.100, 0.050, 0.005};
  PirGains longitudinal{0.100, 0.050, 0.005};

  bool valid() const {
    return roll.valid() && pitch.valid() && yaw.valid() && altitude.valid() && lateral.valid() &&
           longitudinal.valid();
  }
};

// Proportional-integral controller with rate feedback: the derivative acts on
// the measurement, not on the error, so command steps do not kick the output.
class PirController {
 public:
  PirController() = default;
  PirController(PirGains gains, double dt,
                double integral_limit = std::numeric_limits<double>::infinity())
      : gains_(gains), dt_(dt), integral_limit_(integral_limit) {}

  double step(double command, double measurement) {
    const double e = command - measurement;
    integral_ = std::clamp(integral_ + e * dt_, -integral_limit_, integral_limit_);
    const double rate = has_prev_ ? (measurement - prev_) / dt_ : 0.0;
    prev_ = measurement;
    has_prev_ = true;
    return gains_.kp * e + gains_.ki * integral_ - gains_.kd * rate;
  }

  void reset() {
    integral_ = 0.0;
    prev_ = 0.0;
    has_prev_ = false;
  }

  double integral() const { return integral_; }
  double integral_limit() const { return integral_limit_; }
  const PirGains& gains() const { return gains_; }
  double dt() const { return dt_; }

 private:
  PirGains gains_{};
  double dt_ = 0.1;
  double integral_limit_ = std::numeric_limits<double>::infinity();
  double integral_ = 0.0;
  double prev_ = 0.0;
  bool has_prev_ = false;
};

// Functional form of one controller update.
inline double pir_step(PirController& state, double command, double measurement) {
  return state.step(command, measurement);
}

}  // namespace oio::control
