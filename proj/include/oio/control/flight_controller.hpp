#pragma once

#include <cmath>
#include <vector>

#include "oio/control/kinematics.hpp"
#include "oio/control/pir.hpp"
#include "oio/core.hpp"
#include "oio/nav/action.hpp"

namespace oio::control {

// Actuator scaling and limits of the digital twin. The PIR outputs are in
// normalised actuator units; these gains convert them to plant commands.
struct TwinParams {
  PlantParams plant{};
  double dt = 0.1;                   // inner loop, 10 Hz
  double translation_gain = 20.0;    // m/s per actuator unit
  double altitude_gain = 20.0;
  double yaw_gain = 20.0;            // deg/s per actuator unit
  double max_speed = 0.6;            // m/s
  double max_climb = 1.0;            // m/s
  double max_yaw_rate = 90.0;        // deg/s
  double translation_integral_limit = 0.1;  // m s
  double altitude_integral_limit = 2.0;     // m s
  double yaw_integral_limit = 5.0;          // deg s
  double step_length = 0.30;         // m, discretised move
  double cruise_altitude = 1.0;      // m
  double position_tolerance = 0.005; // m
  double speed_tolerance = 0.02;     // m/s
  double heading_tolerance = 0.5;    // deg
  double primitive_timeout = 15.0;   // s
  double pause_duration = 1.0;       // s
};

// One inner-loop sample, reported to the caller for sensor integration.
struct TickSample {
  double t = 0.0;
  UavPose pose{};
};

struct PrimitiveResult {
  UavPose pose{};
  bool collision = false;
  bool landed = false;
  bool timed_out = false;
  int ticks = 0;
  double duration = 0.0;
};

// Position-hold and motion-primitive autopilot over the kinematic twin.
//
// `World` must provide `Vec3 wind(const Vec3& pos, double t) const` and
// `bool move_is_free(Vec2 from, Vec2 to) const`. `on_tick` receives every
// inner-loop sample (after it is accepted).
class FlightController {
 public:
  explicit FlightController(GainTable gains = {}, TwinParams params = {})
      : gains_(gains), p_(params) {}

  const GainTable& gains() const { return gains_; }
  const TwinParams& params() const { return p_; }

  template <class World, class OnTick>
  PrimitiveResult execute_primitive(const UavPose& start, nav::Action action, const World& world,
                                    double t0, OnTick&& on_tick) const {
    using nav::Action;
    const Vec3 p0 = start.position;
    const double psi0 = start.heading_deg;
    const Vec3 fwd = body_to_world(psi0, 1.0, 0.0, 0.0);
    const Vec3 left = body_to_world(psi0, 0.0, 1.0, 0.0);

    double target_f = 0.0, target_l = 0.0;
    double target_heading = psi0;
    double target_z = p_.cruise_altitude;
    bool translate = false, turn = false, land = false, hold = false;
    switch (action) {
      case Action::Surge: target_f = p_.step_length; translate = true; break;
      case Action::CastLeft: target_l = p_.step_length; translate = true; break;
      case Action::CastRight: target_l = -p_.step_length; translate = true; break;
      case Action::TurnLeft45:
      case Action::TurnRight45:
      case Action::TurnLeft90:
      case Action::TurnRight90:
        target_heading = psi0 + nav::turn_angle(action);
        turn = true;
        break;
      case Action::Pause: hold = true; break;
      case Action::Land: target_z = 0.0; land = true; break;
    }
    if (!land && start.position.z > 0.0) target_z = start.position.z;

    PirController pf(gains_.longitudinal, p_.dt, p_.translation_integral_limit);
    PirController pl(gains_.lateral, p_.dt, p_.translation_integral_limit);
    PirController pz(gains_.altitude, p_.dt, p_.altitude_integral_limit);
    PirController py(gains_.yaw, p_.dt, p_.yaw_integral_limit);

    PrimitiveResult res;
    UavPose pose = start;
    // Unwrapped heading keeps the yaw loop continuous across +-180.
    double heading_unwrapped = psi0;
    const int max_ticks = static_cast<int>(std::lround(
        (hold ? p_.pause_duration : p_.primitive_timeout) / p_.dt));
    for (int k = 1; k <= max_ticks; ++k) {
      const double t = t0 + k * p_.dt;
      const Vec3 rel = pose.position - p0;
      const double y_f = rel.x * fwd.x + rel.y * fwd.y;
      const double y_l = rel.x * left.x + rel.y * left.y;

      const double u_f = pf.step(target_f, y_f);
      const double u_l = pl.step(target_l, y_l);
      const double u_z = pz.step(target_z, pose.position.z);
      const double u_y = py.step(target_heading, heading_unwrapped);

      // Translation command built in the primitive frame, then expressed in
      // the current body frame.
      const double vf = std::clamp(p_.translation_gain * u_f, -p_.max_speed, p_.max_speed);
      const double vl = std::clamp(p_.translation_gain * u_l, -p_.max_speed, p_.max_speed);
      const double wx = vf * fwd.x + vl * left.x;
      const double wy = vf * fwd.y + vl * left.y;
      const double c = std::cos(deg2rad(pose.heading_deg));
      const double s = std::sin(deg2rad(pose.heading_deg));
      Controls u;
      u.forward = wx * c + wy * s;
      u.lateral = -wx * s + wy * c;
      u.vertical = std::clamp(p_.altitude_gain * u_z, -p_.max_climb, p_.max_climb);
      u.yaw_rate = std::clamp(p_.yaw_gain * u_y, -p_.max_yaw_rate, p_.max_yaw_rate);

      const Vec3 wind = world.wind(pose.position, t);
      UavPose next = kinematics_step(pose, u, wind, p_.dt, p_.plant);
      heading_unwrapped += next.yaw_rate * p_.dt;

      if (!land && !world.move_is_free(Vec2{pose.position.x, pose.position.y},
                                       Vec2{next.position.x, next.position.y})) {
        res.collision = true;
        res.ticks = k;
        res.duration = k * p_.dt;
        UavPose restored = start;
        restored.velocity = {};
        restored.yaw_rate = 0.0;
        res.pose = restored;
        return res;
      }
      // Ground speed, including wind drift.
      const double ground_speed = (next.position - pose.position).norm() / p_.dt;
      pose = next;
      on_tick(TickSample{t, pose});
      res.ticks = k;

      if (hold) continue;
      bool done = false;
      if (translate) {
        const Vec3 r2 = pose.position - p0;
        const double ef = target_f - (r2.x * fwd.x + r2.y * fwd.y);
        const double el = target_l - (r2.x * left.x + r2.y * left.y);
        done = std::hypot(ef, el) < p_.position_tolerance &&
               ground_speed < p_.speed_tolerance;
      } else if (turn) {
        done = std::abs(target_heading - heading_unwrapped) < p_.heading_tolerance &&
               std::abs(pose.yaw_rate) < 2.0 * p_.heading_tolerance;
      } else if (land) {
        done = pose.position.z < 0.02;
      }
      if (done) break;
      if (k == max_ticks) res.timed_out = true;
    }
    res.landed = land;
    res.duration = res.ticks * p_.dt;
    res.pose = pose;
    return res;
  }

  template <class World>
  PrimitiveResult execute_primitive(const UavPose& start, nav::Action action, const World& world,
                                    double t0 = 0.0) const {
    return execute_primitive(start, action, world, t0, [](const TickSample&) {});
  }

 private:
  GainTable gains_;
  TwinParams p_;
};

// Rigid world used by the twin tests: constant wind, no obstacles.
struct CalmWorld {
  Vec3 wind_vector{};
  Vec3 wind(const Vec3&, double) const { return wind_vector; }
  bool move_is_free(Vec2, Vec2) const { return true; }
};

// Step response of one axis loop closed around a first-order-lagged
// integrator, y'' = (K u - y') / tau. Used for attitude and altitude checks.
struct AxisPlant {
  double gain = 20.0;
  double tau = 0.3;
  double rate_limit = 1e9;
};

struct StepTrace {
  std::vector<double> t;
  std::vector<double> command;
  std::vector<double> response;
  std::vector<double> actuator;
};

inline StepTrace axis_step_response(PirGains gains, AxisPlant plant, double command,
                                    double duration, double dt = 0.1,
                                    double integral_limit = 1e9) {
  PirController pir(gains, dt, integral_limit);
  StepTrace tr;
  double y = 0.0, rate = 0.0;
  const int n = static_cast<int>(std::lround(duration / dt));
  const double a = 1.0 - std::exp(-dt / plant.tau);
  for (int k = 1; k <= n; ++k) {
    const double u = pir.step(command, y);
    const double rate_cmd = std::clamp(plant.gain * u, -plant.rate_limit, plant.rate_limit);
    rate += a * (rate_cmd - rate);
    y += rate * dt;
    tr.t.push_back(k * dt);
    tr.command.push_back(command);
    tr.response.push_back(y);
    tr.actuator.push_back(u);
  }
  return tr;
}

// Plants of the twin's attitude and altitude loops.
inline AxisPlant pitch_plant() { return {100.0, 0.05, 1e9}; }
inline AxisPlant roll_plant() { return {100.0, 0.05, 1e9}; }
inline AxisPlant altitude_plant() { return {20.0, 0.3, 1.0}; }
inline AxisPlant yaw_plant() { return {20.0, 0.2, 90.0}; }

}  // namespace oio::control
