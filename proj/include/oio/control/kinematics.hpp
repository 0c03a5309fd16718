#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oio/core.hpp"

namespace oio::control {

struct UavPose {
  Vec3 position{};
  double heading_deg = 0.0;  // [-180, 180), 0 = +x, counter-clockwise positive
  Vec3 velocity{};           // world frame, m/s
  double yaw_rate = 0.0;     // deg/s
};

// Body-frame velocity commands and yaw-rate command.
struct Controls {
  double forward = 0.0;   // m/s
  double lateral = 0.0;   // m/s, left positive
  double vertical = 0.0;  // m/s
  double yaw_rate = 0.0;  // deg/s
};

struct PlantParams {
  double tau_velocity = 0.3;  // s, first-order velocity response
  double tau_yaw = 0.2;       // s, first-order yaw-rate response
  double k_drift = 0.05;      // fraction of the wind that pushes the airframe
  double max_altitude = 3.0;
};

inline Vec3 body_to_world(double heading_deg, double forward, double lateral, double vertical) {
  const double c = std::cos(deg2rad(heading_deg));
  const double s = std::sin(deg2rad(heading_deg));
  return {forward * c - lateral * s, forward * s + lateral * c, vertical};
}

// First-order velocity-command plant with wind drift. Velocities relax
// towards the commands; position integrates velocity plus k_drift * wind.
inline UavPose kinematics_step(const UavPose& pose, const Controls& controls, const Vec3& wind,
                               double dt, const PlantParams& plant = {}) {
  if (!(dt > 0.0 && dt <= 0.2)) throw std::domain_error("kinematics_step: dt must lie in (0, 0.2]");
  UavPose next = pose;
  const Vec3 cmd = body_to_world(pose.heading_deg, controls.forward, controls.lateral,
                                 controls.vertical);
  const double av = 1.0 - std::exp(-dt / plant.tau_velocity);
  next.velocity = pose.velocity + av * (cmd - pose.velocity);
  const double ay = 1.0 - std::exp(-dt / plant.tau_yaw);
  next.yaw_rate = pose.yaw_rate + ay * (controls.yaw_rate - pose.yaw_rate);
  next.position = pose.position + dt * (next.velocity + plant.k_drift * wind);
  next.position.z = std::clamp(next.position.z, 0.0, plant.max_altitude);
  next.heading_deg = wrap_deg(pose.heading_deg + next.yaw_rate * dt);
  return next;
}

}  // namespace oio::control
