#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oio/control/kinematics.hpp"
#include "oio/core.hpp"
#include "oio/plume/field.hpp"
#include "oio/sensors/ec.hpp"
#include "oio/sensors/mox.hpp"

namespace oio::sensors {

enum class SensorKind { Mox, Ec };

inline SensorKind parse_sensor_kind(const std::string& s) {
  if (s == "mox" || s == "MOX") return SensorKind::Mox;
  if (s == "ec" || s == "EC") return SensorKind::Ec;
  throw ConfigError("unknown sensor type '" + s + "'");
}

inline std::string to_string(SensorKind k) { return k == SensorKind::Mox ? "mox" : "ec"; }

// Antenna placement in the body frame (forward, left, up). The two sensors sit
// on top of the airframe, ahead of the rotor plane, on a lateral baseline.
struct StereoGeometry {
  double left_lateral = 0.10;   // x_L, m (left positive)
  double right_lateral = -0.10; // x_R, m
  double forward = 0.10;        // m ahead of the centre of mass
  double up = 0.05;             // m above the centre of mass

  double separation() const { return left_lateral - right_lateral; }  // delta x
  double baseline() const { return std::abs(separation()); }           // d

  void validate() const {
    if (separation() == 0.0) throw ConfigError("stereo geometry: sensors must be separated");
  }
};

inline std::pair<Vec3, Vec3> antenna_positions(const StereoGeometry& g,
                                               const control::UavPose& pose) {
  const Vec3 l = control::body_to_world(pose.heading_deg, g.forward, g.left_lateral, g.up);
  const Vec3 r = control::body_to_world(pose.heading_deg, g.forward, g.right_lateral, g.up);
  return {pose.position + l, pose.position + r};
}

// Clamps an antenna position into the field bounds (antennas may poke a few
// centimetres past a wall the body is hugging).
inline Vec3 clamp_to_field(const plume::PlumeField& field, Vec3 p) {
  const Vec3& b = field.config().bounds;
  return {std::clamp(p.x, 0.0, b.x), std::clamp(p.y, 0.0, b.y), std::clamp(p.z, 0.0, b.z)};
}

struct StereoReading {
  SensorReading left;
  SensorReading right;
};

// Noise-free, lag-free snapshot of both channels through the static sensor
// map, at time t.
inline StereoReading sample_stereo(const StereoGeometry& geom, const plume::PlumeField& field,
                                   const control::UavPose& pose, double t,
                                   const MoxParams& mox = {}) {
  if (!field.in_bounds(pose.position)) throw std::domain_error("sample_stereo: pose out of bounds");
  const auto [pl, pr] = antenna_positions(geom, pose);
  const double cl = field.concentration_at(clamp_to_field(field, pl), t);
  const double cr = field.concentration_at(clamp_to_field(field, pr), t);
  StereoReading out;
  out.left = {t, Channel::Left, mox_target_voltage(mox, cl), mox.sensitivity * cl};
  out.right = {t, Channel::Right, mox_target_voltage(mox, cr), mox.sensitivity * cr};
  return out;
}

struct RigParams {
  SensorKind kind = SensorKind::Mox;
  MoxParams mox{};
  EcParams ec{};
  StereoGeometry geometry{};
  bool noise = true;
};

// Streaming two-channel sensor. `advance` is called once per inner-loop tick;
// it integrates the MOX lag and emits readings on a jitter-free schedule
// (MOX every 1 / sample_rate, EC every read_period with the value available
// `cutoff` seconds after the measurement starts).
class StereoRig {
 public:
  StereoRig(RigParams params, std::uint64_t seed)
      : p_(std::move(params)),
        rng_left_(make_rng(seed, Stream::SensorLeft)),
        rng_right_(make_rng(seed, Stream::SensorRight)) {
    p_.mox.validate();
    p_.ec.validate();
    p_.geometry.validate();
  }

  const RigParams& params() const { return p_; }

  void start(double t0) {
    t0_ = t0;
    next_index_ = 0;
    last_t_.reset();
    left_ = MoxState{};
    right_ = MoxState{};
    pending_.reset();
  }

  double period() const {
    return p_.kind == SensorKind::Mox ? 1.0 / p_.mox.sample_rate : p_.ec.read_period;
  }

  // Scheduled time of the k-th reading.
  double schedule_time(std::size_t k) const {
    const double lag = p_.kind == SensorKind::Ec ? p_.ec.cutoff : 0.0;
    return t0_ + static_cast<double>(k) * period() + lag;
  }

  // Latest lag-filtered (noise-free) channel values, for the stereo lag buffer.
  double raw_left() const { return raw_left_; }
  double raw_right() const { return raw_right_; }

  std::vector<StereoReading> advance(const plume::PlumeField& field, const control::UavPose& pose,
                                     double t) {
    const auto [pl, pr] = antenna_positions(p_.geometry, pose);
    const double cl = field.concentration_at(clamp_to_field(field, pl), t);
    const double cr = field.concentration_at(clamp_to_field(field, pr), t);
    const double dt = last_t_ ? t - *last_t_ : 0.0;
    last_t_ = t;

    std::vector<StereoReading> out;
    if (p_.kind == SensorKind::Mox) {
      const double step = dt > 0.0 ? dt : 1e-3;
      const SensorReading l = mox_read(left_, p_.mox, cl, step, nullptr);
      const SensorReading r = mox_read(right_, p_.mox, cr, step, nullptr);
      raw_left_ = l.response;
      raw_right_ = r.response;
      constexpr double kEps = 1e-9;
      while (schedule_time(next_index_) <= t + kEps) {
        const double ts = schedule_time(next_index_++);
        out.push_back(emit_mox(ts));
      }
    } else {
      raw_left_ = p_.ec.sensitivity * cl;
      raw_right_ = p_.ec.sensitivity * cr;
      constexpr double kEps = 1e-9;
      // A measurement starts at each period boundary; its value is reported
      // once the truncated window has elapsed.
      const double start_k = t0_ + static_cast<double>(next_index_) * period();
      if (!pending_ && start_k <= t + kEps) pending_ = std::make_pair(cl, cr);
      while (pending_ && schedule_time(next_index_) <= t + kEps) {
        const double ts = schedule_time(next_index_++);
        StereoReading sr;
        sr.left = ec_read(p_.ec, pending_->first, p_.noise ? &rng_left_ : nullptr);
        sr.right = ec_read(p_.ec, pending_->second, p_.noise ? &rng_right_ : nullptr);
        sr.left.t = sr.right.t = ts;
        sr.left.channel = Channel::Left;
        sr.right.channel = Channel::Right;
        out.push_back(sr);
        pending_.reset();
        const double next_start = t0_ + static_cast<double>(next_index_) * period();
        if (next_start <= t + kEps) pending_ = std::make_pair(cl, cr);
      }
    }
    return out;
  }

 private:
  StereoReading emit_mox(double ts) {
    StereoReading sr;
    sr.left.t = sr.right.t = ts;
    sr.left.channel = Channel::Left;
    sr.right.channel = Channel::Right;
    double vl = left_.voltage, vr = right_.voltage;
    if (p_.noise && p_.mox.noise_sigma > 0.0) {
      vl += p_.mox.noise_sigma * standard_normal(rng_left_);
      vr += p_.mox.noise_sigma * standard_normal(rng_right_);
    }
    sr.left.value = vl;
    sr.right.value = vr;
    sr.left.response = mox_response(p_.mox, vl);
    sr.right.response = mox_response(p_.mox, vr);
    return sr;
  }

  RigParams p_;
  Rng rng_left_;
  Rng rng_right_;
  double t0_ = 0.0;
  std::size_t next_index_ = 0;
  std::optional<double> last_t_;
  MoxState left_{};
  MoxState right_{};
  double raw_left_ = 0.0;
  double raw_right_ = 0.0;
  std::optional<std::pair<double, double>> pending_;
};

}  // namespace oio::sensors
