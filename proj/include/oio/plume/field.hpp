#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "oio/core.hpp"
#include "oio/plume/blanks.hpp"
#include "oio/plume/config.hpp"
#include "oio/plume/dispersion.hpp"
#include "oio/plume/dryden.hpp"

namespace oio::plume {

// Ground-truth concentration and wind. Immutable after construction; the gust
// sequence and blank schedule are drawn once from the seed, so any number of
// episodes may read one field concurrently.
class PlumeField {
 public:
  PlumeField(PlumeConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), seed_(seed) {
    cfg_.validate();
    const double airspeed = std::max(cfg_.wind_speed, 0.5);
    gusts_ = GustTable(dryden_low_altitude(cfg_.turbulence_altitude, cfg_.turbulence_intensity),
                       airspeed, cfg_.tick, cfg_.horizon, make_rng(seed, Stream::Turbulence));
    Rng blank_rng = make_rng(seed, Stream::Blanks);
    blanks_ = insert_blanks(blank_rng, cfg_.sparsity, cfg_.bounds, cfg_.horizon, cfg_.wind_speed,
                            cfg_.blank_shape);
  }

  const PlumeConfig& config() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }
  const BlankMask& blanks() const { return blanks_; }

  bool in_bounds(const Vec3& p) const {
    constexpr double kTol = 1e-9;
    return p.x >= -kTol && p.x <= cfg_.bounds.x + kTol && p.y >= -kTol &&
           p.y <= cfg_.bounds.y + kTol && p.z >= -kTol && p.z <= cfg_.bounds.z + kTol;
  }

  // Mean wind (wind_speed, 0, 0) plus the Dryden gust at the tick nearest t.
  Vec3 wind_at(const Vec3& /*pos*/, double t) const {
    if (t < 0.0 || t > cfg_.horizon + 0.5 * cfg_.tick) {
      throw std::domain_error("wind_at: time outside the simulated horizon");
    }
    const Vec3 g = gusts_.at_index(gusts_.index(t));
    return {cfg_.wind_speed + g.x, g.y, g.z};
  }

  // Lateral displacement of the plume axis at `downwind` metres: the parcel
  // there left the source at t - downwind/u and has drifted with the lateral
  // gust of that moment, so meander patterns advect with the mean wind.
  double meander_offset(double downwind, double t) const {
    if (cfg_.turbulence_intensity <= 0.0 || downwind <= 0.0) return 0.0;
    const double u = std::max(cfg_.wind_speed, kMinDilutionWind);
    const double flight = downwind / u;
    const double emitted = std::max(t - flight, 0.0);
    return gusts_.at_index(gusts_.index(emitted)).y * flight;
  }

  double concentration_at(const Vec3& pos, double t) const {
    if (!in_bounds(pos)) throw std::domain_error("concentration_at: position outside bounds");
    if (t < 0.0) throw std::domain_error("concentration_at: negative time");
    const double downwind = pos.x - cfg_.source_position.x;
    if (downwind <= 0.0) return 0.0;
    // The plume front advances at the mean wind speed from t = 0.
    const double u = std::max(cfg_.wind_speed, kMinDilutionWind);
    if (downwind > u * t) return 0.0;
    if (blanks_.masked(pos, t)) return 0.0;
    const double crosswind = pos.y - cfg_.source_position.y - meander_offset(downwind, t);
    return gaussian_plume(cfg_, downwind, crosswind, pos.z);
  }

 private:
  PlumeConfig cfg_;
  std::uint64_t seed_;
  GustTable gusts_;
  BlankMask blanks_;
};

}  // namespace oio::plume
