#pragma once

#include <cstdint>
#include <vector>

#include "oio/nav/state.hpp"
#include "oio/nav/tabular.hpp"
#include "oio/plume/dispersion.hpp"
#include "oio/plume/env.hpp"

namespace oio::nav {

// Band thresholds from the blank-free plume sampled at the cell centres
// downwind of the source, at flight height.
inline BandThresholds task_thresholds(const plume::EnvConfig& cfg) {
  const double cell = cfg.twin.step_length;
  const auto& p = cfg.plume;
  const double z = cfg.course.start.position.z;
  std::vector<double> samples;
  for (double x = 0.5 * cell; x < p.bounds.x; x += cell) {
    for (double y = 0.5 * cell; y < p.bounds.y; y += cell) {
      const double downwind = x - p.source_position.x;
      if (downwind <= 0.0) continue;
      const double c = plume::gaussian_plume(p, downwind, y - p.source_position.y, z);
      if (c > 0.0) samples.push_back(c);
    }
  }
  if (samples.empty()) return {};
  BandThresholds t = calibrate_thresholds(samples, 1e-9);
  t.equal_floor = 1e-9;
  return t;
}

// The plume environment seen through the nine-state stereo encoding, in the
// shape train() and greedy_rollout() expect. Each episode draws a fresh field
// (and so a fresh blank schedule) from its seed.
class TabularPlumeTask {
 public:
  explicit TabularPlumeTask(plume::EnvConfig cfg)
      : env_(cfg), thresholds_(task_thresholds(env_.config())) {}

  const BandThresholds& thresholds() const { return thresholds_; }
  const plume::PlumeEnv& env() const { return env_; }

  std::size_t encode(const plume::Observation& o) const {
    return encode_state(o.left_concentration, o.right_concentration, thresholds_);
  }

  std::size_t reset(std::uint64_t episode_seed) { return encode(env_.reset(episode_seed)); }

  TabularStep step(Action a) {
    const auto r = env_.step(a);
    return {encode(r.obs), r.reward, r.done};
  }

 private:
  plume::PlumeEnv env_;
  BandThresholds thresholds_;
};

}  // namespace oio::nav
