#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "oio/control/kinematics.hpp"
#include "oio/core.hpp"
#include "oio/filters/bout.hpp"
#include "oio/filters/filter_bank.hpp"
#include "oio/filters/heading.hpp"
#include "oio/nav/action.hpp"
#include "oio/nav/state.hpp"

namespace oio::nav {

// Discrete turn for a heading command: positive phi turns right, and
// |phi| >= hard_turn_deg selects the 90 degree primitive.
inline Action turn_for(double phi_deg, double hard_turn_deg = 45.0) {
  const bool hard = std::abs(phi_deg) >= hard_turn_deg;
  if (phi_deg > 0.0) return hard ? Action::TurnRight90 : Action::TurnRight45;
  return hard ? Action::TurnLeft90 : Action::TurnLeft45;
}

// Alternating cast with legs that widen after every reversal.
struct CastPattern {
  int initial_width = 2;  // steps
  int growth = 2;
  int max_width = 8;
  int direction = 1;      // +1 left, -1 right
  int width = 2;
  int remaining = 0;
  int legs = 0;

  void restart(int first_direction) {
    direction = first_direction >= 0 ? 1 : -1;
    width = initial_width;
    // The first leg is half width so the pattern is centred on the loss point.
    remaining = std::max(1, initial_width / 2);
    legs = 0;
  }

  bool exhausted() const { return width > max_width; }

  // Reverse early, e.g. after running into an obstacle.
  void bounce() {
    direction = -direction;
    width = std::min(width + growth, max_width + growth);
    remaining = width;
    ++legs;
  }

  Action next() {
    if (remaining <= 0) bounce();
    --remaining;
    return direction > 0 ? Action::CastLeft : Action::CastRight;
  }
};

struct OioParams {
  BandThresholds thresholds{};
  double hard_turn_deg = 45.0;
  bool use_heading = true;
  CastPattern cast{};
  int sweep_advance = 2;          // upwind steps between sweep legs
  double heading_tolerance = 30.0;  // deg off upwind before realigning
  double home_tolerance = 0.2;    // m
  double centre_fraction = 0.2;   // stereo asymmetry that triggers a centring step
};

// The bout-following rule: surge on plume entry, steer by the stereo heading,
// cast on plume loss and keep casting while off the plume.
inline Action oio_policy(const OioParams& p, bool on_plume, const filters::HeadingEstimate& heading,
                         filters::BoutSignal bout, CastPattern& cast) {
  using filters::BoutSignal;
  using filters::HeadingMode;
  switch (bout) {
    case BoutSignal::EnteringPlume:
      cast.restart(cast.direction);
      if (p.use_heading && heading.mode == HeadingMode::Turn) {
        return turn_for(heading.phi, p.hard_turn_deg);
      }
      return Action::Surge;
    case BoutSignal::LosingPlume:
      return cast.next();
    default:
      if (on_plume) return Action::Surge;
      return cast.next();
  }
}

enum class OioMode { Sweep, Track, Cast, Relocate, Home, Land };

inline const char* to_string(OioMode m) {
  switch (m) {
    case OioMode::Sweep: return "sweep";
    case OioMode::Track: return "track";
    case OioMode::Cast: return "cast";
    case OioMode::Relocate: return "relocate";
    case OioMode::Home: return "home";
    default: return "land";
  }
}

struct OioInputs {
  filters::FilterOutput filt{};
  filters::HeadingEstimate heading{};
  control::UavPose pose{};
  bool collided = false;
  double upwind_deg = 180.0;
  std::optional<Vec2> anchor;  // pose of the best reading so far
};

// Stateful navigator around oio_policy: acquires the plume with crosswind
// sweeps, centres on it with the stereo amplitudes, widens casts after a
// loss, and flies back to the pose of the best reading before landing.
class OioNavigator {
 public:
  explicit OioNavigator(OioParams p = {}) : p_(p) { cast_ = p_.cast; }

  const OioParams& params() const { return p_; }
  OioMode mode() const { return mode_; }

  void reset() {
    mode_ = OioMode::Sweep;
    cast_ = p_.cast;
    sweep_dir_ = 1;
    sweep_advance_left_ = 0;
    last_action_.reset();
    home_.reset();
  }

  // Latches the return-to-best-pose phase.
  void go_home(Vec2 target) {
    home_ = target;
    home_turns_ = 0;
    mode_ = OioMode::Home;
  }

  Action decide(const OioInputs& in) {
    const Action a = choose(in);
    last_action_ = a;
    return a;
  }

  bool on_plume(const filters::FilterOutput& f) const {
    return std::max(f.smoothed_left, f.smoothed_right) >= p_.thresholds.off;
  }

 private:
  Action choose(const OioInputs& in) {
    using filters::BoutSignal;
    if (mode_ == OioMode::Land) return Action::Land;
    if (mode_ == OioMode::Home) return homing(in);
    if (mode_ == OioMode::Relocate) {
      const Action a = homing(in);
      if (a != Action::Land) return a;
      // Back at the anchor: pick the plume up again from there.
      mode_ = on_plume(in.filt) ? OioMode::Track : OioMode::Cast;
      cast_.restart(cast_.direction);
    }

    const double off_axis = wrap_deg(in.pose.heading_deg - in.upwind_deg);
    if (std::abs(off_axis) > p_.heading_tolerance) {
      return turn_for(off_axis, 67.5);
    }

    const bool plume = on_plume(in.filt);
    const int stronger = stronger_side(in.filt);

    if (plume) {
      if (mode_ != OioMode::Track && in.filt.bout != BoutSignal::LosingPlume) mode_ = OioMode::Track;
    }
    if (mode_ == OioMode::Track) {
      if (!plume) {
        mode_ = OioMode::Cast;
        cast_.restart(stronger != 0 ? stronger : cast_.direction);
      } else {
        const int toward = centring_side(in.filt);
        if (in.collided && last_action_ == Action::Surge) {
          return (toward != 0 ? toward : stronger) >= 0 ? Action::CastLeft : Action::CastRight;
        }
        Action a = oio_policy(p_, true, in.heading, in.filt.bout, cast_);
        // While still on the plume a loss cue steps towards the stronger
        // antenna, or keeps surging when the two agree.
        if (is_cast(a)) {
          a = stronger > 0 ? Action::CastLeft : stronger < 0 ? Action::CastRight : Action::Surge;
        }
        // Turning off the wind axis only to realign costs two decisions, so a
        // heading cue becomes a sidestep, taken only when the amplitudes
        // point to the same side.
        if (is_turn(a)) {
          const int side = in.heading.phi > 0.0 ? -1 : 1;
          a = side == stronger ? (side > 0 ? Action::CastLeft : Action::CastRight) : Action::Surge;
        }
        if (a == Action::Surge && toward != 0) {
          a = toward > 0 ? Action::CastLeft : Action::CastRight;
        }
        if (is_cast(a) && in.collided && last_action_ == a) {
          a = a == Action::CastLeft ? Action::CastRight : Action::CastLeft;
        }
        // Sidesteps alternate with surges so stereo noise near the axis
        // cannot stall upwind progress.
        if (is_cast(a) && !in.collided && last_action_ && is_cast(*last_action_)) {
          a = Action::Surge;
        }
        return a;
      }
    }
    if (mode_ == OioMode::Cast) {
      if (in.collided && last_action_ && is_cast(*last_action_)) cast_.bounce();
      if (cast_.exhausted() && in.anchor) {
        // Overshot or lost far from the best reading: return there.
        home_ = *in.anchor;
        home_turns_ = 0;
        mode_ = OioMode::Relocate;
        return choose(in);
      }
      if (cast_.exhausted()) {
        mode_ = OioMode::Sweep;
        sweep_dir_ = cast_.direction;
        sweep_advance_left_ = 0;
      } else {
        return oio_policy(p_, false, in.heading, BoutSignal::Neutral, cast_);
      }
    }
    return sweep(in);
  }

  // Crosswind legs until an obstacle or wall, then a short upwind advance.
  Action sweep(const OioInputs& in) {
    if (sweep_advance_left_ > 0) {
      if (in.collided && last_action_ == Action::Surge) {
        sweep_advance_left_ = 0;
      } else {
        --sweep_advance_left_;
        return Action::Surge;
      }
    }
    if (in.collided && last_action_ && is_cast(*last_action_)) {
      sweep_dir_ = -sweep_dir_;
      sweep_advance_left_ = p_.sweep_advance - 1;
      return Action::Surge;
    }
    return sweep_dir_ > 0 ? Action::CastLeft : Action::CastRight;
  }

  Action homing(const OioInputs& in) {
    const Vec2 here{in.pose.position.x, in.pose.position.y};
    const double dx = home_->x - here.x, dy = home_->y - here.y;
    const double dist = std::hypot(dx, dy);
    if (dist <= p_.home_tolerance) {
      mode_ = OioMode::Land;
      return Action::Land;
    }
    const double step = 0.3;
    double best = dist;
    Action best_a = Action::Land;
    for (Action a : {Action::Surge, Action::CastLeft, Action::CastRight}) {
      if (in.collided && last_action_ == a) continue;
      const double lat = a == Action::CastLeft ? step : a == Action::CastRight ? -step : 0.0;
      const double fwd = a == Action::Surge ? step : 0.0;
      const Vec3 d = control::body_to_world(in.pose.heading_deg, fwd, lat, 0.0);
      const double nd = std::hypot(here.x + d.x - home_->x, here.y + d.y - home_->y);
      if (nd < best - 1e-9) {
        best = nd;
        best_a = a;
      }
    }
    if (best_a != Action::Land && dist - best > 0.05) return best_a;
    // Target behind: rotate towards it; otherwise close enough to land.
    const double bearing = wrap_deg(rad2deg(std::atan2(dy, dx)) - in.pose.heading_deg);
    if (std::abs(bearing) > 100.0 && ++home_turns_ <= 4) {
      return bearing > 0.0 ? Action::TurnLeft90 : Action::TurnRight90;
    }
    mode_ = OioMode::Land;
    return Action::Land;
  }

  // Side to step towards when the stereo asymmetry is large enough to mean
  // the body is well off the plume axis.
  int centring_side(const filters::FilterOutput& f) const {
    const double l = f.smoothed_left, r = f.smoothed_right;
    const double hi = std::max(l, r);
    if (!(hi > 0.0) || std::abs(l - r) <= p_.centre_fraction * hi) return 0;
    return l > r ? 1 : -1;
  }

  int stronger_side(const filters::FilterOutput& f) const {
    switch (relation_of(f.smoothed_left, f.smoothed_right, p_.thresholds)) {
      case Relation::LeftGreater: return 1;
      case Relation::LeftLess: return -1;
      default: return 0;
    }
  }

  OioParams p_;
  OioMode mode_ = OioMode::Sweep;
  CastPattern cast_{};
  int sweep_dir_ = 1;
  int sweep_advance_left_ = 0;
  int home_turns_ = 0;
  std::optional<Action> last_action_;
  std::optional<Vec2> home_;
};

}  // namespace oio::nav
