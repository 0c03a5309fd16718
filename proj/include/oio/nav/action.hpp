#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace oio::nav {

// The first seven values form the tabular agents' action space; Pause and
// Land belong to the rule-based agent and the termination layer.
enum class Action : int {
  TurnLeft45 = 0,
  TurnRight45 = 1,
  TurnLeft90 = 2,
  TurnRight90 = 3,
  Surge = 4,
  CastLeft = 5,
  CastRight = 6,
  Pause = 7,
  Land = 8,
};

inline constexpr std::size_t kTabularActions = 7;
inline constexpr std::size_t kAllActions = 9;

inline bool is_valid(Action a) {
  const int i = static_cast<int>(a);
  return i >= 0 && i < static_cast<int>(kAllActions);
}

inline bool is_tabular(Action a) {
  const int i = static_cast<int>(a);
  return i >= 0 && i < static_cast<int>(kTabularActions);
}

inline Action action_from_index(std::size_t i) {
  if (i >= kAllActions) throw std::domain_error("action index out of range");
  return static_cast<Action>(static_cast<int>(i));
}

inline std::size_t index_of(Action a) { return static_cast<std::size_t>(a); }

inline constexpr std::array<std::string_view, kAllActions> kActionNames = {
    "turn_left_45", "turn_right_45", "turn_left_90", "turn_right_90", "surge",
    "cast_left",    "cast_right",    "pause",        "land"};

inline std::string_view name(Action a) {
  if (!is_valid(a)) return "invalid";
  return kActionNames[index_of(a)];
}

// Heading change of a turn primitive in degrees (left is positive).
inline double turn_angle(Action a) {
  switch (a) {
    case Action::TurnLeft45: return 45.0;
    case Action::TurnRight45: return -45.0;
    case Action::TurnLeft90: return 90.0;
    case Action::TurnRight90: return -90.0;
    default: return 0.0;
  }
}

inline bool is_turn(Action a) { return turn_angle(a) != 0.0; }
inline bool is_cast(Action a) { return a == Action::CastLeft || a == Action::CastRight; }

}  // namespace oio::nav
