#pragma once

#include <cmath>
#include <stdexcept>
#include <string_view>

namespace oio::filters {

enum class BoutSignal { Neutral, EnteringPlume, LosingPlume };

inline std::string_view to_string(BoutSignal b) {
  switch (b) {
    case BoutSignal::EnteringPlume: return "entering";
    case BoutSignal::LosingPlume: return "losing";
    default: return "neutral";
  }
}

// D above its signal line means the concentration is accelerating.
inline BoutSignal detect_bout(double divergence, double signal, double deadband = 0.0) {
  if (!(deadband >= 0.0)) throw std::domain_error("detect_bout: deadband must be >= 0");
  const double dev = divergence - signal;
  if (dev > deadband) return BoutSignal::EnteringPlume;
  if (dev < -deadband) return BoutSignal::LosingPlume;
  return BoutSignal::Neutral;
}

}  // namespace oio::filters
