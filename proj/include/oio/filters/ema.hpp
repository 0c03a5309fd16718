#pragma once

#include <cmath>
#include <stdexcept>

namespace oio::filters {

// Periodised exponential moving average: alpha = 2 / (period + 1).
struct EmaState {
  int period = 1;
  double value = 0.0;
  bool initialized = false;

  explicit EmaState(int p = 1) : period(p) {
    if (p < 1) throw std::domain_error("EmaState: period must be >= 1");
  }

  double smoothing() const { return 2.0 / (static_cast<double>(period) + 1.0); }
};

inline EmaState ema_update(EmaState s, double x) {
  if (!std::isfinite(x)) throw std::domain_error("ema_update: non-finite sample");
  if (!s.initialized) {
    s.value = x;
    s.initialized = true;
    return s;
  }
  s.value += s.smoothing() * (x - s.value);
  return s;
}

}  // namespace oio::filters
