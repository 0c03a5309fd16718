#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "oio/core.hpp"

namespace oio::filters {

struct LagEstimate {
  double tau = 0.0;   // s, positive when the right channel leads
  double peak = 0.0;  // normalised correlation at the selected integer lag
};

// Pearson correlation of left[n] against right[n - lag] over their overlap.
inline std::optional<double> lagged_correlation(std::span<const double> left,
                                                std::span<const double> right, long lag) {
  const long n = static_cast<long>(std::min(left.size(), right.size()));
  const long begin = std::max(0L, lag);
  const long end = std::min(n, n + lag);
  const long len = end - begin;
  if (len < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (long i = begin; i < end; ++i) {
    mx += left[i];
    my += right[i - lag];
  }
  mx /= static_cast<double>(len);
  my /= static_cast<double>(len);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (long i = begin; i < end; ++i) {
    const double dx = left[i] - mx;
    const double dy = right[i - lag] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  // Rounding leaves a residue on flat buffers; treat it as no variation.
  const double floor_x = 1e-24 * static_cast<double>(len) * (1.0 + mx * mx);
  const double floor_y = 1e-24 * static_cast<double>(len) * (1.0 + my * my);
  if (!(sxx > floor_x && syy > floor_y)) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

// Normalised cross-correlation peak over integer lags in [-max_lag, max_lag]
// samples, refined by a parabola through the peak and its neighbours.
// Returns nothing for flat buffers. Swapping the channels negates tau.
inline std::optional<LagEstimate> estimate_lag(std::span<const double> left,
                                               std::span<const double> right,
                                               std::size_t max_lag, double sample_period) {
  const std::size_t n = std::min(left.size(), right.size());
  if (n < std::max<std::size_t>(2 * max_lag, 3)) {
    throw std::domain_error("estimate_lag: buffers shorter than 2 * max_lag");
  }
  if (!(sample_period > 0.0)) throw std::domain_error("estimate_lag: sample period must be > 0");

  const long K = static_cast<long>(max_lag);
  std::vector<std::optional<double>> rho(static_cast<std::size_t>(2 * K + 1));
  for (long k = -K; k <= K; ++k) rho[static_cast<std::size_t>(k + K)] = lagged_correlation(left, right, k);
  auto at = [&](long k) { return rho[static_cast<std::size_t>(k + K)]; };
  if (!at(0)) return std::nullopt;

  // Largest correlation wins; among equal values the smallest |lag| wins,
  // and an exact tie between +j and -j is ambiguous and reports zero lag.
  double best_val = -2.0;
  for (long k = -K; k <= K; ++k)
    if (at(k)) best_val = std::max(best_val, *at(k));
  long best = 0;
  for (long j = 0; j <= K; ++j) {
    const bool pos = at(j) && *at(j) == best_val;
    const bool neg = at(-j) && *at(-j) == best_val;
    if (pos && neg && j > 0) return LagEstimate{0.0, *at(0)};
    if (pos || neg) {
      best = pos ? j : -j;
      break;
    }
  }

  double refined = static_cast<double>(best);
  if (best > -K && best < K) {
    const auto a = at(best - 1), c = at(best + 1);
    if (a && c) {
      const double denom = *a - 2.0 * best_val + *c;
      if (denom < 0.0) {
        const double delta = 0.5 * (*a - *c) / denom;
        if (std::abs(delta) <= 0.5) refined += delta;
      }
    }
  }
  return LagEstimate{refined * sample_period, best_val};
}

}  // namespace oio::filters
