#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "oio/core.hpp"

namespace oio::nav {

enum class Band { Off = 0, Low = 1, High = 2 };
enum class Relation { LeftLess = 0, Equal = 1, LeftGreater = 2 };

inline constexpr std::size_t kStates = 9;

// Concentration bands on the smoothed sensor response plus the symmetric
// deadband used to call the two channels equal.
struct BandThresholds {
  double off = 0.02;            // below: off-plume
  double high = 0.5;            // at or above: on-plume high
  double equal_fraction = 0.1;  // |L - R| <= fraction * max(L, R) counts as equal
  double equal_floor = 0.01;    // absolute part of the deadband

  void validate() const {
    if (!(off > 0.0 && off < high)) throw ConfigError("band thresholds: need 0 < off < high");
    if (!(equal_fraction >= 0.0 && equal_floor >= 0.0)) {
      throw ConfigError("band thresholds: deadband must be >= 0");
    }
  }
};

inline Band band_of(double level, const BandThresholds& t) {
  if (!(level >= t.off)) return Band::Off;  // NaN lands off-plume
  return level >= t.high ? Band::High : Band::Low;
}

inline Relation relation_of(double left, double right, const BandThresholds& t) {
  const double tol = t.equal_floor + t.equal_fraction * std::max(std::abs(left), std::abs(right));
  const double diff = left - right;
  if (std::abs(diff) <= tol || std::isnan(diff)) return Relation::Equal;
  return diff < 0.0 ? Relation::LeftLess : Relation::LeftGreater;
}

// Columns are the bands, rows the stereo relation:
//            Off  Low  High
//   L <  R    0    3    6
//   L == R    1    4    7
//   L >  R    2    5    8
inline std::size_t compose_state(Band b, Relation r) {
  return static_cast<std::size_t>(b) * 3 + static_cast<std::size_t>(r);
}

inline Band band_of_state(std::size_t s) { return static_cast<Band>(s / 3); }
inline Relation relation_of_state(std::size_t s) { return static_cast<Relation>(s % 3); }

inline std::size_t encode_state(double left, double right, const BandThresholds& t) {
  return compose_state(band_of(std::max(left, right), t), relation_of(left, right, t));
}

// Linear-interpolated quantile of a sample, q in [0, 1].
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::domain_error("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("quantile: q must lie in [0, 1]");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// Thresholds from on-plume calibration samples: off below the 5th
// percentile, high above the 60th. `floor` keeps the off threshold above the
// sensor noise.
inline BandThresholds calibrate_thresholds(std::span<const double> on_plume, double floor = 0.0,
                                           double off_q = 0.05, double high_q = 0.60) {
  std::vector<double> v(on_plume.begin(), on_plume.end());
  BandThresholds t;
  t.off = std::max(quantile(v, off_q), floor);
  t.high = std::max(quantile(v, high_q), 2.0 * t.off);
  t.validate();
  return t;
}

}  // namespace oio::nav
