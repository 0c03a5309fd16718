#pragma once

// Sample-maximum source criterion. With m the largest concentration seen in
// k samples, the population maximum lies in [m / q^(1/k), m / p^(1/k)] at
// confidence q - p; the UAV may land once the upper end is within a margin
// of m.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

namespace oio::termination {

enum class EstimatorForm {
  SampleMaximum,  // m (k + 1) / k - 1, reproduces the 1.05 m example at k = 20
  Printed,        // m k / (k + 1) - 1, as typeset
};

inline double point_estimate(double m, std::size_t k,
                             EstimatorForm form = EstimatorForm::SampleMaximum) {
  if (k == 0) throw std::domain_error("point_estimate: k must be >= 1");
  if (!(m > 0.0)) throw std::domain_error("point_estimate: m must be > 0");
  const double kd = static_cast<double>(k);
  if (form == EstimatorForm::Printed) return m * kd / (kd + 1.0) - 1.0;
  return m * (kd + 1.0) / kd - 1.0;
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

inline Interval confidence_interval(double m, std::size_t k, double p, double q) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0)) {
    throw std::domain_error("confidence_interval: p and q must lie in (0, 1)");
  }
  if (!(p < q)) throw std::domain_error("confidence_interval: p must be < q");
  if (k == 0) throw std::domain_error("confidence_interval: k must be >= 1");
  const double inv_k = 1.0 / static_cast<double>(k);
  return {m / std::pow(q, inv_k), m / std::pow(p, inv_k)};
}

// Symmetric split of a confidence level: p = (1 - level) / 2, q = 1 - p.
inline std::pair<double, double> quantiles_for_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::domain_error("confidence level must lie in (0, 1)");
  }
  const double p = (1.0 - level) / 2.0;
  return {p, 1.0 - p};
}

inline constexpr std::size_t kDefaultMinSamples = 10;

// Upper-bound ratio hi / m; independent of m.
inline double upper_ratio(std::size_t k, double level) {
  const auto [p, q] = quantiles_for_level(level);
  (void)q;
  return 1.0 / std::pow(p, 1.0 / static_cast<double>(k));
}

inline bool should_terminate(double m, std::size_t k, double level = 0.95, double margin = 0.25,
                             std::size_t k_min = kDefaultMinSamples) {
  if (k < k_min || k == 0 || !(m > 0.0)) return false;
  return upper_ratio(k, level) - 1.0 <= margin;
}

// Smallest k for which the criterion can fire at (level, margin).
inline std::size_t min_samples_to_terminate(double level = 0.95, double margin = 0.25,
                                            std::size_t k_min = kDefaultMinSamples) {
  std::size_t k = std::max<std::size_t>(k_min, 1);
  while (upper_ratio(k, level) - 1.0 > margin) ++k;
  return k;
}

struct SourceEstimate {
  double m = 0.0;
  std::size_t k = 0;
  double c_hat = 0.0;
  Interval ci{};
  double level = 0.95;
  bool terminate = false;
};

struct TrackerParams {
  double level = 0.95;
  double margin = 0.25;
  std::size_t k_min = kDefaultMinSamples;
  EstimatorForm form = EstimatorForm::SampleMaximum;
};

// Streaming bookkeeping of (m, k). Only on-plume samples are counted, and the
// count restarts at 1 whenever a new maximum is observed, so k is the number
// of on-plume samples consistent with m being the running maximum.
class TerminationTracker {
 public:
  explicit TerminationTracker(TrackerParams params = {}) : params_(params) {}

  // Returns true when the sample set a new maximum.
  bool observe(double value, bool on_plume) {
    if (!on_plume || !(value > 0.0)) return false;
    if (value > m_) {
      m_ = value;
      k_ = 1;
      return true;
    }
    ++k_;
    return false;
  }

  double m() const { return m_; }
  std::size_t k() const { return k_; }

  SourceEstimate estimate() const {
    SourceEstimate e;
    e.m = m_;
    e.k = k_;
    e.level = params_.level;
    if (k_ == 0) return e;
    const auto [p, q] = quantiles_for_level(params_.level);
    e.c_hat = point_estimate(m_, k_, params_.form);
    e.ci = confidence_interval(m_, k_, p, q);
    e.terminate = should_terminate(m_, k_, params_.level, params_.margin, params_.k_min);
    return e;
  }

  void reset() {
    m_ = 0.0;
    k_ = 0;
  }

 private:
  TrackerParams params_;
  double m_ = 0.0;
  std::size_t k_ = 0;
};

}  // namespace oio::termination
