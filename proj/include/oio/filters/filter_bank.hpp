#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include "oio/core.hpp"
#include "oio/filters/bout.hpp"
#include "oio/filters/ema.hpp"
#include "oio/filters/heading.hpp"
#include "oio/filters/kalman.hpp"
#include "oio/filters/stereo_lag.hpp"

namespace oio::filters {

struct FilterPeriods {
  int fast = 3;    // alpha
  int slow = 8;    // beta
  int signal = 5;  // rho
};

// Dual-timescale divergence of one concentration channel and its signal line.
struct ChannelFilter {
  EmaState fast;
  EmaState slow;
  EmaState signal;
  std::deque<double> d_history;
  std::deque<double> s_history;
  std::size_t history_limit = 256;

  explicit ChannelFilter(FilterPeriods p = {}, std::size_t limit = 256)
      : fast(p.fast), slow(p.slow), signal(p.signal), history_limit(limit) {}

  bool warmed_up() const { return fast.initialized && slow.initialized; }
};

inline void push_bounded(std::deque<double>& h, double v, std::size_t limit) {
  h.push_back(v);
  while (h.size() > limit) h.pop_front();
}

// D = E_fast(C) - E_slow(C) for the latest sample c.
inline double divergence(ChannelFilter& ch, double c) {
  ch.fast = ema_update(ch.fast, c);
  ch.slow = ema_update(ch.slow, c);
  const double d = ch.fast.value - ch.slow.value;
  push_bounded(ch.d_history, d, ch.history_limit);
  return d;
}

// Current D without consuming a sample.
inline double current_divergence(const ChannelFilter& ch) {
  if (!ch.warmed_up()) throw StateError("divergence: EMAs not initialised");
  return ch.fast.value - ch.slow.value;
}

// S = E_signal(D).
inline double signal_line(ChannelFilter& ch, double d) {
  ch.signal = ema_update(ch.signal, d);
  push_bounded(ch.s_history, ch.signal.value, ch.history_limit);
  return ch.signal.value;
}

struct FilterBankParams {
  FilterPeriods periods{};
  double deadband_fraction = 0.05;  // of the running std-dev of D
  double kalman_q = 1e-4;
  double kalman_r = 1e-2;
  std::size_t history_limit = 256;
  std::size_t lag_buffer = 64;      // samples of the 10 Hz stereo stream
  double lag_period = 0.1;          // s
  double max_lag = 1.0;             // s
  double min_lag_peak = 0.5;        // correlation needed to trust the lag
};

struct FilterOutput {
  double left = 0.0;
  double right = 0.0;
  double combined = 0.0;       // mean of the two channels
  double fast = 0.0;           // EMAs of the combined channel
  double slow = 0.0;
  double smoothed_left = 0.0;  // fast EMA per channel
  double smoothed_right = 0.0;
  double kalman = 0.0;         // Kalman-smoothed combined signal
  double d = 0.0;
  double s = 0.0;
  double deadband = 0.0;
  BoutSignal bout = BoutSignal::Neutral;
};

// Per-episode filter state for a two-channel olfaction rig.
class FilterBank {
 public:
  explicit FilterBank(FilterBankParams p = {})
      : p_(p),
        left_(p.periods, p.history_limit),
        right_(p.periods, p.history_limit),
        combined_(p.periods, p.history_limit),
        kalman_(p.kalman_q, p.kalman_r) {
    if (!(p.periods.fast < p.periods.signal && p.periods.signal < p.periods.slow)) {
      throw ConfigError("filter bank: periods must satisfy fast < signal < slow");
    }
    if (p.lag_buffer < 3) throw ConfigError("filter bank: lag buffer too short");
  }

  const FilterBankParams& params() const { return p_; }
  const ChannelFilter& left() const { return left_; }
  const ChannelFilter& right() const { return right_; }
  const ChannelFilter& combined() const { return combined_; }
  std::size_t samples() const { return samples_; }
  BoutSignal last_bout() const { return last_bout_; }
  bool warmed_up() const { return samples_ >= static_cast<std::size_t>(p_.periods.slow); }

  // One navigation sample per channel.
  FilterOutput update(double left, double right) {
    FilterOutput o;
    o.left = left;
    o.right = right;
    o.combined = 0.5 * (left + right);
    const double dl = divergence(left_, left);
    signal_line(left_, dl);
    const double dr = divergence(right_, right);
    signal_line(right_, dr);
    o.d = divergence(combined_, o.combined);
    o.s = signal_line(combined_, o.d);
    o.fast = combined_.fast.value;
    o.slow = combined_.slow.value;
    o.smoothed_left = left_.fast.value;
    o.smoothed_right = right_.fast.value;
    if (samples_ == 0) kalman_.x = o.combined;
    o.kalman = kalman_update(kalman_, o.combined);
    ++samples_;

    // Welford running variance of D.
    const double delta = o.d - d_mean_;
    d_mean_ += delta / static_cast<double>(samples_);
    d_m2_ += delta * (o.d - d_mean_);
    const double sd = samples_ > 1 ? std::sqrt(d_m2_ / static_cast<double>(samples_ - 1)) : 0.0;
    o.deadband = p_.deadband_fraction * sd;
    o.bout = detect_bout(o.d, o.s, o.deadband);
    last_bout_ = o.bout;
    return o;
  }

  // Lag-filtered channel values at the inner-loop rate.
  void push_lag_sample(double left, double right) {
    lag_left_.push_back(left);
    lag_right_.push_back(right);
    while (lag_left_.size() > p_.lag_buffer) {
      lag_left_.pop_front();
      lag_right_.pop_front();
    }
  }

  std::size_t lag_samples() const { return lag_left_.size(); }

  // Cross-correlation lag over the buffer; nothing when the buffer is short,
  // flat, or the correlation peak is too weak to trust.
  std::optional<LagEstimate> lag() const {
    const auto max_lag = static_cast<std::size_t>(std::lround(p_.max_lag / p_.lag_period));
    if (lag_left_.size() < std::max<std::size_t>(2 * max_lag, 3)) return std::nullopt;
    const std::vector<double> l(lag_left_.begin(), lag_left_.end());
    const std::vector<double> r(lag_right_.begin(), lag_right_.end());
    auto est = estimate_lag(l, r, max_lag, p_.lag_period);
    if (!est || est->peak < p_.min_lag_peak) return std::nullopt;
    return est;
  }

  HeadingEstimate heading(double wind_speed, double baseline) const {
    const auto est = lag();
    if (!est) return heading_from_lag(0.0, wind_speed, baseline);
    return heading_from_lag(est->tau, wind_speed, baseline);
  }

  void clear_lag() {
    lag_left_.clear();
    lag_right_.clear();
  }

 private:
  FilterBankParams p_;
  ChannelFilter left_;
  ChannelFilter right_;
  ChannelFilter combined_;
  ScalarKalman kalman_;
  std::size_t samples_ = 0;
  double d_mean_ = 0.0;
  double d_m2_ = 0.0;
  BoutSignal last_bout_ = BoutSignal::Neutral;
  std::deque<double> lag_left_;
  std::deque<double> lag_right_;
};

}  // namespace oio::filters
