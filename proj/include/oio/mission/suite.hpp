#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oio/mission/config.hpp"
#include "oio/mission/trial.hpp"

namespace oio::mission {

struct SuiteMetrics {
  double mean_time = 0.0;  // over successful trials
  double std_time = 0.0;   // sample standard deviation
  double best_time = 0.0;
  double success_rate = 0.0;
  std::size_t trials = 0;
  std::size_t successes = 0;
};

inline SuiteMetrics compute_metrics(const std::vector<TrialRecord>& records) {
  SuiteMetrics m;
  m.trials = records.size();
  std::vector<double> times;
  for (const auto& r : records)
    if (r.outcome == Outcome::SourceFound) times.push_back(r.elapsed);
  m.successes = times.size();
  if (!records.empty()) {
    m.success_rate = static_cast<double>(times.size()) / static_cast<double>(records.size());
  }
  if (times.empty()) return m;
  double sum = 0.0;
  for (double t : times) sum += t;
  m.mean_time = sum / static_cast<double>(times.size());
  if (times.size() > 1) {
    double ss = 0.0;
    for (double t : times) ss += (t - m.mean_time) * (t - m.mean_time);
    m.std_time = std::sqrt(ss / static_cast<double>(times.size() - 1));
  }
  m.best_time = *std::min_element(times.begin(), times.end());
  return m;
}

struct SuiteOptions {
  std::size_t threads = 1;
  bool alternate_rooms = false;  // even seeds Room 2, odd seeds Room 1
};

struct SuiteResult {
  SuiteMetrics metrics{};
  std::vector<TrialRecord> records;  // in seed-list order
};

inline TrialConfig config_for_seed(const TrialConfig& base, std::uint64_t seed,
                                   const SuiteOptions& opt) {
  TrialConfig c = base;
  c.seed = seed;
  if (opt.alternate_rooms) {
    c.env.course.source_room = seed % 2 == 0 ? plume::Room::Room2 : plume::Room::Room1;
    sync_plume_to_course(c);
  }
  return c;
}

// Runs one trial per seed. Trials are independent, so they are spread over
// worker threads; results are stored by index and never depend on the
// thread count.
inline SuiteResult run_suite_seeds(const TrialConfig& base, const std::vector<std::uint64_t>& seeds,
                                   SuiteOptions opt = {}) {
  if (seeds.empty()) throw ConfigError("suite: need at least one trial");
  base.validate();
  SuiteResult out;
  out.records.resize(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      out.records[i] = run_trial(config_for_seed(base, seeds[i], opt));
    }
  };
  const std::size_t n = std::clamp<std::size_t>(opt.threads, 1, seeds.size());
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
  }
  out.metrics = compute_metrics(out.records);
  return out;
}

inline SuiteResult run_suite(const TrialConfig& base, std::size_t n_trials, std::uint64_t seed_base,
                             SuiteOptions opt = {}) {
  if (n_trials == 0) throw ConfigError("suite: n_trials must be >= 1");
  std::vector<std::uint64_t> seeds(n_trials);
  for (std::size_t i = 0; i < n_trials; ++i) seeds[i] = seed_base + i;
  return run_suite_seeds(base, seeds, opt);
}

// ---------------------------------------------------------------------------
// CSV output. Every file begins with a schema line carrying a digest of its
// column list, so readers fail loudly when the layout changes.

inline constexpr const char* kTrialColumns =
    "step,t,x,y,z,heading,left,right,c,e_fast,e_slow,state,action,d,s,bout,tau,phi,heading_mode,mode,m,k,lo,hi,"
    "terminate,candidate,vision_checked,collision,reward";
inline constexpr const char* kSuiteColumns =
    "seed,room,agent,sensor,vision,outcome,elapsed,final_distance,steps,first_candidate_step,"
    "first_vision_step,digest";
inline constexpr const char* kSensorColumns = "t,channel,value,response";

inline std::string schema_line(const std::string& name, const std::string& columns) {
  return "# " + name + " v1 schema=" + hex64(fnv1a(columns));
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline const char* heading_mode_name(filters::HeadingMode m) {
  switch (m) {
    case filters::HeadingMode::Turn: return "turn";
    case filters::HeadingMode::Cast: return "cast";
    default: return "hold";
  }
}

inline void write_trial_log(std::ostream& out, const TrialRecord& r) {
  out << schema_line("oio-trial-log", kTrialColumns) << " seed=" << r.seed
      << " config=" << hex64(r.digest) << '\n'
      << kTrialColumns << '\n';
  for (const auto& w : r.rows) {
    out << w.step << ',' << fmt(w.t) << ',' << fmt(w.pose.position.x) << ','
        << fmt(w.pose.position.y) << ',' << fmt(w.pose.position.z) << ',' << fmt(w.pose.heading_deg)
        << ',' << fmt(w.left) << ',' << fmt(w.right) << ',' << fmt(w.c) << ',' << fmt(w.e_fast)
        << ',' << fmt(w.e_slow) << ',' << w.state << ','
        << nav::name(w.action) << ',' << fmt(w.d) << ',' << fmt(w.s) << ','
        << filters::to_string(w.bout) << ',' << fmt(w.tau) << ',' << fmt(w.phi) << ','
        << heading_mode_name(w.heading_mode) << ',' << nav::to_string(w.mode) << ',' << fmt(w.m)
        << ',' << w.k << ',' << fmt(w.lo) << ',' << fmt(w.hi) << ',' << w.terminate << ','
        << w.candidate << ',' << w.vision_checked << ',' << w.collision << ',' << fmt(w.reward)
        << '\n';
  }
}

inline void write_sensor_trace(std::ostream& out, const TrialRecord& r) {
  out << schema_line("oio-sensor-trace", kSensorColumns) << " seed=" << r.seed << '\n'
      << kSensorColumns << '\n';
  for (const auto& s : r.sensor_rows) {
    out << fmt(s.t) << ",left," << fmt(s.left_value) << ',' << fmt(s.left_response) << '\n';
    out << fmt(s.t) << ",right," << fmt(s.right_value) << ',' << fmt(s.right_response) << '\n';
  }
}

inline std::string optional_str(const std::optional<std::size_t>& v) {
  return v ? std::to_string(*v) : "";
}

inline void write_suite_csv(std::ostream& out, const SuiteResult& s) {
  out << schema_line("oio-suite", kSuiteColumns) << '\n' << kSuiteColumns << '\n';
  for (const auto& r : s.records) {
    out << r.seed << ',' << r.room << ',' << r.agent << ',' << r.sensor << ',' << r.vision << ','
        << to_string(r.outcome) << ',' << fmt(r.elapsed) << ',' << fmt(r.final_distance) << ','
        << r.steps << ',' << optional_str(r.first_candidate_step) << ','
        << optional_str(r.first_vision_step) << ',' << hex64(r.digest) << '\n';
  }
  const auto& m = s.metrics;
  out << "# summary trials=" << m.trials << " successes=" << m.successes
      << " success_rate=" << fmt(m.success_rate) << " mean_time=" << fmt(m.mean_time)
      << " std_time=" << fmt(m.std_time) << " best_time=" << fmt(m.best_time) << '\n';
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& w) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  w(out);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace oio::mission
