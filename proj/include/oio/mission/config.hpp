#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "oio/core.hpp"
#include "oio/filters/filter_bank.hpp"
#include "oio/nav/oio.hpp"
#include "oio/nav/tabular.hpp"
#include "oio/plume/env.hpp"
#include "oio/sensors/stereo.hpp"
#include "oio/termination.hpp"

namespace oio::mission {

using json = nlohmann::json;

enum class AgentKind { Oio, ExpectedSarsaLambda, QLambda };

inline AgentKind parse_agent(const std::string& s) {
  if (s == "oio" || s == "OIO") return AgentKind::Oio;
  if (s == "expected_sarsa_lambda" || s == "esarsa") return AgentKind::ExpectedSarsaLambda;
  if (s == "q_lambda" || s == "qlambda") return AgentKind::QLambda;
  throw ConfigError("unknown agent '" + s + "'");
}

inline std::string to_string(AgentKind a) {
  switch (a) {
    case AgentKind::Oio: return "oio";
    case AgentKind::ExpectedSarsaLambda: return "expected_sarsa_lambda";
    default: return "q_lambda";
  }
}

struct VisionProxy {
  bool enabled = false;
  double radius = 3.0;  // m
};

struct TerminationConfig {
  termination::TrackerParams tracker{};
  int candidate_stall = 15;  // decisions without a new maximum
};

struct TrialConfig {
  std::uint64_t seed = 7;
  AgentKind agent = AgentKind::Oio;
  std::string policy_file;
  VisionProxy vision{};
  plume::EnvConfig env{};
  sensors::RigParams rig{};
  filters::FilterBankParams filters{};
  nav::OioParams oio{};
  TerminationConfig termination{};
  bool calibrate_thresholds = true;

  void validate() const {
    if (vision.enabled && !(vision.radius > 0.0)) {
      throw ConfigError("trial: vision radius must be > 0 when the proxy is enabled");
    }
    if (agent != AgentKind::Oio && policy_file.empty()) {
      throw ConfigError("trial: RL agents need a policy file");
    }
    if (agent != AgentKind::Oio && !std::filesystem::exists(policy_file)) {
      throw ConfigError("trial: policy file '" + policy_file + "' not found");
    }
    if (termination.candidate_stall < 1) throw ConfigError("trial: candidate_stall must be >= 1");
    rig.mox.validate();
    rig.ec.validate();
    rig.geometry.validate();
    env.validate();
  }
};

// ---------------------------------------------------------------------------
// JSON mapping. Every key is optional; missing keys keep their defaults.

namespace detail {

template <class T>
void get(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline Vec2 vec2_of(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Vec3 vec3_of(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline plume::Box box_of(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ConfigError("expected [x_min, y_min, x_max, y_max]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

inline json to_json(Vec2 v) { return json::array({v.x, v.y}); }
inline json to_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }
inline json to_json(const plume::Box& b) { return json::array({b.x_min, b.y_min, b.x_max, b.y_max}); }

inline void read_gains(const json& j, control::PirGains& g) {
  get(j, "kp", g.kp);
  get(j, "ki", g.ki);
  get(j, "kd", g.kd);
}

inline json gains_json(const control::PirGains& g) { return {{"kp", g.kp}, {"ki", g.ki}, {"kd", g.kd}}; }

}  // namespace detail

inline plume::Course course_from_json(const json& j, plume::Course c = plume::default_course()) {
  using namespace detail;
  if (j.contains("bounds")) c.bounds = vec3_of(j["bounds"]);
  if (j.contains("walls")) {
    c.walls.clear();
    for (const auto& w : j["walls"]) c.walls.push_back(box_of(w));
  }
  if (j.contains("obstacles")) {
    c.obstacles.clear();
    for (const auto& o : j["obstacles"]) c.obstacles.push_back(box_of(o));
  }
  if (j.contains("start")) {
    const auto& s = j["start"];
    if (s.contains("position")) c.start.position = vec3_of(s["position"]);
    get(s, "heading", c.start.heading_deg);
  }
  if (j.contains("source_room1")) c.source_room1 = vec2_of(j["source_room1"]);
  if (j.contains("source_room2")) c.source_room2 = vec2_of(j["source_room2"]);
  if (j.contains("source_room")) c.source_room = plume::parse_room(j["source_room"].get<std::string>());
  get(j, "uav_radius", c.uav_radius);
  return c;
}

inline json course_to_json(const plume::Course& c) {
  using namespace detail;
  json walls = json::array(), obstacles = json::array();
  for (const auto& w : c.walls) walls.push_back(to_json(w));
  for (const auto& o : c.obstacles) obstacles.push_back(to_json(o));
  return {{"bounds", to_json(c.bounds)},
          {"walls", walls},
          {"obstacles", obstacles},
          {"start", {{"position", to_json(c.start.position)}, {"heading", c.start.heading_deg}}},
          {"source_room1", to_json(c.source_room1)},
          {"source_room2", to_json(c.source_room2)},
          {"source_room", plume::to_string(c.source_room)},
          {"uav_radius", c.uav_radius}};
}

inline plume::Course load_course(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open course file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("course file '" + path.string() + "': " + e.what());
  }
  return course_from_json(j);
}

inline void read_plume(const json& j, plume::PlumeConfig& p) {
  using detail::get;
  get(j, "diffusion", p.diffusion);
  get(j, "sparsity", p.sparsity);
  get(j, "temperature", p.temperature_c);
  get(j, "relative_humidity", p.relative_humidity);
  get(j, "air_density", p.air_density);
  get(j, "wind_speed", p.wind_speed);
  get(j, "emission_rate", p.emission_rate);
  if (j.contains("stability_class")) p.stability = plume::parse_stability(j["stability_class"]);
  get(j, "source_height", p.source_height);
  get(j, "obstacle_count", p.obstacle_count);
  get(j, "initial_spread", p.initial_spread);
  get(j, "turbulence_intensity", p.turbulence_intensity);
  get(j, "turbulence_altitude", p.turbulence_altitude);
  get(j, "tick", p.tick);
  get(j, "horizon", p.horizon);
  if (j.contains("blank_shape")) {
    const auto& b = j["blank_shape"];
    get(b, "along_wind", p.blank_shape.along_wind);
    get(b, "cross_wind", p.blank_shape.cross_wind);
    get(b, "vertical", p.blank_shape.vertical);
  }
}

inline json plume_to_json(const plume::PlumeConfig& p) {
  return {{"diffusion", p.diffusion},
          {"sparsity", p.sparsity},
          {"temperature", p.temperature_c},
          {"relative_humidity", p.relative_humidity},
          {"air_density", p.air_density},
          {"wind_speed", p.wind_speed},
          {"emission_rate", p.emission_rate},
          {"stability_class", plume::to_string(p.stability)},
          {"source_height", p.source_height},
          {"obstacle_count", p.obstacle_count},
          {"initial_spread", p.initial_spread},
          {"turbulence_intensity", p.turbulence_intensity},
          {"turbulence_altitude", p.turbulence_altitude},
          {"tick", p.tick},
          {"horizon", p.horizon},
          {"blank_shape",
           {{"along_wind", p.blank_shape.along_wind},
            {"cross_wind", p.blank_shape.cross_wind},
            {"vertical", p.blank_shape.vertical}}}};
}

// Source position and bounds of the plume always follow the course.
inline void sync_plume_to_course(TrialConfig& cfg) {
  cfg.env.plume.bounds = cfg.env.course.bounds;
  cfg.env.plume.source_position = cfg.env.course.source_xy();
  cfg.env.plume.obstacle_count = static_cast<int>(cfg.env.course.obstacles.size());
}

inline TrialConfig trial_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
  using detail::get;
  TrialConfig c;
  try {
    get(j, "seed", c.seed);
    if (j.contains("agent")) c.agent = parse_agent(j["agent"]);
    if (j.contains("sensor")) c.rig.kind = sensors::parse_sensor_kind(j["sensor"]);
    get(j, "policy_file", c.policy_file);
    if (!c.policy_file.empty() && !base_dir.empty() &&
        std::filesystem::path(c.policy_file).is_relative()) {
      c.policy_file = (base_dir / c.policy_file).string();
    }
    if (j.contains("vision")) {
      get(j["vision"], "enabled", c.vision.enabled);
      get(j["vision"], "radius", c.vision.radius);
    }
    get(j, "step_budget", c.env.step_budget);
    get(j, "warmup", c.env.warmup);
    get(j, "success_radius", c.env.success_radius);
    get(j, "decision_dwell", c.env.decision_dwell);
    if (j.contains("plume")) read_plume(j["plume"], c.env.plume);
    if (j.contains("course_file")) {
      std::filesystem::path p = j["course_file"].get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      c.env.course = load_course(p);
    }
    if (j.contains("course")) c.env.course = course_from_json(j["course"], c.env.course);
    if (j.contains("source_room")) {
      c.env.course.source_room = plume::parse_room(j["source_room"].get<std::string>());
    }
    if (j.contains("termination")) {
      const auto& t = j["termination"];
      get(t, "level", c.termination.tracker.level);
      get(t, "margin", c.termination.tracker.margin);
      get(t, "k_min", c.termination.tracker.k_min);
      get(t, "candidate_stall", c.termination.candidate_stall);
      if (t.contains("estimator")) {
        const auto e = t["estimator"].get<std::string>();
        if (e == "sample_maximum") {
          c.termination.tracker.form = termination::EstimatorForm::SampleMaximum;
        } else if (e == "printed") {
          c.termination.tracker.form = termination::EstimatorForm::Printed;
        } else {
          throw ConfigError("unknown estimator '" + e + "'");
        }
      }
    }
    if (j.contains("mox")) {
      const auto& m = j["mox"];
      get(m, "circuit_voltage", c.rig.mox.circuit_voltage);
      get(m, "load_resistance", c.rig.mox.load_resistance);
      get(m, "clean_air_resistance", c.rig.mox.clean_air_resistance);
      get(m, "sensitivity", c.rig.mox.sensitivity);
      get(m, "response_tau", c.rig.mox.response_tau);
      get(m, "noise_sigma", c.rig.mox.noise_sigma);
      get(m, "sample_rate", c.rig.mox.sample_rate);
    }
    if (j.contains("ec")) {
      const auto& e = j["ec"];
      get(e, "electrons", c.rig.ec.electrons);
      get(e, "area", c.rig.ec.area);
      get(e, "diffusion", c.rig.ec.diffusion);
      get(e, "sample_rate", c.rig.ec.sample_rate);
      get(e, "cutoff", c.rig.ec.cutoff);
      get(e, "full_duration", c.rig.ec.full_duration);
      get(e, "read_period", c.rig.ec.read_period);
      get(e, "noise_fraction", c.rig.ec.noise_fraction);
      get(e, "sensitivity", c.rig.ec.sensitivity);
    }
    get(j, "sensor_noise", c.rig.noise);
    if (j.contains("gains")) {
      const auto& g = j["gains"];
      auto& t = c.env.gains;
      if (g.contains("roll")) detail::read_gains(g["roll"], t.roll);
      if (g.contains("pitch")) detail::read_gains(g["pitch"], t.pitch);
      if (g.contains("yaw")) detail::read_gains(g["yaw"], t.yaw);
      if (g.contains("altitude")) detail::read_gains(g["altitude"], t.altitude);
      if (g.contains("lateral")) detail::read_gains(g["lateral"], t.lateral);
      if (g.contains("longitudinal")) detail::read_gains(g["longitudinal"], t.longitudinal);
    }
    if (j.contains("thresholds")) {
      const auto& t = j["thresholds"];
      get(t, "off", c.oio.thresholds.off);
      get(t, "high", c.oio.thresholds.high);
      c.calibrate_thresholds = false;
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("trial config: ") + e.what());
  }
  sync_plume_to_course(c);
  return c;
}

inline TrialConfig load_trial(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return trial_from_json(j, path.parent_path());
}

inline json trial_to_json(const TrialConfig& c) {
  const auto& g = c.env.gains;
  json j = {
      {"seed", c.seed},
      {"agent", to_string(c.agent)},
      {"sensor", sensors::to_string(c.rig.kind)},
      {"policy_file", c.policy_file},
      {"vision", {{"enabled", c.vision.enabled}, {"radius", c.vision.radius}}},
      {"step_budget", c.env.step_budget},
      {"warmup", c.env.warmup},
      {"success_radius", c.env.success_radius},
      {"decision_dwell", c.env.decision_dwell},
      {"plume", plume_to_json(c.env.plume)},
      {"course", course_to_json(c.env.course)},
      {"termination",
       {{"level", c.termination.tracker.level},
        {"margin", c.termination.tracker.margin},
        {"k_min", c.termination.tracker.k_min},
        {"candidate_stall", c.termination.candidate_stall},
        {"estimator", c.termination.tracker.form == termination::EstimatorForm::Printed
                          ? "printed"
                          : "sample_maximum"}}},
      {"mox",
       {{"circuit_voltage", c.rig.mox.circuit_voltage},
        {"load_resistance", c.rig.mox.load_resistance},
        {"clean_air_resistance", c.rig.mox.clean_air_resistance},
        {"sensitivity", c.rig.mox.sensitivity},
        {"response_tau", c.rig.mox.response_tau},
        {"noise_sigma", c.rig.mox.noise_sigma},
        {"sample_rate", c.rig.mox.sample_rate}}},
      {"ec",
       {{"electrons", c.rig.ec.electrons},
        {"area", c.rig.ec.area},
        {"diffusion", c.rig.ec.diffusion},
        {"sample_rate", c.rig.ec.sample_rate},
        {"cutoff", c.rig.ec.cutoff},
        {"full_duration", c.rig.ec.full_duration},
        {"read_period", c.rig.ec.read_period},
        {"noise_fraction", c.rig.ec.noise_fraction},
        {"sensitivity", c.rig.ec.sensitivity}}},
      {"sensor_noise", c.rig.noise},
      {"gains",
       {{"roll", detail::gains_json(g.roll)},
        {"pitch", detail::gains_json(g.pitch)},
        {"yaw", detail::gains_json(g.yaw)},
        {"altitude", detail::gains_json(g.altitude)},
        {"lateral", detail::gains_json(g.lateral)},
        {"longitudinal", detail::gains_json(g.longitudinal)}}},
  };
  if (!c.calibrate_thresholds) {
    j["thresholds"] = {{"off", c.oio.thresholds.off}, {"high", c.oio.thresholds.high}};
  }
  return j;
}

// Digest of everything that influences a trial except the seed.
inline std::uint64_t config_digest(const TrialConfig& c) {
  json j = trial_to_json(c);
  j.erase("seed");
  return fnv1a(j.dump());
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

}  // namespace oio::mission
