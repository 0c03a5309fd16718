#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

#include "oio/core.hpp"
#include "oio/nav/action.hpp"
#include "oio/nav/tabular.hpp"

namespace oio::mission {

struct PolicyFile {
  nav::TabularAgent agent{};
  std::map<std::string, std::string> metadata;
};

inline std::string learner_name(nav::Learner l) {
  return l == nav::Learner::QLambda ? "q_lambda" : "expected_sarsa_lambda";
}

// Layout: one `# key=value ...` metadata line, a header, then nine rows of
// seven action values, one per state id.
inline void save_policy(const std::filesystem::path& path, const nav::TabularAgent& agent,
                        std::map<std::string, std::string> meta = {}) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write policy file '" + path.string() + "'");
  meta["format"] = "oio-policy-v1";
  meta["learner"] = learner_name(agent.learner);
  meta["episodes"] = std::to_string(agent.episode);
  out << '#';
  for (const auto& [k, v] : meta) out << ' ' << k << '=' << v;
  out << '\n' << "state";
  for (std::size_t a = 0; a < nav::kTabularActions; ++a) {
    out << ',' << nav::kActionNames[a];
  }
  out << '\n' << std::setprecision(17);
  for (std::size_t s = 0; s < nav::kStates; ++s) {
    out << s;
    for (std::size_t a = 0; a < nav::kTabularActions; ++a) out << ',' << agent.q[s][a];
    out << '\n';
  }
}

inline PolicyFile load_policy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open policy file '" + path.string() + "'");
  PolicyFile pf;
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#') {
    throw ConfigError("policy file: missing metadata line");
  }
  std::istringstream meta(line.substr(1));
  std::string kv;
  while (meta >> kv) {
    const auto eq = kv.find('=');
    if (eq != std::string::npos) pf.metadata[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  if (pf.metadata["format"] != "oio-policy-v1") throw ConfigError("policy file: unknown format");
  pf.agent.learner = pf.metadata["learner"] == "q_lambda" ? nav::Learner::QLambda
                                                          : nav::Learner::ExpectedSarsaLambda;
  pf.agent.epsilon = 0.0;
  std::getline(in, line);  // header
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');
    const std::size_t s = std::stoul(cell);
    if (s >= nav::kStates) throw ConfigError("policy file: state id out of range");
    for (std::size_t a = 0; a < nav::kTabularActions; ++a) {
      if (!std::getline(ls, cell, ',')) throw ConfigError("policy file: short row");
      pf.agent.q[s][a] = std::stod(cell);
    }
    ++rows;
  }
  if (rows != nav::kStates) throw ConfigError("policy file: expected 9 state rows");
  return pf;
}

}  // namespace oio::mission
