#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "oio/core.hpp"
#include "oio/nav/action.hpp"
#include "oio/nav/state.hpp"

namespace oio::nav {

enum class Learner { QLambda, ExpectedSarsaLambda };

// How Expected SARSA averages the next-state values.
enum class Expectation { EpsilonGreedy, Uniform };

struct TdParams {
  double gamma = 0.9;
  double learning_rate = 1e-4;
  double epsilon = 1.0;
  double epsilon_decay = 0.999;  // per episode
  double epsilon_min = 0.01;
  double lambda = 0.8;
  Expectation expectation = Expectation::EpsilonGreedy;

  void validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("td params: gamma must lie in [0, 1]");
    if (!(learning_rate > 0.0)) throw ConfigError("td params: learning rate must be > 0");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("td params: lambda must lie in [0, 1]");
    if (!(epsilon_min >= 0.0 && epsilon_min <= epsilon && epsilon <= 1.0)) {
      throw ConfigError("td params: need 0 <= epsilon_min <= epsilon <= 1");
    }
    if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) {
      throw ConfigError("td params: epsilon decay must lie in (0, 1]");
    }
  }
};

using QRow = std::array<double, kTabularActions>;
using QTable = std::array<QRow, kStates>;

struct TabularAgent {
  Learner learner = Learner::ExpectedSarsaLambda;
  TdParams params{};
  QTable q{};
  QTable e{};
  double epsilon = 1.0;
  std::size_t episode = 0;

  TabularAgent() = default;
  TabularAgent(Learner l, TdParams p) : learner(l), params(p), epsilon(p.epsilon) { p.validate(); }

  void begin_episode() {
    for (auto& row : e) row.fill(0.0);
  }

  // epsilon_t = max(epsilon_min, epsilon_0 * decay^t)
  void end_episode() {
    ++episode;
    epsilon = std::max(params.epsilon_min, epsilon * params.epsilon_decay);
  }
};

inline void check_state(std::size_t s) {
  if (s >= kStates) throw std::domain_error("state id out of range");
}

inline std::size_t greedy_index(const QRow& row) {
  return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

inline Action select_action(const TabularAgent& agent, std::size_t s, Rng& rng) {
  check_state(s);
  if (uniform01(rng) < agent.epsilon) {
    return action_from_index(uniform_index(rng, kTabularActions));
  }
  return action_from_index(greedy_index(agent.q[s]));
}

// Next-state value under the agent's epsilon-greedy policy, or the plain mean
// when the uniform form is configured.
inline double expected_value(const TabularAgent& agent, std::size_t s) {
  const QRow& row = agent.q[s];
  const double n = static_cast<double>(kTabularActions);
  const double mean = std::accumulate(row.begin(), row.end(), 0.0) / n;
  if (agent.params.expectation == Expectation::Uniform) return mean;
  const double eps = agent.epsilon;
  return eps * mean + (1.0 - eps) * row[greedy_index(row)];
}

namespace detail {

inline void trace_sweep(TabularAgent& agent, std::size_t s, std::size_t a, double delta) {
  agent.e[s][a] += 1.0;
  const double step = agent.params.learning_rate * delta;
  const double decay = agent.params.gamma * agent.params.lambda;
  for (std::size_t i = 0; i < kStates; ++i) {
    for (std::size_t j = 0; j < kTabularActions; ++j) {
      agent.q[i][j] += step * agent.e[i][j];
      agent.e[i][j] *= decay;
    }
  }
}

}  // namespace detail

// Watkins Q(lambda): traces are cut when the action being credited was not
// greedy at the time it was taken. Returns the TD error.
inline double q_lambda_update(TabularAgent& agent, std::size_t s, Action a, double r,
                              std::size_t s_next, bool terminal = false) {
  check_state(s);
  check_state(s_next);
  if (!is_tabular(a)) throw std::domain_error("q_lambda_update: action outside the tabular set");
  const std::size_t ai = index_of(a);
  const QRow& row = agent.q[s];
  if (row[ai] < *std::max_element(row.begin(), row.end())) {
    for (auto& er : agent.e) er.fill(0.0);
  }
  const double target = terminal ? 0.0 : *std::max_element(agent.q[s_next].begin(),
                                                          agent.q[s_next].end());
  const double delta = r + agent.params.gamma * target - agent.q[s][ai];
  detail::trace_sweep(agent, s, ai, delta);
  return delta;
}

inline double expected_sarsa_lambda_update(TabularAgent& agent, std::size_t s, Action a, double r,
                                           std::size_t s_next, bool terminal = false) {
  check_state(s);
  check_state(s_next);
  if (!is_tabular(a)) {
    throw std::domain_error("expected_sarsa_lambda_update: action outside the tabular set");
  }
  const std::size_t ai = index_of(a);
  const double target = terminal ? 0.0 : expected_value(agent, s_next);
  const double delta = r + agent.params.gamma * target - agent.q[s][ai];
  detail::trace_sweep(agent, s, ai, delta);
  return delta;
}

inline double td_update(TabularAgent& agent, std::size_t s, Action a, double r, std::size_t s_next,
                        bool terminal = false) {
  return agent.learner == Learner::QLambda
             ? q_lambda_update(agent, s, a, r, s_next, terminal)
             : expected_sarsa_lambda_update(agent, s, a, r, s_next, terminal);
}

struct TabularStep {
  std::size_t state = 0;
  double reward = 0.0;
  bool done = false;
};

struct LearningCurve {
  std::vector<double> returns;
  std::vector<double> mean_abs_td;
  std::vector<std::size_t> steps;
  std::vector<double> epsilon;

  std::size_t size() const { return returns.size(); }

  // Mean return over the last `fraction` of episodes.
  double tail_mean(double fraction = 0.1) const {
    if (returns.empty()) return 0.0;
    const auto n = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(returns.size()))));
    const auto begin = returns.end() - static_cast<std::ptrdiff_t>(std::min(n, returns.size()));
    return std::accumulate(begin, returns.end(), 0.0) / static_cast<double>(returns.end() - begin);
  }
};

// Episodic TD(lambda) training. `Env` provides
//   std::size_t reset(std::uint64_t episode_seed);
//   TabularStep step(Action a);
// Episodes end on `done` or after max_steps transitions.
template <class Env>
LearningCurve train(TabularAgent& agent, Env& env, std::size_t episodes, std::uint64_t seed,
                    std::size_t max_steps = 200) {
  LearningCurve curve;
  Rng rng = make_rng(seed, Stream::Agent);
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    agent.begin_episode();
    std::size_t s = env.reset(mix64(seed ^ mix64(ep + 1)));
    Action a = select_action(agent, s, rng);
    double ret = 0.0, abs_td = 0.0, discount = 1.0;
    std::size_t n = 0;
    for (; n < max_steps; ++n) {
      const TabularStep st = env.step(a);
      ret += discount * st.reward;
      discount *= agent.params.gamma;
      const double delta = td_update(agent, s, a, st.reward, st.state, st.done);
      abs_td += std::abs(delta);
      if (st.done) {
        ++n;
        break;
      }
      s = st.state;
      a = select_action(agent, s, rng);
    }
    curve.returns.push_back(ret);
    curve.mean_abs_td.push_back(n > 0 ? abs_td / static_cast<double>(n) : 0.0);
    curve.steps.push_back(n);
    curve.epsilon.push_back(agent.epsilon);
    agent.end_episode();
  }
  return curve;
}

// Greedy rollout without learning; returns the action sequence taken.
template <class Env>
std::vector<Action> greedy_rollout(const TabularAgent& agent, Env& env, std::uint64_t episode_seed,
                                   std::size_t max_steps) {
  std::vector<Action> taken;
  std::size_t s = env.reset(episode_seed);
  for (std::size_t n = 0; n < max_steps; ++n) {
    const Action a = action_from_index(greedy_index(agent.q[s]));
    taken.push_back(a);
    const TabularStep st = env.step(a);
    if (st.done) break;
    s = st.state;
  }
  return taken;
}

}  // namespace oio::nav
