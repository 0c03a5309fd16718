// Command-line driver: single trials, seeded suites, RL training and plots.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "oio/mission/config.hpp"
#include "oio/mission/plots.hpp"
#include "oio/mission/policy_io.hpp"
#include "oio/mission/suite.hpp"
#include "oio/mission/trial.hpp"
#include "oio/nav/plume_task.hpp"
#include "oio/plume/export.hpp"

namespace fs = std::filesystem;
using namespace oio;
using namespace oio::mission;

namespace {

struct TrialFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string sensor;
  std::string agent;
  std::string policy;
  std::string vision;
  std::string out;
};

void add_trial_flags(CLI::App* cmd, TrialFlags& f) {
  cmd->add_option("-c,--config", f.config, "trial config (JSON)");
  cmd->add_option("-s,--seed", f.seed, "trial seed (suite: first seed)");
  cmd->add_option("--sensor", f.sensor, "mox or ec")->check(CLI::IsMember({"mox", "ec"}));
  cmd->add_option("--agent", f.agent, "oio, expected_sarsa_lambda or q_lambda");
  cmd->add_option("--policy", f.policy, "policy file for RL agents");
  cmd->add_option("--vision", f.vision, "vision proxy on/off")->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("-o,--out", f.out, "output directory");
}

fs::path output_dir(const std::string& flag, const std::string& verb) {
  if (!flag.empty()) return flag;
  const char* root = std::getenv("OIO_OUTPUT_ROOT");
  return fs::path(root && *root ? root : "out") / verb;
}

TrialConfig build_config(const TrialFlags& f) {
  TrialConfig cfg;
  if (!f.config.empty()) {
    cfg = load_trial(f.config);
  } else {
    sync_plume_to_course(cfg);
  }
  if (f.seed) cfg.seed = *f.seed;
  if (!f.sensor.empty()) cfg.rig.kind = sensors::parse_sensor_kind(f.sensor);
  if (!f.agent.empty()) cfg.agent = parse_agent(f.agent);
  if (!f.policy.empty()) cfg.policy_file = f.policy;
  if (!f.vision.empty()) cfg.vision.enabled = f.vision == "on";
  return cfg;
}

void print_record(const TrialRecord& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << r.elapsed << " s, " << r.steps
     << " decisions, final distance " << std::setprecision(2) << r.final_distance << " m";
  std::cout << "seed " << r.seed << ": " << to_string(r.outcome) << ", " << os.str();
  if (!r.error.empty()) std::cout << " (" << r.error << ")";
  std::cout << '\n';
}

void write_trial_files(const fs::path& dir, const TrialRecord& r) {
  const std::string stem = "trial_" + std::to_string(r.seed);
  write_file(dir / (stem + ".csv"), [&](std::ostream& o) { write_trial_log(o, r); });
  write_file(dir / (stem + "_sensors.csv"), [&](std::ostream& o) { write_sensor_trace(o, r); });
}

int exit_code(const std::vector<TrialRecord>& records) {
  for (const auto& r : records)
    if (r.outcome == Outcome::Crashed) return 1;
  return 0;
}

std::vector<double> read_curve(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open learning curve '" + path.string() + "'");
  std::vector<double> out;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    out.push_back(std::stod(line.substr(comma + 1, line.find(',', comma + 1) - comma - 1)));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Olfactory navigation simulator"};
  app.require_subcommand(1);

  TrialFlags run_f;
  auto* run = app.add_subcommand("run", "fly one seeded trial");
  add_trial_flags(run, run_f);

  TrialFlags suite_f;
  std::size_t n_trials = 20;
  std::size_t threads = 1;
  bool alternate = false;
  auto* suite = app.add_subcommand("suite", "fly N trials on consecutive seeds");
  add_trial_flags(suite, suite_f);
  suite->add_option("-n,--trials", n_trials, "number of trials")->check(CLI::PositiveNumber);
  suite->add_option("-j,--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  suite->add_flag("--alternate-rooms", alternate, "even seeds Room 2, odd seeds Room 1");

  std::string learner = "expected_sarsa_lambda";
  std::size_t episodes = 10000;
  double sparsity = 0.0;
  std::uint64_t train_seed = 1;
  std::string train_out;
  auto* train = app.add_subcommand("train", "train a tabular agent on the miniature plume");
  train->add_option("--agent", learner, "expected_sarsa_lambda or q_lambda");
  train->add_option("--episodes", episodes, "training episodes");
  train->add_option("--sparsity", sparsity, "blank fraction")->check(CLI::Range(0.0, 1.0));
  train->add_option("-s,--seed", train_seed, "training seed");
  train->add_option("-o,--out", train_out, "output directory");

  TrialFlags plot_f;
  std::size_t plot_trials = 1;
  std::string curve_file;
  bool grids = false;
  auto* plot = app.add_subcommand("plot", "fly trials and write plots with their CSVs");
  add_trial_flags(plot, plot_f);
  plot->add_option("-n,--trials", plot_trials, "trials to overlay")->check(CLI::PositiveNumber);
  plot->add_option("--curve", curve_file, "learning_curve.csv from train");
  plot->add_flag("--grids", grids, "also export concentration and blank grids");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const TrialConfig cfg = build_config(run_f);
      const fs::path dir = output_dir(run_f.out, "run");
      const TrialRecord rec = run_trial(cfg);
      write_trial_files(dir, rec);
      print_record(rec);
      return exit_code({rec});
    }
    if (*suite) {
      const TrialConfig cfg = build_config(suite_f);
      const fs::path dir = output_dir(suite_f.out, "suite");
      SuiteOptions opt;
      opt.threads = threads;
      opt.alternate_rooms = alternate;
      const auto res = run_suite(cfg, n_trials, cfg.seed, opt);
      for (const auto& r : res.records) {
        write_trial_files(dir / "trials", r);
        print_record(r);
      }
      write_file(dir / "suite.csv", [&](std::ostream& o) { write_suite_csv(o, res); });
      const auto& m = res.metrics;
      std::cout << std::fixed << std::setprecision(1) << "success " << m.successes << "/"
                << m.trials << ", mean " << m.mean_time << " s, std " << m.std_time << " s, best "
                << m.best_time << " s\n";
      return exit_code(res.records);
    }
    if (*train) {
      nav::TabularAgent agent;
      const auto kind = parse_agent(learner);
      if (kind == AgentKind::Oio) throw ConfigError("train: the OIO agent has nothing to learn");
      agent.learner = kind == AgentKind::QLambda ? nav::Learner::QLambda
                                                 : nav::Learner::ExpectedSarsaLambda;
      nav::TabularPlumeTask task(plume::miniature_env(sparsity));
      const auto curve = nav::train(agent, task, episodes, train_seed);
      const fs::path dir = output_dir(train_out, "train");
      fs::create_directories(dir);
      save_policy(dir / "policy.csv", agent,
                  {{"seed", std::to_string(train_seed)}, {"sparsity", fmt(sparsity)}});
      write_file(dir / "learning_curve.csv", [&](std::ostream& o) {
        o << "episode,return,mean_abs_td,steps,epsilon\n";
        for (std::size_t e = 0; e < curve.returns.size(); ++e) {
          o << e << ',' << fmt(curve.returns[e]) << ',' << fmt(curve.mean_abs_td[e]) << ','
            << curve.steps[e] << ',' << fmt(curve.epsilon[e]) << '\n';
        }
      });
      std::cout << "trained " << learner << " for " << episodes << " episodes; final-10% return "
                << std::setprecision(4) << curve.tail_mean(0.1) << "; wrote "
                << (dir / "policy.csv").string() << '\n';
      return 0;
    }
    if (*plot) {
      const TrialConfig cfg = build_config(plot_f);
      const fs::path dir = output_dir(plot_f.out, "plot");
      const auto res = run_suite(cfg, plot_trials, cfg.seed);
      PlotOptions opt;
      opt.course = cfg.env.course;
      opt.gains = cfg.env.gains;
      if (!curve_file.empty()) opt.episode_returns = read_curve(curve_file);
      for (const auto& p : emit_plots(res.records, dir, opt)) std::cout << p.string() << '\n';
      if (grids) {
        plume::PlumeConfig pc = cfg.env.plume;
        pc.horizon = std::max(pc.horizon, cfg.env.warmup + 1.0);
        const plume::PlumeField field(pc, cfg.seed);
        const double z = cfg.env.twin.cruise_altitude;
        write_file(dir / "concentration_grid.csv", [&](std::ostream& o) {
          plume::write_concentration_grid(o, field, cfg.env.warmup, z);
        });
        write_file(dir / "blank_grid.csv", [&](std::ostream& o) {
          plume::write_blank_grid(o, field, cfg.env.warmup, z);
        });
      }
      return exit_code(res.records);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
