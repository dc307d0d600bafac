#include <CLI11.hpp>

#include "artifacts.hpp"
#include "closedloop.hpp"
#include "config.hpp"
#include "losseval.hpp"
#include "predictor.hpp"
#include "rng.hpp"
#include "select.hpp"
#include "smote.hpp"
#include "subsim.hpp"
#include "workpool.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <iostream>
#include <set>

using namespace awekit;
using nlohmann::json;

namespace {

std::string run_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run_%06d", index);
  return buf;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
  std::string config_path;
  int runs = -1;           // default from config
  bool zero_noise = false;
  bool summary = false;
  std::string theta_file;  // optional: replay one stored noise vector
  std::uint64_t seed_override = 0;
  bool has_seed_override = false;
};

int cmd_simulate(const SimulateOptions& opt) {
  CampaignConfig cfg = CampaignConfig::load_file(opt.config_path);
  if (opt.has_seed_override) cfg.seed = opt.seed_override;
  int n_runs = opt.runs > 0 ? opt.runs : cfg.simulate_runs;
  if (opt.zero_noise || !opt.theta_file.empty()) n_runs = 1;

  std::string dir = cfg.output_dir + "/runs";
  ensure_dir(dir);

  auto make_theta = [&](int i) {
    if (opt.zero_noise) {
      NoiseSeedVector t;
      t.samples = VecX::Zero(noise_dimension(cfg.sim.t_sim, cfg.sim.f_s));
      t.f_s = cfg.sim.f_s;
      return t;
    }
    if (!opt.theta_file.empty()) {
      json j = json::parse(read_text_file(opt.theta_file));
      NoiseSeedVector t;
      std::vector<double> v = j.at("theta").get<std::vector<double>>();
      t.samples = Eigen::Map<VecX>(v.data(), static_cast<Eigen::Index>(v.size()));
      t.f_s = cfg.sim.f_s;
      return t;
    }
    return draw_noise(derive_seed(cfg.seed, 1000, i), cfg.sim.t_sim, cfg.sim.f_s);
  };

  auto run_one = [&](std::size_t i) -> RunLog {
    NoiseSeedVector theta = make_theta(static_cast<int>(i));
    RunLog log = run_pumping_cycle(theta, cfg);
    log.run_id = run_name(static_cast<int>(i));
    return log;
  };
  std::vector<RunLog> logs = parallel_map<RunLog>(n_runs, run_one);

  int completed = 0, ruptures = 0, invalid = 0;
  std::vector<double> max_g;
  LimitFunction lf = LimitFunction::from_config(cfg.limit);
  for (int i = 0; i < n_runs; ++i) {
    const RunLog& log = logs[i];
    log.write_file(dir + "/" + log.run_id + ".log");
    write_text_file(dir + "/" + log.run_id + ".events.jsonl", log.serialize_events());
    max_g.push_back(evaluate_limit(log, lf));
    switch (log.outcome) {
      case RunOutcome::Completed: ++completed; break;
      case RunOutcome::Rupture: ++ruptures; break;
      case RunOutcome::Invalid: ++invalid; break;
    }
  }

  json summary;
  summary["config_hash"] = cfg.hash();
  summary["seed"] = cfg.seed;
  summary["runs"] = n_runs;
  summary["completed"] = completed;
  summary["ruptures"] = ruptures;
  summary["invalid"] = invalid;
  summary["max_g"] = max_g;
  write_text_file(cfg.output_dir + "/runs/summary.json", summary.dump(2) + "\n");

  if (opt.summary) {
    for (int i = 0; i < n_runs; ++i) {
      const RunLog& log = logs[i];
      double dur = log.duration();
      double ep_max_traction = 0, ft_max = 0, power = 0;
      int mode_col = log.column_index("mode");
      int ep_col = log.column_index("e_p");
      int ft_col = log.column_index("F_t");
      int pw_col = log.column_index("power_w");
      for (std::size_t r = 0; r < log.rows(); ++r) {
        ft_max = std::max(ft_max, log.at(r, ft_col));
        power += log.at(r, pw_col);
        if (static_cast<int>(log.at(r, mode_col)) == 0)
          ep_max_traction = std::max(ep_max_traction, log.at(r, ep_col));
      }
      power /= std::max<std::size_t>(log.rows(), 1);
      std::printf(
          "%s outcome=%s t_end=%.1fs max_F_t=%.1fN e_p_max(traction)=%.2fm "
          "avg_power=%.2fkW",
          log.run_id.c_str(), outcome_name(log.outcome), dur, ft_max,
          ep_max_traction, power / 1000.0);
      std::printf(" events:");
      for (const auto& e : log.events)
        std::printf(" %.1f:%s%s%s", e.t, e.type.c_str(),
                    e.detail.empty() ? "" : "=", e.detail.c_str());
      std::printf("\n");
    }
  }
  std::printf("simulate: %d runs -> %d completed, %d ruptures, %d invalid\n", n_runs,
              completed, ruptures, invalid);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Upset generation, prediction and avoidance toolkit for a tethered "
      "wind energy simulator"};
  app.require_subcommand(1);

  SimulateOptions sim_opt;
  CLI::App* sim =
      app.add_subcommand("simulate", "Run pumping cycles and store run logs");
  sim->add_option("-c,--config", sim_opt.config_path, "Campaign config file")
      ->required();
  sim->add_option("-n,--runs", sim_opt.runs, "Number of runs (default from config)");
  sim->add_flag("--zero-noise", sim_opt.zero_noise, "Single run without turbulence");
  sim->add_option("--theta-file", sim_opt.theta_file, "Replay one stored noise vector");
  sim->add_flag("--summary", sim_opt.summary, "Print a per-run summary line");
  auto* seed_opt = sim->add_option("--seed", sim_opt.seed_override,
                                   "Override the master seed");

  try {
    app.parse(argc, argv);
    sim_opt.has_seed_override = seed_opt->count() > 0;
    if (sim->parsed()) return cmd_simulate(sim_opt);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
