#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "iqmr/config.hpp"
#include "iqmr/runner.hpp"

namespace {

// exit codes: 0 ok, 1 config problem, 2 runtime failure
constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

iqmr::SimConfig resolve_config(const std::string& config_path,
                               const std::string& scenario_path,
                               std::optional<std::uint64_t> seed,
                               std::optional<std::int64_t> episodes,
                               const std::string& baseline) {
  iqmr::SimConfig cfg =
      config_path.empty() ? iqmr::default_config() : iqmr::load_config(config_path);
  if (!scenario_path.empty()) iqmr::load_scenario_file(cfg, scenario_path);
  if (seed) cfg.sim.seed = *seed;
  if (episodes) {
    if (*episodes < 1) throw iqmr::ConfigError("--episodes must be >= 1");
    cfg.sim.episodes = *episodes;
  }
  if (!baseline.empty()) {
    if (baseline != "iqmr" && baseline != "plain-q")
      throw iqmr::ConfigError("--baseline must be one of iqmr, plain-q");
    cfg.sim.baseline = baseline;
  }
  iqmr::apply_baseline(cfg);
  iqmr::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-UAV relay network simulator with Q(lambda) routing"};
  app.require_subcommand(1);

  std::string config_path;
  std::string scenario_path;
  std::string out_dir = "out";
  std::string baseline;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> episodes;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "config file (defaults when omitted)");
    cmd->add_option("--scenario", scenario_path, "extra scenario event file");
    cmd->add_option("--seed", seed, "override sim.seed");
    cmd->add_option("--episodes", episodes, "override sim.episodes");
    cmd->add_option("--baseline", baseline, "iqmr or plain-q");
    cmd->add_option("--out", out_dir, "output directory");
  };

  auto* simulate = app.add_subcommand("simulate", "run one seeded simulation");
  add_common(simulate);

  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  add_common(sweep);
  std::string param;
  std::vector<std::string> values;
  std::vector<std::uint64_t> seeds;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  sweep->add_option("--param", param, "config key to sweep")->required();
  sweep->add_option("--values", values, "comma-separated values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--seeds", seeds, "comma-separated seeds")->delimiter(',');
  sweep->add_option("--jobs", jobs, "worker threads");

  auto* report = app.add_subcommand("report", "summarize a finished run");
  std::string run_dir;
  report->add_option("--run", run_dir, "run directory containing metrics.csv")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      const auto cfg =
          resolve_config(config_path, scenario_path, seed, episodes, baseline);
      const auto summary = iqmr::run_simulation(cfg, out_dir);
      std::cout << "episodes: " << summary.episodes << "\n"
                << "delivered: " << summary.delivered << " / " << summary.injected
                << " (" << summary.throughput_pct << "%)\n"
                << "final residual: " << summary.final_residual_pct << "%\n"
                << "final cumulative reward: " << summary.final_cum_reward << "\n"
                << "convergence episode: " << summary.convergence_episode << "\n";
      return kOk;
    }
    if (sweep->parsed()) {
      auto cfg = resolve_config(config_path, scenario_path, seed, episodes, baseline);
      iqmr::SweepOptions opt;
      opt.param = param;
      opt.values = values;
      opt.seeds = seeds.empty() ? std::vector<std::uint64_t>{cfg.sim.seed} : seeds;
      opt.jobs = jobs;
      const auto cells = iqmr::run_sweep(cfg, opt, out_dir);
      std::cout << "sweep cells: " << cells.size() << "\n"
                << "results: " << out_dir << "/sweep.csv\n";
      return kOk;
    }
    if (report->parsed()) {
      const auto result = iqmr::run_report(run_dir);
      const auto& s = result.summary;
      std::cout << "episodes: " << s.episodes << "\n"
                << "convergence episode: " << s.convergence_episode << "\n"
                << "residual retention: " << s.final_residual_pct << "%\n"
                << "throughput: " << s.throughput_pct << "%\n"
                << "long-format csv: " << result.long_csv_path << "\n";
      return kOk;
    }
  } catch (const iqmr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}
