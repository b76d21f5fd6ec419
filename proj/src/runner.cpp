#include "iqmr/runner.hpp"

#include <atomic>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "iqmr/engine.hpp"

namespace iqmr {

namespace fs = std::filesystem;

namespace {

std::string fmt(double d) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  (void)ec;
  return std::string(buf, ptr);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SimError("cannot write " + path.string());
  out << content;
  if (!out) throw SimError("write failed: " + path.string());
}

// value spelled safely for a directory name
std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-')
               ? c
               : '_';
  return out;
}

}  // namespace

RunSummary run_simulation(const SimConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);

  Engine engine(cfg);
  MetricsAccumulator acc;
  std::vector<EpisodeMetrics> rows;
  rows.reserve(static_cast<std::size_t>(cfg.sim.episodes));

  std::ostringstream csv;
  csv << kMetricsHeader << "\n";
  for (std::int64_t e = 0; e < cfg.sim.episodes; ++e) {
    const EpisodeMetrics row = acc.add(engine.run_episode());
    rows.push_back(row);
    csv << to_csv_row(row) << "\n";
  }

  const double fleet_capacity =
      cfg.energy.initial_j * static_cast<double>(cfg.sim.num_uavs);
  const RunSummary summary =
      summarize(rows, cfg.sim.seed, acc.injected(), fleet_capacity);

  write_file(fs::path(out_dir) / "metrics.csv", csv.str());
  write_file(fs::path(out_dir) / "summary.json", to_json(summary));
  write_file(fs::path(out_dir) / "config.resolved",
             serialize_config(engine.config()));
  return summary;
}

ReportResult run_report(const std::string& run_dir) {
  const auto rows = read_metrics_csv((fs::path(run_dir) / "metrics.csv").string());

  // residual % is only recoverable when the resolved config sits next to the
  // metrics; otherwise report it relative to the first row's residual
  double fleet_capacity = 0.0;
  std::uint64_t seed = 0;
  std::int64_t injected = 0;
  const fs::path resolved = fs::path(run_dir) / "config.resolved";
  if (fs::exists(resolved)) {
    const SimConfig cfg = load_config(resolved.string());
    fleet_capacity = cfg.energy.initial_j * static_cast<double>(cfg.sim.num_uavs);
    seed = cfg.sim.seed;
  } else if (!rows.empty()) {
    fleet_capacity = rows.front().residual_energy_j;
  }
  const fs::path summary_path = fs::path(run_dir) / "summary.json";
  if (fs::exists(summary_path)) {
    injected = read_summary_json(summary_path.string()).injected;
  } else if (!rows.empty()) {
    injected = rows.back().delivered + rows.back().dropped;
  }

  ReportResult result;
  result.summary = summarize(rows, seed, injected, fleet_capacity);
  const fs::path long_path = fs::path(run_dir) / "report_long.csv";
  write_file(long_path, to_long_csv(rows));
  result.long_csv_path = long_path.string();
  return result;
}

std::vector<SweepCell> run_sweep(const SimConfig& base, const SweepOptions& opt,
                                 const std::string& out_dir) {
  if (opt.values.empty()) throw ConfigError("sweep: empty value list");
  if (opt.seeds.empty()) throw ConfigError("sweep: empty seed list");

  // validate the key and every value up front, before any run starts
  for (const auto& value : opt.values) {
    SimConfig probe = base;
    set_config_value(probe, opt.param, value);
  }

  std::vector<SweepCell> cells;
  for (const auto& value : opt.values)
    for (const auto seed : opt.seeds) {
      SweepCell cell;
      cell.param = opt.param;
      cell.value = value;
      cell.seed = seed;
      cell.dir = (fs::path(out_dir) /
                  (sanitize(opt.param) + "=" + sanitize(value)) /
                  ("seed=" + std::to_string(seed)))
                     .string();
      cells.push_back(std::move(cell));
    }

  fs::create_directories(out_dir);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(cells.size());

  const int jobs = std::max(1, opt.jobs);
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        SimConfig cfg = base;
        set_config_value(cfg, cells[i].param, cells[i].value);
        cfg.sim.seed = cells[i].seed;
        cells[i].summary = run_simulation(cfg, cells[i].dir);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  for (int j = 0; j < jobs; ++j) workers.emplace_back(work);
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::ofstream out(fs::path(out_dir) / "sweep.csv", std::ios::binary);
  out << sweep_csv(cells);
  return cells;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
  std::ostringstream out;
  out << "param,value,seed,episodes,final_cum_reward,delivered,dropped,"
         "throughput_pct,final_residual_pct,convergence_episode\n";
  for (const auto& c : cells) {
    out << c.param << ',' << c.value << ',' << c.seed << ','
        << c.summary.episodes << ',' << fmt(c.summary.final_cum_reward) << ','
        << c.summary.delivered << ',' << c.summary.dropped << ','
        << fmt(c.summary.throughput_pct) << ','
        << fmt(c.summary.final_residual_pct) << ','
        << c.summary.convergence_episode << "\n";
  }
  return out.str();
}

}  // namespace iqmr
