#pragma once

#include <string>
#include <vector>

#include "iqmr/config.hpp"
#include "iqmr/metrics.hpp"

namespace iqmr {

/// Run the configured number of episodes, writing metrics.csv, summary.json
/// and config.resolved into out_dir (created if missing).
RunSummary run_simulation(const SimConfig& cfg, const std::string& out_dir);

struct ReportResult {
  RunSummary summary;
  std::string long_csv_path;
};

/// Recompute the summary from a run directory's metrics.csv and emit the
/// plot-ready long-format CSV next to it.
ReportResult run_report(const std::string& run_dir);

struct SweepCell {
  std::string param;
  std::string value;
  std::uint64_t seed = 0;
  std::string dir;
  RunSummary summary;
};

struct SweepOptions {
  std::string param;
  std::vector<std::string> values;
  std::vector<std::uint64_t> seeds;
  int jobs = 1;
};

/// Cross product of values x seeds, run with `jobs` worker threads. Cell
/// results (and sweep.csv ordering) are independent of the parallelism
/// degree: every run owns its seeds and its output directory.
std::vector<SweepCell> run_sweep(const SimConfig& base, const SweepOptions& opt,
                                 const std::string& out_dir);

std::string sweep_csv(const std::vector<SweepCell>& cells);

}  // namespace iqmr
