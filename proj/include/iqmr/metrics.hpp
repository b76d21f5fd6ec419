#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "iqmr/engine.hpp"

namespace iqmr {

/// Fixed metrics.csv header; column order is part of the file contract.
inline constexpr const char* kMetricsHeader =
    "episode,cum_reward,residual_energy_j,delivered,dropped,fragmented,mean_q";

/// One metrics.csv row. cum_reward, delivered and dropped are cumulative
/// over the run; fragmented is the per-episode distinct fragmented-UAV count.
struct EpisodeMetrics {
  std::int64_t episode = 0;
  double cum_reward = 0.0;
  double residual_energy_j = 0.0;
  std::int64_t delivered = 0;
  std::int64_t dropped = 0;
  int fragmented = 0;
  double mean_q = 0.0;
};

std::string to_csv_row(const EpisodeMetrics& m);
std::vector<EpisodeMetrics> read_metrics_csv(const std::string& path);

/// Accumulates engine episode results into cumulative metrics rows.
class MetricsAccumulator {
 public:
  EpisodeMetrics add(const EpisodeResult& r) {
    cum_reward_ += r.reward;
    delivered_ += r.delivered;
    dropped_ += r.dropped;
    injected_ += r.injected;
    return {r.episode, cum_reward_, r.residual_j, delivered_, dropped_,
            r.fragmented_uavs, r.mean_q};
  }

  double cum_reward() const { return cum_reward_; }
  std::int64_t delivered() const { return delivered_; }
  std::int64_t dropped() const { return dropped_; }
  std::int64_t injected() const { return injected_; }

 private:
  double cum_reward_ = 0.0;
  std::int64_t delivered_ = 0;
  std::int64_t dropped_ = 0;
  std::int64_t injected_ = 0;
};

struct RunSummary {
  std::int64_t episodes = 0;
  std::uint64_t seed = 0;
  std::int64_t injected = 0;
  std::int64_t delivered = 0;
  std::int64_t dropped = 0;
  double final_cum_reward = 0.0;
  double final_residual_pct = 0.0;  // network residual / fleet capacity
  double throughput_pct = 0.0;      // delivered / injected
  std::int64_t convergence_episode = 0;
};

std::string to_json(const RunSummary& s);
RunSummary read_summary_json(const std::string& path);

/// Per-episode rewards from cumulative rows (first difference).
std::vector<double> per_episode_rewards(std::span<const EpisodeMetrics> rows);

/// First episode from which every forward 100-episode sliding mean of the
/// per-episode reward stays within +-5% of the final window's mean.
std::int64_t convergence_episode(std::span<const double> rewards,
                                 std::size_t window = 100, double tol = 0.05);

RunSummary summarize(std::span<const EpisodeMetrics> rows, std::uint64_t seed,
                     std::int64_t injected, double fleet_capacity_j);

/// Long-format (episode,metric,value) rows for plotting tools.
std::string to_long_csv(std::span<const EpisodeMetrics> rows);

}  // namespace iqmr
