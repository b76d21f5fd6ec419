#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "iqmr/metrics.hpp"
#include "testutil.hpp"

using namespace iqmr;

TEST_CASE("metrics header and row format are stable") {
  CHECK(std::string(kMetricsHeader) ==
        "episode,cum_reward,residual_energy_j,delivered,dropped,fragmented,mean_q");
  const EpisodeMetrics m{7, 1.5, 1000.25, 3, 1, 2, 0.125};
  CHECK(to_csv_row(m) == "7,1.5,1000.25,3,1,2,0.125");
}

TEST_CASE("metrics csv round-trips") {
  const auto path = std::filesystem::temp_directory_path() / "iqmr_metrics_rt.csv";
  {
    std::ofstream out(path);
    out << kMetricsHeader << "\n";
    out << to_csv_row({0, 0.5, 90.0, 1, 0, 0, 0.1}) << "\n";
    out << to_csv_row({1, 1.25, 80.5, 2, 1, 3, 0.2}) << "\n";
  }
  const auto rows = read_metrics_csv(path.string());
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].cum_reward == 1.25);
  CHECK(rows[1].fragmented == 3);
  std::filesystem::remove(path);
}

TEST_CASE("per-episode rewards are the first difference of the cumulative column") {
  std::vector<EpisodeMetrics> rows(3);
  rows[0].cum_reward = 0.5;
  rows[1].cum_reward = 0.5;
  rows[2].cum_reward = 2.0;
  const auto r = per_episode_rewards(rows);
  CHECK(r[0] == doctest::Approx(0.5));
  CHECK(r[1] == doctest::Approx(0.0));
  CHECK(r[2] == doctest::Approx(1.5));
}

TEST_CASE("convergence: constant input converges at zero") {
  const std::vector<double> flat(500, 0.7);
  CHECK(convergence_episode(flat) == 0);
}

TEST_CASE("convergence: all-zero rewards converge at zero") {
  const std::vector<double> zero(300, 0.0);
  CHECK(convergence_episode(zero) == 0);
}

TEST_CASE("convergence: step fixture lands exactly on the step") {
  // level change large enough that any window touching the old level
  // falls outside the 5% band
  std::vector<double> rewards(1000, 1.0);
  for (std::size_t i = 0; i < 500; ++i) rewards[i] = -9.0;
  CHECK(convergence_episode(rewards) == 500);
}

TEST_CASE("summarize: throughput and residual percentages") {
  std::vector<EpisodeMetrics> rows(2);
  rows[0] = {0, 0.4, 900.0, 1, 0, 0, 0.0};
  rows[1] = {1, 1.0, 800.0, 1, 1, 0, 0.0};
  const RunSummary s = summarize(rows, 42, 2, 1000.0);
  CHECK(s.delivered == 1);
  CHECK(s.dropped == 1);
  CHECK(s.throughput_pct == doctest::Approx(50.0));
  CHECK(s.final_residual_pct == doctest::Approx(80.0));
  CHECK(s.throughput_pct >= 0.0);
  CHECK(s.throughput_pct <= 100.0);
  CHECK(s.seed == 42);
}

TEST_CASE("summary json round-trips") {
  RunSummary s;
  s.episodes = 10;
  s.seed = 7;
  s.injected = 10;
  s.delivered = 8;
  s.dropped = 2;
  s.final_cum_reward = 6.25;
  s.final_residual_pct = 81.5;
  s.throughput_pct = 80.0;
  s.convergence_episode = 3;
  const auto path = std::filesystem::temp_directory_path() / "iqmr_summary_rt.json";
  {
    std::ofstream out(path);
    out << to_json(s);
  }
  const RunSummary back = read_summary_json(path.string());
  CHECK(back.delivered == 8);
  CHECK(back.final_cum_reward == doctest::Approx(6.25));
  CHECK(back.convergence_episode == 3);
  std::filesystem::remove(path);
}

TEST_CASE("long-format csv emits one row per metric per episode") {
  std::vector<EpisodeMetrics> rows(2);
  rows[0] = {0, 0.4, 900.0, 1, 0, 0, 0.0};
  rows[1] = {1, 1.0, 800.0, 1, 1, 0, 0.0};
  const std::string text = to_long_csv(rows);
  CHECK(text.rfind("episode,metric,value\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 2 * 7);
  CHECK(text.find("1,reward,0.6") != std::string::npos);
}
