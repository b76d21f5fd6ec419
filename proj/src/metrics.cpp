#include "iqmr/metrics.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace iqmr {

namespace {

std::string fmt(double d) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

std::string to_csv_row(const EpisodeMetrics& m) {
  std::ostringstream out;
  out << m.episode << ',' << fmt(m.cum_reward) << ',' << fmt(m.residual_energy_j)
      << ',' << m.delivered << ',' << m.dropped << ',' << m.fragmented << ','
      << fmt(m.mean_q);
  return out.str();
}

std::vector<EpisodeMetrics> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SimError("cannot open metrics file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader)
    throw SimError("unexpected metrics header in " + path);
  std::vector<EpisodeMetrics> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    EpisodeMetrics m;
    auto next = [&]() -> std::string {
      if (!std::getline(ss, field, ',')) throw SimError("short metrics row in " + path);
      return field;
    };
    m.episode = std::stoll(next());
    m.cum_reward = std::stod(next());
    m.residual_energy_j = std::stod(next());
    m.delivered = std::stoll(next());
    m.dropped = std::stoll(next());
    m.fragmented = std::stoi(next());
    m.mean_q = std::stod(next());
    rows.push_back(m);
  }
  return rows;
}

std::string to_json(const RunSummary& s) {
  nlohmann::json j;
  j["episodes"] = s.episodes;
  j["seed"] = s.seed;
  j["injected"] = s.injected;
  j["delivered"] = s.delivered;
  j["dropped"] = s.dropped;
  j["final_cum_reward"] = s.final_cum_reward;
  j["final_residual_pct"] = s.final_residual_pct;
  j["throughput_pct"] = s.throughput_pct;
  j["convergence_episode"] = s.convergence_episode;
  return j.dump(2) + "\n";
}

RunSummary read_summary_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SimError("cannot open summary file: " + path);
  nlohmann::json j;
  in >> j;
  RunSummary s;
  s.episodes = j.at("episodes").get<std::int64_t>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.injected = j.at("injected").get<std::int64_t>();
  s.delivered = j.at("delivered").get<std::int64_t>();
  s.dropped = j.at("dropped").get<std::int64_t>();
  s.final_cum_reward = j.at("final_cum_reward").get<double>();
  s.final_residual_pct = j.at("final_residual_pct").get<double>();
  s.throughput_pct = j.at("throughput_pct").get<double>();
  s.convergence_episode = j.at("convergence_episode").get<std::int64_t>();
  return s;
}

std::vector<double> per_episode_rewards(std::span<const EpisodeMetrics> rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  double prev = 0.0;
  for (const auto& r : rows) {
    out.push_back(r.cum_reward - prev);
    prev = r.cum_reward;
  }
  return out;
}

std::int64_t convergence_episode(std::span<const double> rewards,
                                 std::size_t window, double tol) {
  const std::size_t n = rewards.size();
  if (n == 0) return 0;
  const std::size_t w = std::min(window, n);

  // forward window means, one per start index
  std::vector<double> means(n - w + 1, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < w; ++i) acc += rewards[i];
  means[0] = acc / static_cast<double>(w);
  for (std::size_t i = 1; i < means.size(); ++i) {
    acc += rewards[i + w - 1] - rewards[i - 1];
    means[i] = acc / static_cast<double>(w);
  }

  const double final_mean = means.back();
  const double band = tol * std::abs(final_mean);
  std::size_t first = means.size() - 1;
  for (std::size_t i = means.size(); i-- > 0;) {
    if (std::abs(means[i] - final_mean) <= band)
      first = i;
    else
      break;
  }
  return static_cast<std::int64_t>(first);
}

RunSummary summarize(std::span<const EpisodeMetrics> rows, std::uint64_t seed,
                     std::int64_t injected, double fleet_capacity_j) {
  RunSummary s;
  s.episodes = static_cast<std::int64_t>(rows.size());
  s.seed = seed;
  s.injected = injected;
  if (!rows.empty()) {
    const auto& last = rows.back();
    s.delivered = last.delivered;
    s.dropped = last.dropped;
    s.final_cum_reward = last.cum_reward;
    if (fleet_capacity_j > 0.0)
      s.final_residual_pct = 100.0 * last.residual_energy_j / fleet_capacity_j;
  }
  if (injected > 0)
    s.throughput_pct =
        100.0 * static_cast<double>(s.delivered) / static_cast<double>(injected);
  const auto rewards = per_episode_rewards(rows);
  s.convergence_episode = convergence_episode(rewards);
  return s;
}

std::string to_long_csv(std::span<const EpisodeMetrics> rows) {
  std::ostringstream out;
  out << "episode,metric,value\n";
  const auto rewards = per_episode_rewards(rows);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << r.episode << ",reward," << fmt(rewards[i]) << "\n";
    out << r.episode << ",cum_reward," << fmt(r.cum_reward) << "\n";
    out << r.episode << ",residual_energy_j," << fmt(r.residual_energy_j) << "\n";
    out << r.episode << ",delivered," << r.delivered << "\n";
    out << r.episode << ",dropped," << r.dropped << "\n";
    out << r.episode << ",fragmented," << r.fragmented << "\n";
    out << r.episode << ",mean_q," << fmt(r.mean_q) << "\n";
  }
  return out.str();
}

}  // namespace iqmr
