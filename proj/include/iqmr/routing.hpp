#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "iqmr/rng.hpp"

namespace iqmr {

/// Per-UAV action values: one entry per next-hop node id (relays and the
/// base station). Absent entries read as 0.
class QTable {
 public:
  double value(int action) const {
    auto it = q_.find(action);
    return it == q_.end() ? 0.0 : it->second;
  }
  void set(int action, double v) { q_[action] = v; }

  /// Max entry; 0 for an empty table (the value a fresh UAV advertises).
  double best() const {
    double m = 0.0;
    bool any = false;
    for (const auto& [a, v] : q_) {
      if (!any || v > m) m = v;
      any = true;
    }
    return any ? m : 0.0;
  }

  std::size_t size() const { return q_.size(); }
  const std::map<int, double>& entries() const { return q_; }

 private:
  std::map<int, double> q_;
};

/// Eligibility traces over (node, action) pairs for one packet journey.
/// Greedy steps decay every trace by beta*lambda and add 1 to the visited
/// pair; a non-greedy step cuts all traces before marking the visited pair.
class EligibilityTraces {
 public:
  explicit EligibilityTraces(double lambda = 0.9) : lambda_(lambda) {}

  double lambda() const { return lambda_; }

  void visit(std::pair<int, int> pair, bool action_was_greedy, double beta) {
    if (action_was_greedy) {
      const double factor = beta * lambda_;
      for (auto& [key, e] : traces_) e *= factor;
      traces_[pair] += 1.0;
    } else {
      traces_.clear();
      traces_[pair] = 1.0;
    }
  }

  double value(std::pair<int, int> pair) const {
    auto it = traces_.find(pair);
    return it == traces_.end() ? 0.0 : it->second;
  }

  void clear() { traces_.clear(); }
  std::size_t size() const { return traces_.size(); }
  const std::map<std::pair<int, int>, double>& entries() const {
    return traces_;
  }

 private:
  double lambda_;
  std::map<std::pair<int, int>, double> traces_;
};

/// Reward weights, largest first, summing to 1 so rewards stay in [0,1].
struct RewardWeights {
  double w1 = 16.0 / 31.0;  // collision avoidance
  double w2 = 8.0 / 31.0;   // end-to-end delivery ratio
  double w3 = 4.0 / 31.0;   // per-hop delivery ratio
  double w4 = 2.0 / 31.0;   // coverage
  double w5 = 1.0 / 31.0;   // residual energy

  void validate() const {
    const double sum = w1 + w2 + w3 + w4 + w5;
    if (!(w1 > w2 && w2 > w3 && w3 > w4 && w4 > w5 && w5 > 0.0))
      throw std::invalid_argument(
          "rl.weights: must be strictly decreasing and positive");
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("rl.weights: must sum to 1");
  }
};

/// Normalized per-UAV observables at one tick; every field is in [0,1].
struct StateSnapshot {
  double e_res = 0.0;
  double prs_l2 = 0.0;
  double prs_l3 = 0.0;
  double p_cov = 0.0;
  double p_coll = 0.0;
};

/// Joint reward: collision avoidance dominates, then the delivery ratios,
/// coverage, residual energy. A fragmented UAV (no candidates) earns 0.
inline double compute_reward(const StateSnapshot& s, int n_candidates,
                             const RewardWeights& w) {
  if (n_candidates <= 0) return 0.0;
  return w.w1 * (1.0 - s.p_coll) + w.w2 * s.prs_l3 + w.w3 * s.prs_l2 +
         w.w4 * s.p_cov + w.w5 * s.e_res;
}

/// Learning-rate schedules. kSaturating is the printed form
/// (beta_max-beta_min)/(1-exp(-p_cov)) + beta_min, which exceeds beta_max for
/// every p_cov in (0,1] and therefore clamps to the constant beta_max; it is
/// kept selectable for reference. kExpDecay is the default, a monotone
/// decreasing schedule with the same endpoints' intent: fast learning where
/// coverage is poor, slow where links are reliable.
enum class BetaMode { kExpDecay, kSaturating, kFixed };

inline double adaptive_learning_rate(double p_cov, BetaMode mode,
                                     double beta_min = 0.01,
                                     double beta_max = 1.0,
                                     double beta_fixed = 0.5) {
  switch (mode) {
    case BetaMode::kFixed:
      return beta_fixed;
    case BetaMode::kSaturating: {
      const double denom = 1.0 - std::exp(-p_cov);
      if (denom <= 0.0) return beta_max;  // p_cov = 0 singularity
      return std::clamp((beta_max - beta_min) / denom + beta_min, beta_min,
                        beta_max);
    }
    case BetaMode::kExpDecay:
    default:
      return (beta_max - beta_min) * std::exp(-p_cov) + beta_min;
  }
}

enum class GammaMode { kAdaptive, kFixed };

/// Discount factor linear in the candidate count: well-connected UAVs weigh
/// future rewards, sparsely connected ones act myopically.
inline double adaptive_discount_factor(int n_candidates, int total_uavs,
                                       double gamma_min = 0.1,
                                       double gamma_max = 0.9) {
  if (total_uavs <= 0)
    throw std::invalid_argument("adaptive_discount_factor: total_uavs <= 0");
  const double n =
      std::clamp(static_cast<double>(n_candidates), 0.0,
                 static_cast<double>(total_uavs));
  return n * (gamma_max - gamma_min) / static_cast<double>(total_uavs) +
         gamma_min;
}

/// One temporal-difference update scaled by the eligibility trace:
///   q_new = q_old + beta * (reward + gamma * max_q_next - q_old) * trace
/// Applied to every traced pair along the packet's path.
inline double q_update(double q_old, double reward, double max_q_next,
                       double beta, double gamma, double trace) {
  return q_old + beta * (reward + gamma * max_q_next - q_old) * trace;
}

/// One candidate next hop as the selector sees it.
struct Candidate {
  int id = -1;
  double q = 0.0;
  double residual_j = 0.0;      // advertised by the candidate
  double coverage = 0.0;        // link coverage probability from the holder
  double p_coll = 0.0;          // pairwise collision probability
  double dist_m = 0.0;          // separation from the holder
  double axis_divergence = 0.0; // angle off the source-destination axis
  bool on_path = false;         // already visited by this packet
  bool infrastructure = false;  // base station: exempt from UAV constraints
};

struct Constraints {
  double e_th_j = 100.0;
  double p_cov_th = 0.1;
  double p_coll_th = 0.9;
  double r_min_m = 1.0;
};

struct Selection {
  int id = -1;
  bool greedy = false;  // chosen action equals the argmax action
  int feasible_count = 0;
};

inline bool feasible(const Candidate& c, const Constraints& k) {
  if (c.on_path) return false;
  if (c.coverage < k.p_cov_th) return false;
  if (c.infrastructure) return true;
  if (c.residual_j < k.e_th_j) return false;
  if (c.p_coll > k.p_coll_th || c.dist_m < k.r_min_m) return false;
  return true;
}

/// Epsilon-greedy next-hop choice over the feasible subset. Exploitation
/// takes the highest Q; exact ties go to the candidate least divergent from
/// the source-destination axis (then lowest id, for determinism). An empty
/// feasible set means the holder is fragmented: nullopt.
std::optional<Selection> select_next_hop(std::span<const Candidate> candidates,
                                         double epsilon, SplitMix64& rng,
                                         const Constraints& constraints);

}  // namespace iqmr
