#include "iqmr/routing.hpp"

namespace iqmr {

namespace {

std::size_t greedy_index(std::span<const Candidate* const> feasible) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < feasible.size(); ++i) {
    const Candidate& a = *feasible[i];
    const Candidate& b = *feasible[best];
    if (a.q > b.q) {
      best = i;
    } else if (a.q == b.q) {
      if (a.axis_divergence < b.axis_divergence ||
          (a.axis_divergence == b.axis_divergence && a.id < b.id))
        best = i;
    }
  }
  return best;
}

}  // namespace

std::optional<Selection> select_next_hop(std::span<const Candidate> candidates,
                                         double epsilon, SplitMix64& rng,
                                         const Constraints& constraints) {
  std::vector<const Candidate*> open;
  open.reserve(candidates.size());
  for (const Candidate& c : candidates)
    if (feasible(c, constraints)) open.push_back(&c);
  if (open.empty()) return std::nullopt;

  const std::size_t greedy = greedy_index(open);
  std::size_t pick = greedy;
  if (epsilon > 0.0 && rng.uniform() < epsilon)
    pick = static_cast<std::size_t>(rng.below(open.size()));

  Selection sel;
  sel.id = open[pick]->id;
  sel.greedy = (pick == greedy);
  sel.feasible_count = static_cast<int>(open.size());
  return sel;
}

}  // namespace iqmr
