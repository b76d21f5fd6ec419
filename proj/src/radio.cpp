#include "iqmr/radio.hpp"

#include <vector>

namespace iqmr {

double coverage_probability(const TransmitterView& desired,
                            std::span<const TransmitterView> interferers,
                            const ChannelParams& params, SplitMix64 rng) {
  const int n = params.coverage_samples;
  if (n <= 0) return 0.0;

  // Attenuations are fixed by geometry; only gains are redrawn per sample.
  const double desired_loss =
      path_loss(desired.horiz_dist_m, desired.alt_m, params.zeta);
  std::vector<double> interferer_loss;
  interferer_loss.reserve(interferers.size());
  for (const auto& view : interferers)
    interferer_loss.push_back(
        path_loss(view.horiz_dist_m, view.alt_m, params.zeta));

  int hits = 0;
  for (int s = 0; s < n; ++s) {
    const double signal =
        sample_fading_gain(params.nakagami_m, rng) * desired_loss;
    double interference = 0.0;
    for (double loss : interferer_loss)
      interference += sample_fading_gain(params.nakagami_m, rng) * loss;
    if (interferers.empty()) interference = params.noise_floor;
    if (signal / interference >= params.sir_threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace iqmr
