#pragma once

#include <cmath>
#include <random>
#include <span>
#include <stdexcept>

#include "iqmr/rng.hpp"

namespace iqmr {

/// Nakagami shape from the Rician K-factor: m = 2(K+1)/(2K+1), in (1,2] for
/// finite K >= 0. Tests may set m directly (e.g. m=1, the Rayleigh limit).
inline double nakagami_m_from_k(double k_factor) {
  return 2.0 * (k_factor + 1.0) / (2.0 * k_factor + 1.0);
}

struct ChannelParams {
  double zeta = 2.7;             // path loss exponent
  double rician_k = 1.0;
  double nakagami_m = nakagami_m_from_k(1.0);
  double sir_threshold = 1.0;    // linear; configured in dB
  int coverage_samples = 200;
  double noise_floor = 3.35e-9;  // substitute denominator when no interferer
  double p_cov_threshold = 0.1;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// One transmitter as seen from a fixed receiver: horizontal separation and
/// the transmitter's altitude (both enter the power-law slant attenuation).
struct TransmitterView {
  double horiz_dist_m = 0.0;
  double alt_m = 0.0;
};

/// Power-law attenuation (r^2 + h^2)^(-zeta/2). Strictly decreasing in both
/// r and h. Co-located degenerate geometry (r = h = 0) is a caller bug.
inline double path_loss(double r_m, double h_m, double zeta) {
  const double d2 = r_m * r_m + h_m * h_m;
  if (d2 <= 0.0)
    throw std::invalid_argument("path_loss: degenerate link geometry (r=h=0)");
  return std::pow(d2, -zeta / 2.0);
}

/// One small-scale fading power gain: Gamma(shape=m, scale=1/m), mean 1.
template <typename Urbg>
double sample_fading_gain(double m, Urbg& rng) {
  std::gamma_distribution<double> gamma(m, 1.0 / m);
  return gamma(rng);
}

/// SIR of the desired link against the aggregate interference
///   sum_u g_u * l(r_u, h_u)
/// over the supplied interferers. gains[k] pairs with interferers[k]. An
/// empty interferer set falls back to the noise floor, making the result
/// SNR-like rather than a division by zero.
inline double compute_sir(double desired_gain, const TransmitterView& desired,
                          std::span<const double> gains,
                          std::span<const TransmitterView> interferers,
                          double zeta, double noise_floor) {
  const double signal =
      desired_gain * path_loss(desired.horiz_dist_m, desired.alt_m, zeta);
  double interference = 0.0;
  for (std::size_t k = 0; k < interferers.size(); ++k)
    interference +=
        gains[k] * path_loss(interferers[k].horiz_dist_m, interferers[k].alt_m, zeta);
  if (interferers.empty()) interference = noise_floor;
  return signal / interference;
}

/// Monte Carlo estimate of P[SIR >= sir_threshold] over coverage_samples
/// independent fading redraws of every link. The generator is taken by value:
/// a fixed substream yields identical draws for any threshold, so threshold
/// sweeps share common random numbers.
double coverage_probability(const TransmitterView& desired,
                            std::span<const TransmitterView> interferers,
                            const ChannelParams& params, SplitMix64 rng);

}  // namespace iqmr
