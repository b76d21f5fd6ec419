#pragma once

#include <algorithm>

namespace iqmr {

struct EnergyParams {
  double eps_elec_j_per_bit = 50e-9;
  double eps_amp_fs_j_per_bit_m2 = 41e-6;    // free-space branch, r <= r0
  double eps_amp_mp_j_per_bit_m4 = 100e-12;  // multi-path branch, r > r0
  double crossover_m = 100.0;                // r0
  double payload_w_per_kg = 217.0;           // flight power density
  double mass_kg = 2.0;
  double initial_j = 207792.0;
  double threshold_j = 100.0;
  double charge_rate_j_per_s = 2000.0;
};

struct Battery {
  double capacity_j = 207792.0;
  double residual_j = 207792.0;

  double normalized() const {
    return capacity_j > 0.0 ? residual_j / capacity_j : 0.0;
  }
  bool below(double threshold_j) const { return residual_j < threshold_j; }
  bool full() const { return residual_j >= capacity_j; }
};

/// Radio energy to push k bits over r meters. Free-space r^2 amplifier term
/// up to the crossover distance, multi-path r^4 beyond it. The two branches
/// do not meet at r0 with the stock constants; branch selection is the
/// contract, not continuity.
inline double transmission_energy(double bits, double dist_m,
                                  const EnergyParams& p) {
  const double electronics = p.eps_elec_j_per_bit * bits;
  if (dist_m <= p.crossover_m)
    return electronics + p.eps_amp_fs_j_per_bit_m2 * bits * dist_m * dist_m;
  const double d2 = dist_m * dist_m;
  return electronics + p.eps_amp_mp_j_per_bit_m4 * bits * d2 * d2;
}

/// Airframe drain over dt seconds: power density times mass.
inline double flight_drain(double dt_s, const EnergyParams& p) {
  return p.payload_w_per_kg * p.mass_kg * dt_s;
}

/// Saturating withdrawal; residual never goes negative.
inline Battery debit(Battery b, double amount_j) {
  b.residual_j = std::max(0.0, b.residual_j - amount_j);
  return b;
}

/// One charging tick; residual is capped at capacity.
inline Battery charge_step(Battery b, double dt_s, const EnergyParams& p) {
  b.residual_j = std::min(b.capacity_j, b.residual_j + p.charge_rate_j_per_s * dt_s);
  return b;
}

}  // namespace iqmr
