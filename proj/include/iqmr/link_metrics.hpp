#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "iqmr/geometry.hpp"
#include "iqmr/mobility.hpp"

namespace iqmr {

struct CollisionParams {
  double xi_x_m = 3.0;   // trajectory divergence, x
  double xi_y_m = 3.0;   // trajectory divergence, y
  double r_min_m = 1.0;  // minimum permissible separation
  double p_coll_threshold = 0.9;
};

enum class RelativeMotion { kReceding, kApproaching, kEquidistant };

/// Predicted seconds until a link breaks, or the equidistant marker when the
/// separation is not changing (hello then repeats at the base interval).
struct LstResult {
  bool equidistant = false;
  double seconds = 0.0;

  static LstResult finite(double s) { return {false, std::max(0.0, s)}; }
  static LstResult same_distance() { return {true, 0.0}; }
};

inline double relative_distance(const Vec3& a, const Vec3& b) {
  return (a - b).norm();
}

/// Receding pair: time until separation exceeds 2*R_t (both ends contribute
/// range R_t). Approaching pair: time until separation reaches r_min. Zero
/// closing/opening speed degrades to the equidistant marker.
inline LstResult link_sustenance_time(double dist_m, double speed_i,
                                      double speed_j, RelativeMotion relation,
                                      double range_m, double r_min_m) {
  switch (relation) {
    case RelativeMotion::kReceding: {
      const double closing = speed_i + speed_j;
      if (closing <= 0.0) return LstResult::same_distance();
      return LstResult::finite((2.0 * range_m - dist_m) / closing);
    }
    case RelativeMotion::kApproaching: {
      const double gap_rate = std::abs(speed_i - speed_j);
      if (gap_rate <= 0.0) return LstResult::same_distance();
      return LstResult::finite((dist_m - r_min_m) / gap_rate);
    }
    case RelativeMotion::kEquidistant:
      return LstResult::same_distance();
  }
  return LstResult::same_distance();
}

/// Sign of d/dt ||p_i - p_j|| from current velocities; magnitudes below
/// 1e-6 m/s count as equidistant.
inline RelativeMotion classify_relative_motion(const Vec3& pos_i,
                                               const Kinematics& kin_i,
                                               const Vec3& pos_j,
                                               const Kinematics& kin_j) {
  const Vec3 dp = pos_i - pos_j;
  const double dist = dp.norm();
  if (dist <= 0.0) return RelativeMotion::kEquidistant;
  const double rate = dp.dot(velocity_of(kin_i) - velocity_of(kin_j)) / dist;
  if (std::abs(rate) < 1e-6) return RelativeMotion::kEquidistant;
  return rate > 0.0 ? RelativeMotion::kReceding : RelativeMotion::kApproaching;
}

/// Collision likelihood for two maneuvering UAVs separated by r:
///   1 - exp(-r^2 / (2 xi_x xi_y))
/// Grows with separation; that is the printed model (the swept collision
/// cross-section uses the inter-UAV distance as its radius).
inline double collision_probability(double r_m, const CollisionParams& p) {
  return -std::expm1(-(r_m * r_m) / (2.0 * p.xi_x_m * p.xi_y_m));
}

/// Min-max scaling to [0,1]; input is clamped into [lo, hi] first.
inline double normalize(double x, double lo, double hi) {
  if (!(hi > lo))
    throw std::invalid_argument("normalize: degenerate range (max <= min)");
  return (std::clamp(x, lo, hi) - lo) / (hi - lo);
}

}  // namespace iqmr
