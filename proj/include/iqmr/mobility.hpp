#pragma once

#include <algorithm>
#include <cmath>

#include "iqmr/geometry.hpp"

namespace iqmr {

/// Instantaneous motion state: speed (m/s), horizontal direction (rad),
/// vertical pitch (rad, w.r.t. the ground plane).
struct Kinematics {
  double speed = 0.0;
  double direction = 0.0;
  double pitch = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double clamp(double x) const { return std::clamp(x, lo, hi); }
  double width() const { return hi - lo; }
};

/// Gauss-Markov process parameters. alpha in (0,1) is the memory knob:
/// 1 freezes the current kinematics, 0 reverts to the means every step.
struct MobilityParams {
  double alpha = 0.85;
  double mean_speed = 15.0;
  double mean_direction = 0.0;
  double mean_pitch = 0.0;
  Interval speed_bounds{10.0, 20.0};
  Interval direction_bounds{-M_PI / 2.0, M_PI / 2.0};
  Interval pitch_bounds{0.0, M_PI / 4.0};
  double pause_time_s = 1.0;
};

/// One uniform draw per component, taken from the configured bounds. Drawn by
/// the caller so the update itself stays pure.
struct MobilityNoise {
  double speed = 0.0;
  double direction = 0.0;
  double pitch = 0.0;
};

/// One Gauss-Markov update:
///   v_n = alpha * v_{n-1} + (1 - alpha) * mean + sqrt(1 - alpha^2) * noise
/// applied per component, then clamped into the configured bounds.
inline Kinematics gmm_step(const Kinematics& k, const MobilityParams& p,
                           const MobilityNoise& noise) {
  const double memory = p.alpha;
  const double drift = 1.0 - p.alpha;
  const double jitter = std::sqrt(1.0 - p.alpha * p.alpha);
  Kinematics next;
  next.speed = memory * k.speed + drift * p.mean_speed + jitter * noise.speed;
  next.direction =
      memory * k.direction + drift * p.mean_direction + jitter * noise.direction;
  next.pitch = memory * k.pitch + drift * p.mean_pitch + jitter * noise.pitch;
  next.speed = p.speed_bounds.clamp(next.speed);
  next.direction = p.direction_bounds.clamp(next.direction);
  next.pitch = p.pitch_bounds.clamp(next.pitch);
  return next;
}

/// Velocity vector implied by the kinematics.
inline Vec3 velocity_of(const Kinematics& k) {
  return {k.speed * std::cos(k.direction) * std::cos(k.pitch),
          k.speed * std::sin(k.direction) * std::cos(k.pitch),
          k.speed * std::sin(k.pitch)};
}

/// Dead-reckoning update over dt seconds. Boundary handling is the caller's
/// job (compose with reflect_into_domain).
inline Vec3 advance_position(const Vec3& pos, const Kinematics& k, double dt) {
  return pos + velocity_of(k) * dt;
}

/// Kinematics matching an actual displacement over dt seconds; used to
/// re-derive direction/pitch after a boundary reflection bends the step.
inline Kinematics kinematics_from_displacement(const Vec3& delta, double dt,
                                               double fallback_speed) {
  const double dist = delta.norm();
  if (dt <= 0.0 || dist <= 0.0)
    return {fallback_speed, 0.0, 0.0};
  Kinematics k;
  k.speed = dist / dt;
  k.direction = std::atan2(delta.y(), delta.x());
  k.pitch = std::asin(std::clamp(delta.z() / dist, -1.0, 1.0));
  return k;
}

}  // namespace iqmr
