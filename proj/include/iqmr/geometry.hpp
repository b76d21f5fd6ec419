#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace iqmr {

/// All positions and velocities are Eigen column vectors; z() is altitude.
using Vec3 = Eigen::Vector3d;

/// Cylindrical flight volume: radius about the origin, altitude band.
struct CylinderDomain {
  double radius_m = 1000.0;
  double h_min_m = 100.0;
  double h_max_m = 300.0;

  bool contains(const Vec3& p, double tol = 1e-9) const {
    const double rho = std::hypot(p.x(), p.y());
    return rho <= radius_m + tol && p.z() >= h_min_m - tol &&
           p.z() <= h_max_m + tol;
  }
};

namespace detail {
// Fold x into [lo, hi] by mirror reflection at the violated bound. Repeated
// folds handle overshoots beyond one span width.
inline double mirror_fold(double x, double lo, double hi) {
  const double span = hi - lo;
  if (span <= 0.0) return lo;
  for (int i = 0; i < 64 && (x < lo || x > hi); ++i) {
    if (x > hi) x = 2.0 * hi - x;
    if (x < lo) x = 2.0 * lo - x;
  }
  return std::clamp(x, lo, hi);
}
}  // namespace detail

/// Mirror an out-of-bounds position back across the violated boundary.
/// Radial overshoot reflects along the same ray (distance P + d maps to
/// P - d); altitude reflects at the band edges. In-bounds input is returned
/// unchanged.
inline Vec3 reflect_into_domain(const Vec3& p, const CylinderDomain& dom) {
  Vec3 out = p;
  out.z() = detail::mirror_fold(p.z(), dom.h_min_m, dom.h_max_m);
  const double rho = std::hypot(out.x(), out.y());
  if (rho > dom.radius_m && rho > 0.0) {
    const double folded = detail::mirror_fold(rho, 0.0, dom.radius_m);
    const double scale = folded / rho;
    out.x() *= scale;
    out.y() *= scale;
  }
  return out;
}

}  // namespace iqmr
