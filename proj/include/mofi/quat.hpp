#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>

#include "mofi/errors.hpp"

namespace mofi {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;  // (w, x, y, z) constructor order

inline bool quat_is_unit(const Quat& q, double tol = 1e-9) {
    return std::abs(q.norm() - 1.0) <= tol;
}

inline Quat quat_from_axis_angle(const Vec3& axis, double angle) {
    return Quat(Eigen::AngleAxisd(angle, axis.normalized()));
}

/// Geodesic angle between two rotations, in [0, pi]. Symmetric and invariant
/// under sign flip of either quaternion (q and -q are the same rotation).
inline double quat_geodesic_distance(const Quat& a, const Quat& b) {
    if (!quat_is_unit(a) || !quat_is_unit(b)) {
        throw InvariantError("quat_geodesic_distance: non-unit quaternion input");
    }
    const Quat r = a.conjugate() * b;
    // atan2 form is accurate near 0 and pi; |w| folds q ~ -q.
    return 2.0 * std::atan2(r.vec().norm(), std::abs(r.w()));
}

/// Rotation vector (axis * angle) of a unit quaternion, shortest arc.
inline Vec3 quat_rotation_vector(const Quat& q) {
    Quat p = q;
    if (p.w() < 0.0) p.coeffs() = -p.coeffs();
    const double n = p.vec().norm();
    if (n < 1e-12) {
        // First-order expansion: log(q) ~ vec(q) for q near identity.
        return 2.0 * p.vec();
    }
    const double angle = 2.0 * std::atan2(n, p.w());
    return p.vec() * (angle / n);
}

/// Angular velocity taking rotation `a` to rotation `b` over dt seconds,
/// expressed in the world frame (log of the relative rotation divided by dt).
inline Vec3 quat_angular_velocity(const Quat& a, const Quat& b, double dt) {
    const Quat rel = b * a.conjugate();
    return quat_rotation_vector(rel) / dt;
}

}  // namespace mofi
