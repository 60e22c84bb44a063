#pragma once

#include "mofi/types.hpp"

namespace mofi {

/// Finite-difference velocities and accelerations for every frame and joint.
/// Interior frames use central differences; boundary frames use one-sided
/// differences so every frame carries a value. Angular velocity is the
/// quaternion log of the relative rotation divided by the time step.
inline DerivativeTrack compute_derivatives(const MotionSequence& motion) {
    const int T = motion.frame_count();
    const int J = motion.joint_count();
    if (T < 2) throw InvariantError("compute_derivatives: needs at least 2 frames");
    const double dt = 1.0 / motion.fps;

    DerivativeTrack out;
    out.linear_velocity.assign(T, std::vector<Vec3>(J));
    out.angular_velocity.assign(T, std::vector<Vec3>(J));
    out.linear_acceleration.assign(T, std::vector<Vec3>(J, Vec3::Zero()));

    auto pos = [&](int t, int j) -> const Vec3& { return motion.frames[t].positions[j]; };
    auto rot = [&](int t, int j) -> const Quat& { return motion.frames[t].orientations[j]; };

    for (int j = 0; j < J; ++j) {
        for (int t = 0; t < T; ++t) {
            if (t == 0) {
                out.linear_velocity[t][j] = (pos(1, j) - pos(0, j)) / dt;
                out.angular_velocity[t][j] = quat_angular_velocity(rot(0, j), rot(1, j), dt);
            } else if (t == T - 1) {
                out.linear_velocity[t][j] = (pos(T - 1, j) - pos(T - 2, j)) / dt;
                out.angular_velocity[t][j] = quat_angular_velocity(rot(T - 2, j), rot(T - 1, j), dt);
            } else {
                out.linear_velocity[t][j] = (pos(t + 1, j) - pos(t - 1, j)) / (2.0 * dt);
                out.angular_velocity[t][j] =
                    quat_angular_velocity(rot(t - 1, j), rot(t + 1, j), 2.0 * dt);
            }
        }
        if (T >= 3) {
            for (int t = 0; t < T; ++t) {
                // Second differences; boundary frames reuse the adjacent 3-point stencil.
                const int c = (t == 0) ? 1 : (t == T - 1 ? T - 2 : t);
                out.linear_acceleration[t][j] =
                    (pos(c + 1, j) - 2.0 * pos(c, j) + pos(c - 1, j)) / (dt * dt);
            }
        }
    }
    return out;
}

}  // namespace mofi
