#pragma once

#include <algorithm>
#include <cmath>

#include "mofi/kinematics.hpp"
#include "mofi/types.hpp"

namespace mofi {

// Thresholds for the rule-based plausibility heuristics. The ground is the
// infinite plane z = 0.
struct PhysicsHeuristicConfig {
    double contact_height_m = 0.05;       // below this a foot counts as in contact
    double float_tolerance_m = 0.05;      // allowed ground clearance
    double penetration_tolerance_m = 0.005;  // allowed interpenetration

    void validate() const {
        if (!(contact_height_m > 0.0) || !(float_tolerance_m > 0.0) ||
            !(penetration_tolerance_m > 0.0)) {
            throw ConfigError("physics heuristic thresholds must be > 0");
        }
    }
};

// Lower is better for every field.
struct PhysicsHeuristicReport {
    double penetration_m = 0.0;
    double skate_m_per_s = 0.0;
    double float_m = 0.0;
    double pfc = 0.0;
};

namespace detail {

inline double frame_min_z(const MotionSequence& m, int t) {
    double mz = m.frames[t].positions[0].z();
    for (const Vec3& p : m.frames[t].positions) mz = std::min(mz, p.z());
    return mz;
}

}  // namespace detail

/// Mean over frames of max(0, -(min joint z) - penetration_tolerance): average
/// depth by which the lowest joint dips below the allowed interpenetration.
inline double penetration(const MotionSequence& motion, const PhysicsHeuristicConfig& cfg) {
    cfg.validate();
    const int T = motion.frame_count();
    double sum = 0.0;
    for (int t = 0; t < T; ++t) {
        sum += std::max(0.0, -detail::frame_min_z(motion, t) - cfg.penetration_tolerance_m);
    }
    return sum / T;
}

/// Mean over frames of max(0, (min joint z) - float_tolerance): average excess
/// clearance when the whole body hovers above the ground.
inline double floating(const MotionSequence& motion, const PhysicsHeuristicConfig& cfg) {
    cfg.validate();
    const int T = motion.frame_count();
    double sum = 0.0;
    for (int t = 0; t < T; ++t) {
        sum += std::max(0.0, detail::frame_min_z(motion, t) - cfg.float_tolerance_m);
    }
    return sum / T;
}

/// Mean horizontal speed of foot joints over (foot, frame) events where that
/// foot is below contact_height. 0 when there are no contact events.
inline double skating(const MotionSequence& motion, const Skeleton& skeleton,
                      const PhysicsHeuristicConfig& cfg) {
    cfg.validate();
    skeleton.validate();
    const DerivativeTrack deriv = compute_derivatives(motion);
    const int T = motion.frame_count();
    double sum = 0.0;
    int events = 0;
    for (int t = 0; t < T; ++t) {
        for (int f : skeleton.foot_indices) {
            if (motion.frames[t].positions[f].z() < cfg.contact_height_m) {
                sum += deriv.linear_velocity[t][f].head<2>().norm();
                ++events;
            }
        }
    }
    return events == 0 ? 0.0 : sum / events;
}

/// Physical-foot-contact heuristic: per-frame product of horizontal COM
/// acceleration magnitude and both feet's speed magnitudes, time-averaged and
/// normalized by the per-frame max so the value lands in [0, 1]. COM is the
/// unweighted joint centroid; feet are split left/right by the first/second
/// half of foot_indices.
inline double pfc(const MotionSequence& motion, const Skeleton& skeleton) {
    skeleton.validate();
    if (skeleton.foot_indices.size() < 2) {
        throw FootConfigError("pfc: needs at least 2 foot joints");
    }
    const DerivativeTrack deriv = compute_derivatives(motion);
    const int T = motion.frame_count();
    const int J = motion.joint_count();
    const std::size_t half = skeleton.foot_indices.size() / 2;

    double sum = 0.0, peak = 0.0;
    std::vector<double> prods(T, 0.0);
    for (int t = 0; t < T; ++t) {
        Vec3 com_acc = Vec3::Zero();
        for (int j = 0; j < J; ++j) com_acc += deriv.linear_acceleration[t][j];
        com_acc /= J;

        Vec3 v_left = Vec3::Zero(), v_right = Vec3::Zero();
        for (std::size_t k = 0; k < skeleton.foot_indices.size(); ++k) {
            if (k < half) {
                v_left += deriv.linear_velocity[t][skeleton.foot_indices[k]];
            } else {
                v_right += deriv.linear_velocity[t][skeleton.foot_indices[k]];
            }
        }
        v_left /= static_cast<double>(half);
        v_right /= static_cast<double>(skeleton.foot_indices.size() - half);

        prods[t] = com_acc.head<2>().norm() * v_left.norm() * v_right.norm();
        sum += prods[t];
        peak = std::max(peak, prods[t]);
    }
    return peak == 0.0 ? 0.0 : (sum / T) / peak;
}

inline PhysicsHeuristicReport compute_physics_report(const MotionSequence& motion,
                                                     const Skeleton& skeleton,
                                                     const PhysicsHeuristicConfig& cfg) {
    PhysicsHeuristicReport r;
    r.penetration_m = penetration(motion, cfg);
    r.float_m = floating(motion, cfg);
    r.skate_m_per_s = skating(motion, skeleton, cfg);
    r.pfc = pfc(motion, skeleton);
    return r;
}

}  // namespace mofi
