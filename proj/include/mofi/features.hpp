#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mofi/kinematics.hpp"
#include "mofi/types.hpp"

namespace mofi {

// Thresholds used by the height/contact feature channels; kept in sync with
// the physics-heuristic defaults.
struct FeatureConfig {
    double contact_height_m = 0.05;
    double float_tolerance_m = 0.05;
    double penetration_tolerance_m = 0.005;
};

constexpr int kFeatureCount = 48;

/// Feature names, index-aligned with extract_features. The "h_" group reacts
/// to vertical placement (heights, ground clearance, contact events); the
/// "d_" group is built purely from derivatives and is invariant to any
/// constant translation of the whole motion.
inline const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = {
        "h_min_joint_z",       "h_mean_joint_z",      "h_max_joint_z",
        "h_min_foot_z",        "h_mean_foot_z",       "h_max_foot_z",
        "h_float_mean",        "h_float_max",         "h_pen_mean",
        "h_pen_max",           "h_below_ground_frac", "h_contact_frac",
        "h_airborne_frac",     "h_minz_std",          "h_swing_foot_mean_z",
        "h_centroid_mean_z",   "h_bbox_height",       "h_contact_drift_mean",
        "h_contact_drift_p95", "h_contact_drift_max", "d_speed_mean",
        "d_speed_p50",         "d_speed_p95",         "d_speed_max",
        "d_accel_mean",        "d_accel_p50",         "d_accel_p95",
        "d_accel_max",         "d_jerk_mean",         "d_jerk_p95",
        "d_angspeed_mean",     "d_angspeed_p50",      "d_angspeed_p95",
        "d_angspeed_max",      "d_com_xy_accel_mean", "d_com_xy_accel_p95",
        "d_com_xy_accel_max",  "d_com_z_accel_mean",  "d_com_z_accel_max",
        "d_root_z_travel",     "d_root_z_range",      "d_root_z_std",
        "d_root_z_speed_mean", "d_pfc_mean",          "d_pfc_max",
        "d_disp_max",          "d_disp_mean",         "d_speed_std",
    };
    return names;
}

namespace detail {

inline double percentile(std::vector<double> v, double p) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double idx = p / 100.0 * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = idx - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

inline double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

inline double std_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace detail

/// Fixed-length per-sequence statistics used as the scorer input. Deterministic
/// and invariant to xy translation of the whole motion by construction.
inline std::vector<double> extract_features(const MotionSequence& motion, const Skeleton& skeleton,
                                            const FeatureConfig& cfg = {}) {
    motion.validate();
    skeleton.validate();
    const int T = motion.frame_count();
    const int J = motion.joint_count();
    const DerivativeTrack deriv = compute_derivatives(motion);
    const double dt = 1.0 / motion.fps;

    std::vector<double> joint_z, foot_z, minz_per_frame;
    std::vector<double> contact_drift, swing_foot_z;
    std::vector<double> speeds, accels, ang_speeds, disps;
    std::vector<double> com_xy_acc, com_z_acc, pfc_prod;
    std::vector<double> root_z_series, root_z_speed;
    double below_ground_frames = 0.0, airborne_frames = 0.0;
    double contact_events = 0.0, foot_frames = 0.0;

    const std::size_t half = std::max<std::size_t>(1, skeleton.foot_indices.size() / 2);
    for (int t = 0; t < T; ++t) {
        double minz = motion.frames[t].positions[0].z();
        Vec3 com_acc = Vec3::Zero();
        for (int j = 0; j < J; ++j) {
            const double z = motion.frames[t].positions[j].z();
            joint_z.push_back(z);
            minz = std::min(minz, z);
            speeds.push_back(deriv.linear_velocity[t][j].norm());
            accels.push_back(deriv.linear_acceleration[t][j].norm());
            ang_speeds.push_back(deriv.angular_velocity[t][j].norm());
            com_acc += deriv.linear_acceleration[t][j];
            if (t > 0) {
                disps.push_back(
                    (motion.frames[t].positions[j] - motion.frames[t - 1].positions[j]).norm());
            }
        }
        com_acc /= J;
        com_xy_acc.push_back(com_acc.head<2>().norm());
        com_z_acc.push_back(std::abs(com_acc.z()));
        minz_per_frame.push_back(minz);
        if (minz < 0.0) below_ground_frames += 1.0;
        if (minz > cfg.float_tolerance_m) airborne_frames += 1.0;

        Vec3 v_left = Vec3::Zero(), v_right = Vec3::Zero();
        for (std::size_t k = 0; k < skeleton.foot_indices.size(); ++k) {
            const int f = skeleton.foot_indices[k];
            const double z = motion.frames[t].positions[f].z();
            foot_z.push_back(z);
            foot_frames += 1.0;
            if (z < cfg.contact_height_m) {
                contact_events += 1.0;
                contact_drift.push_back(deriv.linear_velocity[t][f].head<2>().norm());
            } else {
                swing_foot_z.push_back(z);
            }
            if (k < half) {
                v_left += deriv.linear_velocity[t][f];
            } else {
                v_right += deriv.linear_velocity[t][f];
            }
        }
        v_left /= static_cast<double>(half);
        const std::size_t right_count = std::max<std::size_t>(1, skeleton.foot_indices.size() - half);
        v_right /= static_cast<double>(right_count);
        pfc_prod.push_back(com_xy_acc.back() * v_left.norm() * v_right.norm());

        const double rz = motion.frames[t].positions[skeleton.root_index].z();
        root_z_series.push_back(rz);
        root_z_speed.push_back(std::abs(deriv.linear_velocity[t][skeleton.root_index].z()));
    }

    std::vector<double> jerks;
    for (int t = 1; t < T; ++t) {
        for (int j = 0; j < J; ++j) {
            jerks.push_back(
                (deriv.linear_acceleration[t][j] - deriv.linear_acceleration[t - 1][j]).norm() /
                dt);
        }
    }

    std::vector<double> float_excess, pen_depth;
    for (double mz : minz_per_frame) {
        float_excess.push_back(std::max(0.0, mz - cfg.float_tolerance_m));
        pen_depth.push_back(std::max(0.0, -mz - cfg.penetration_tolerance_m));
    }

    double root_travel = 0.0;
    for (std::size_t t = 1; t < root_z_series.size(); ++t) {
        root_travel += std::abs(root_z_series[t] - root_z_series[t - 1]);
    }
    const double root_range = *std::max_element(root_z_series.begin(), root_z_series.end()) -
                              *std::min_element(root_z_series.begin(), root_z_series.end());
    const double bbox_height = *std::max_element(joint_z.begin(), joint_z.end()) -
                               *std::min_element(joint_z.begin(), joint_z.end());

    using detail::max_of;
    using detail::mean_of;
    using detail::percentile;
    using detail::std_of;
    std::vector<double> f = {
        *std::min_element(joint_z.begin(), joint_z.end()),
        mean_of(joint_z),
        *std::max_element(joint_z.begin(), joint_z.end()),
        *std::min_element(foot_z.begin(), foot_z.end()),
        mean_of(foot_z),
        *std::max_element(foot_z.begin(), foot_z.end()),
        mean_of(float_excess),
        max_of(float_excess),
        mean_of(pen_depth),
        max_of(pen_depth),
        below_ground_frames / T,
        foot_frames == 0.0 ? 0.0 : contact_events / foot_frames,
        airborne_frames / T,
        std_of(minz_per_frame),
        mean_of(swing_foot_z),
        mean_of(joint_z),  // centroid mean z equals the grand mean over joints
        bbox_height,
        mean_of(contact_drift),
        percentile(contact_drift, 95.0),
        max_of(contact_drift),
        mean_of(speeds),
        percentile(speeds, 50.0),
        percentile(speeds, 95.0),
        max_of(speeds),
        mean_of(accels),
        percentile(accels, 50.0),
        percentile(accels, 95.0),
        max_of(accels),
        mean_of(jerks),
        percentile(jerks, 95.0),
        mean_of(ang_speeds),
        percentile(ang_speeds, 50.0),
        percentile(ang_speeds, 95.0),
        max_of(ang_speeds),
        mean_of(com_xy_acc),
        percentile(com_xy_acc, 95.0),
        max_of(com_xy_acc),
        mean_of(com_z_acc),
        max_of(com_z_acc),
        root_travel,
        root_range,
        std_of(root_z_series),
        mean_of(root_z_speed),
        mean_of(pfc_prod),
        max_of(pfc_prod),
        max_of(disps),
        mean_of(disps),
        std_of(speeds),
    };
    if (static_cast<int>(f.size()) != kFeatureCount) {
        throw InvariantError("extract_features: feature count drifted from kFeatureCount");
    }
    for (double v : f) {
        if (!std::isfinite(v)) throw InvariantError("extract_features: non-finite feature");
    }
    return f;
}

}  // namespace mofi
