#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mofi/kinematics.hpp"
#include "mofi/types.hpp"

namespace mofi {

// Controls the projection of a motion onto the physically feasible set.
struct ProjectionConfig {
    int max_iterations = 200;
    double step_size = 0.05;
    double constraint_tolerance_m = 1e-4;
    double max_joint_speed_mps = 12.0;
    double smoothness_weight = 0.1;
    double contact_height_m = 0.05;  // shared with the physics heuristics
    int constraint_passes = 25;      // inner sweeps of the constraint operators

    void validate() const {
        if (max_iterations <= 0 || !(step_size > 0.0) || !(constraint_tolerance_m > 0.0) ||
            !(max_joint_speed_mps > 0.0) || smoothness_weight < 0.0 ||
            !(contact_height_m > 0.0) || constraint_passes <= 0) {
            throw ConfigError("ProjectionConfig: all parameters must be positive");
        }
    }
};

// Imitation-reward channel weights; must sum to 1.
struct RewardWeights {
    double w_jp = 0.25;
    double w_jr = 0.25;
    double w_jv = 0.25;
    double w_jw = 0.25;

    void validate() const {
        if (w_jp < 0.0 || w_jr < 0.0 || w_jv < 0.0 || w_jw < 0.0) {
            throw ConfigError("RewardWeights: weights must be non-negative");
        }
        if (std::abs(w_jp + w_jr + w_jv + w_jw - 1.0) > 1e-9) {
            throw ConfigError("RewardWeights: weights must sum to 1");
        }
    }
};

struct PhysicalAnnotation {
    std::string motion_id;
    double e_p_raw = 0.0;      // projection distance, meters
    double physical_score = 0.0;  // z-normalized, higher = more plausible
    bool converged = true;
};

struct ProjectionResult {
    MotionSequence motion;
    bool converged = true;
    int iterations = 0;
};

// Worst-case violation magnitudes of the four hard constraints.
struct FeasibilityReport {
    double min_z = 0.0;                 // most negative joint height
    double max_contact_drift = 0.0;     // largest per-frame horizontal foot drift in contact
    double max_speed = 0.0;             // largest per-joint speed
    double worst_window_clearance = 0.0;  // largest per-window minimum joint height
};

namespace detail {

inline std::vector<std::pair<int, int>> contact_windows(int frame_count, double fps) {
    const int w = std::max(1, static_cast<int>(std::lround(fps)));
    std::vector<std::pair<int, int>> windows;
    int start = 0;
    while (start < frame_count) {
        int end = start + w;
        // Merge a short tail into the final full window.
        if (frame_count - end < w) end = frame_count;
        windows.emplace_back(start, end);
        start = end;
    }
    return windows;
}

}  // namespace detail

inline FeasibilityReport measure_feasibility(const MotionSequence& motion,
                                             const Skeleton& skeleton,
                                             const ProjectionConfig& cfg) {
    const int T = motion.frame_count();
    const int J = motion.joint_count();
    const double dt = 1.0 / motion.fps;
    FeasibilityReport r;
    r.min_z = std::numeric_limits<double>::infinity();
    for (int t = 0; t < T; ++t) {
        for (int j = 0; j < J; ++j) {
            r.min_z = std::min(r.min_z, motion.frames[t].positions[j].z());
            if (t > 0) {
                const double speed =
                    (motion.frames[t].positions[j] - motion.frames[t - 1].positions[j]).norm() / dt;
                r.max_speed = std::max(r.max_speed, speed);
            }
        }
        for (int f : skeleton.foot_indices) {
            if (t > 0 && motion.frames[t].positions[f].z() < cfg.contact_height_m &&
                motion.frames[t - 1].positions[f].z() < cfg.contact_height_m) {
                const double drift = (motion.frames[t].positions[f].head<2>() -
                                      motion.frames[t - 1].positions[f].head<2>())
                                         .norm();
                r.max_contact_drift = std::max(r.max_contact_drift, drift);
            }
        }
    }
    for (const auto& [start, end] : detail::contact_windows(T, motion.fps)) {
        double window_min = std::numeric_limits<double>::infinity();
        for (int t = start; t < end; ++t) {
            for (int j = 0; j < J; ++j) {
                window_min = std::min(window_min, motion.frames[t].positions[j].z());
            }
        }
        r.worst_window_clearance = std::max(r.worst_window_clearance, window_min);
    }
    return r;
}

inline bool is_physically_feasible(const FeasibilityReport& r, const ProjectionConfig& cfg,
                                   double fps) {
    (void)fps;
    const double slack = 1e-12;
    return r.min_z >= -cfg.constraint_tolerance_m &&
           r.max_contact_drift <= cfg.constraint_tolerance_m * (1.0 + 1e-9) + slack &&
           r.max_speed <= cfg.max_joint_speed_mps * (1.0 + 1e-9) &&
           r.worst_window_clearance <= cfg.contact_height_m + cfg.constraint_tolerance_m;
}

/// Projects a motion onto the physically feasible set: gradient descent on
/// ||x' - x||^2 plus a smoothness penalty on the curvature of the correction,
/// with hard constraint operators applied every iteration:
///   (a) no joint below the ground plane,
///   (b) the body touches down at least once per 1 s contact window
///       (whole-body vertical shift when a window hovers),
///   (c) feet below contact height may not drift horizontally by more than
///       constraint_tolerance per frame,
///   (d) per-joint speed capped at max_joint_speed.
/// Deterministic: identical inputs and config produce bit-identical outputs.
/// Rotations pass through unchanged; only positions are corrected.
inline ProjectionResult project_to_physical(const MotionSequence& input,
                                            const Skeleton& skeleton,
                                            const ProjectionConfig& cfg) {
    cfg.validate();
    input.validate();
    skeleton.validate();
    const int T = input.frame_count();
    const int J = input.joint_count();
    const double dt = 1.0 / input.fps;
    const double max_disp = cfg.max_joint_speed_mps * dt;
    const auto windows = detail::contact_windows(T, input.fps);
    // Normalizing the curvature energy by the number of terms keeps the
    // smoothness gradient small relative to the anchoring term, so the
    // projection stays close to a true nearest-point projection.
    const int curvature_terms = std::max(1, (T - 2) * J);
    const double k_smooth = 2.0 * cfg.smoothness_weight / curvature_terms;

    MotionSequence out = input;
    std::vector<std::vector<Vec3>> grad(T, std::vector<Vec3>(J));
    std::vector<std::vector<Vec3>> curvature(T, std::vector<Vec3>(J, Vec3::Zero()));

    bool converged = false;
    int iterations = 0;
    MotionSequence prev = out;
    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        iterations = iter + 1;
        prev = out;

        // Gradient of the objective in the correction d = out - input.
        for (int t = 0; t < T; ++t) {
            for (int j = 0; j < J; ++j) {
                grad[t][j] = 2.0 * (out.frames[t].positions[j] - input.frames[t].positions[j]);
            }
        }
        if (cfg.smoothness_weight > 0.0 && T >= 3) {
            for (int t = 1; t + 1 < T; ++t) {
                for (int j = 0; j < J; ++j) {
                    const Vec3 d_prev =
                        out.frames[t - 1].positions[j] - input.frames[t - 1].positions[j];
                    const Vec3 d_cur = out.frames[t].positions[j] - input.frames[t].positions[j];
                    const Vec3 d_next =
                        out.frames[t + 1].positions[j] - input.frames[t + 1].positions[j];
                    curvature[t][j] = d_next - 2.0 * d_cur + d_prev;
                }
            }
            for (int t = 1; t + 1 < T; ++t) {
                for (int j = 0; j < J; ++j) {
                    const Vec3& c = curvature[t][j];
                    grad[t - 1][j] += k_smooth * c;
                    grad[t][j] -= 2.0 * k_smooth * c;
                    grad[t + 1][j] += k_smooth * c;
                }
            }
        }
        for (int t = 0; t < T; ++t) {
            for (int j = 0; j < J; ++j) {
                out.frames[t].positions[j] -= cfg.step_size * grad[t][j];
            }
        }

        // Hard constraint operators. One operator can re-violate another (the
        // skate clamp moves a contact anchor away from the following swing
        // frame, the touchdown shift changes which frames count as contact),
        // so the block repeats until the state is feasible or the pass budget
        // runs out.
        for (int pass = 0; pass < cfg.constraint_passes; ++pass) {
            // (d) per-joint speed cap, forward pass.
            for (int j = 0; j < J; ++j) {
                for (int t = 1; t < T; ++t) {
                    const Vec3 disp = out.frames[t].positions[j] - out.frames[t - 1].positions[j];
                    const double n = disp.norm();
                    if (n > max_disp) {
                        out.frames[t].positions[j] =
                            out.frames[t - 1].positions[j] + disp * (max_disp / n);
                    }
                }
            }
            // (c) horizontal clamp for feet in contact at both ends of a frame step.
            for (int f : skeleton.foot_indices) {
                for (int t = 1; t < T; ++t) {
                    if (out.frames[t].positions[f].z() < cfg.contact_height_m &&
                        out.frames[t - 1].positions[f].z() < cfg.contact_height_m) {
                        const Eigen::Vector2d drift = out.frames[t].positions[f].head<2>() -
                                                      out.frames[t - 1].positions[f].head<2>();
                        const double n = drift.norm();
                        if (n > cfg.constraint_tolerance_m) {
                            const Eigen::Vector2d clamped =
                                out.frames[t - 1].positions[f].head<2>() +
                                drift * (cfg.constraint_tolerance_m / n);
                            out.frames[t].positions[f].x() = clamped.x();
                            out.frames[t].positions[f].y() = clamped.y();
                        }
                    }
                }
            }
            // (a) ground plane.
            for (int t = 0; t < T; ++t) {
                for (int j = 0; j < J; ++j) {
                    if (out.frames[t].positions[j].z() < 0.0) out.frames[t].positions[j].z() = 0.0;
                }
            }
            // (b) touchdown per contact window: if a window never reaches the
            // ground, shift the whole body down so its lowest joint touches z = 0.
            for (const auto& [start, end] : windows) {
                double window_min = std::numeric_limits<double>::infinity();
                for (int t = start; t < end; ++t) {
                    for (int j = 0; j < J; ++j) {
                        window_min = std::min(window_min, out.frames[t].positions[j].z());
                    }
                }
                if (window_min > cfg.constraint_tolerance_m) {
                    for (int t = start; t < end; ++t) {
                        for (int j = 0; j < J; ++j) {
                            out.frames[t].positions[j].z() -= window_min;
                        }
                    }
                }
            }
            if (is_physically_feasible(measure_feasibility(out, skeleton, cfg), cfg, out.fps)) {
                break;
            }
        }

        double max_change = 0.0;
        for (int t = 0; t < T; ++t) {
            for (int j = 0; j < J; ++j) {
                max_change = std::max(
                    max_change,
                    (out.frames[t].positions[j] - prev.frames[t].positions[j]).lpNorm<Eigen::Infinity>());
            }
        }
        if (max_change < 1e-12 &&
            is_physically_feasible(measure_feasibility(out, skeleton, cfg), cfg, out.fps)) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        converged = is_physically_feasible(measure_feasibility(out, skeleton, cfg), cfg, out.fps);
    }
    return ProjectionResult{std::move(out), converged, iterations};
}

/// L2 norm of the flattened per-joint position difference over all frames.
inline double physical_error(const MotionSequence& x, const MotionSequence& x_prime) {
    if (x.frame_count() != x_prime.frame_count() || x.joint_count() != x_prime.joint_count()) {
        throw ShapeError("physical_error: shape mismatch");
    }
    double sum = 0.0;
    for (int t = 0; t < x.frame_count(); ++t) {
        for (int j = 0; j < x.joint_count(); ++j) {
            sum += (x.frames[t].positions[j] - x_prime.frames[t].positions[j]).squaredNorm();
        }
    }
    return std::sqrt(sum);
}

struct RewardSeries {
    std::vector<double> per_frame;
    double mean = 0.0;
};

/// Exponential-kernel imitation reward per frame:
///   r_t = w_jp e^{-100 |dp|} + w_jr e^{-10 |dq|} + w_jv e^{-0.1 |dv|} + w_jw e^{-0.1 |dw|}
/// where each |.| is the mean per-joint norm for that frame and rotations are
/// compared by geodesic distance. Equals 1 exactly when x' == x.
inline RewardSeries imitation_reward(const MotionSequence& x, const MotionSequence& x_prime,
                                     const RewardWeights& w) {
    w.validate();
    if (x.frame_count() != x_prime.frame_count() || x.joint_count() != x_prime.joint_count()) {
        throw ShapeError("imitation_reward: shape mismatch");
    }
    const int T = x.frame_count();
    const int J = x.joint_count();
    const DerivativeTrack dx = compute_derivatives(x);
    const DerivativeTrack dxp = compute_derivatives(x_prime);

    RewardSeries out;
    out.per_frame.resize(T);
    for (int t = 0; t < T; ++t) {
        double dp = 0.0, dq = 0.0, dv = 0.0, dw = 0.0;
        for (int j = 0; j < J; ++j) {
            dp += (x_prime.frames[t].positions[j] - x.frames[t].positions[j]).norm();
            dq += quat_geodesic_distance(x_prime.frames[t].orientations[j],
                                         x.frames[t].orientations[j]);
            dv += (dxp.linear_velocity[t][j] - dx.linear_velocity[t][j]).norm();
            dw += (dxp.angular_velocity[t][j] - dx.angular_velocity[t][j]).norm();
        }
        dp /= J;
        dq /= J;
        dv /= J;
        dw /= J;
        out.per_frame[t] = w.w_jp * std::exp(-100.0 * dp) + w.w_jr * std::exp(-10.0 * dq) +
                           w.w_jv * std::exp(-0.1 * dv) + w.w_jw * std::exp(-0.1 * dw);
        out.mean += out.per_frame[t];
    }
    out.mean /= T;
    return out;
}

/// z-normalizes raw projection distances over a dataset and negates so that
/// higher scores mean more physically plausible. Population std; the output
/// population has mean 0 and std 1.
inline std::vector<PhysicalAnnotation> normalize_annotations(
    const std::vector<std::pair<std::string, double>>& raw) {
    if (raw.size() < 2) {
        throw DegenerateInputError("normalize_annotations: needs at least 2 entries");
    }
    bool constant = true;
    double mean = 0.0;
    for (const auto& [id, e] : raw) {
        mean += e;
        constant = constant && e == raw[0].second;
    }
    if (constant) throw DegenerateInputError("normalize_annotations: constant e_p values");
    mean /= static_cast<double>(raw.size());
    double var = 0.0;
    for (const auto& [id, e] : raw) var += (e - mean) * (e - mean);
    var /= static_cast<double>(raw.size());
    const double std_dev = std::sqrt(var);

    std::vector<PhysicalAnnotation> out;
    out.reserve(raw.size());
    for (const auto& [id, e] : raw) {
        PhysicalAnnotation a;
        a.motion_id = id;
        a.e_p_raw = e;
        a.physical_score = -(e - mean) / std_dev;
        out.push_back(std::move(a));
    }
    return out;
}

/// Full annotation pass: project every motion, measure e_p, z-normalize.
/// Motions are processed in motion_id order; per-motion non-convergence is
/// flagged, not fatal.
inline std::vector<PhysicalAnnotation> annotate_dataset(
    const std::vector<std::pair<std::string, MotionSequence>>& motions, const Skeleton& skeleton,
    const ProjectionConfig& cfg) {
    std::vector<std::size_t> order(motions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return motions[a].first < motions[b].first;
    });

    std::vector<std::pair<std::string, double>> raw;
    std::vector<bool> converged;
    raw.reserve(motions.size());
    for (std::size_t i : order) {
        const ProjectionResult res = project_to_physical(motions[i].second, skeleton, cfg);
        raw.emplace_back(motions[i].first, physical_error(motions[i].second, res.motion));
        converged.push_back(res.converged);
    }
    std::vector<PhysicalAnnotation> out = normalize_annotations(raw);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].converged = converged[i];
    return out;
}

}  // namespace mofi
