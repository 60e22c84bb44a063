#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "mofi/kinematics.hpp"
#include "mofi/types.hpp"

namespace mofi {

// Ground-truth-relative error metrics. recon/mpjpe/pa_mpjpe are reported in
// millimeters; AE/AVE stay in meters; e_acc/e_vel are per-second derivative
// errors scaled x1000.
struct PoseMetricReport {
    double recon_err_mm = 0.0;
    double mpjpe_mm = 0.0;
    double pa_mpjpe_mm = 0.0;
    double e_acc = 0.0;
    double e_vel = 0.0;
    double root_ae = 0.0;
    double root_ave = 0.0;
    double joint_ae = 0.0;
    double joint_ave = 0.0;

    void validate() const {
        const double vals[] = {recon_err_mm, mpjpe_mm, pa_mpjpe_mm, e_acc, e_vel,
                               root_ae,      root_ave, joint_ae,    joint_ave};
        for (double v : vals) {
            if (!(v >= 0.0)) throw InvariantError("pose metric must be non-negative");
        }
        if (pa_mpjpe_mm > mpjpe_mm + 1e-9) {
            throw InvariantError("pa_mpjpe exceeds mpjpe (alignment cannot increase error)");
        }
    }
};

enum class JointScope { RootOnly, AllJoints };

namespace detail {

inline void require_same_shape(const MotionSequence& a, const MotionSequence& b,
                               const char* what) {
    if (a.frame_count() != b.frame_count()) {
        throw ShapeError(std::string(what) + ": frame count mismatch");
    }
    if (a.joint_count() != b.joint_count()) {
        throw ShapeError(std::string(what) + ": joint count mismatch");
    }
}

}  // namespace detail

/// Mean world-space per-joint position error, in millimeters.
inline double recon_err(const MotionSequence& pred, const MotionSequence& gt) {
    detail::require_same_shape(pred, gt, "recon_err");
    const int T = pred.frame_count(), J = pred.joint_count();
    double sum = 0.0;
    for (int t = 0; t < T; ++t) {
        for (int j = 0; j < J; ++j) {
            sum += (pred.frames[t].positions[j] - gt.frames[t].positions[j]).norm();
        }
    }
    return sum / (static_cast<double>(T) * J) * 1000.0;
}

/// Mean per-joint position error after root-centering each frame, millimeters.
inline double mpjpe(const MotionSequence& pred, const MotionSequence& gt, int root_index = 0) {
    detail::require_same_shape(pred, gt, "mpjpe");
    const int T = pred.frame_count(), J = pred.joint_count();
    if (root_index < 0 || root_index >= J) throw ShapeError("mpjpe: root index out of range");
    double sum = 0.0;
    for (int t = 0; t < T; ++t) {
        const Vec3& rp = pred.frames[t].positions[root_index];
        const Vec3& rg = gt.frames[t].positions[root_index];
        for (int j = 0; j < J; ++j) {
            sum += ((pred.frames[t].positions[j] - rp) - (gt.frames[t].positions[j] - rg)).norm();
        }
    }
    return sum / (static_cast<double>(T) * J) * 1000.0;
}

/// Similarity Procrustes (rotation + translation + uniform scale) aligning
/// `src` onto `dst`; SVD with reflection correction. Returns the aligned copy.
inline std::vector<Vec3> procrustes_align(const std::vector<Vec3>& src,
                                          const std::vector<Vec3>& dst) {
    const int J = static_cast<int>(src.size());
    Vec3 mu_s = Vec3::Zero(), mu_d = Vec3::Zero();
    for (int j = 0; j < J; ++j) {
        mu_s += src[j];
        mu_d += dst[j];
    }
    mu_s /= J;
    mu_d /= J;

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    double var_s = 0.0;
    for (int j = 0; j < J; ++j) {
        const Vec3 cs = src[j] - mu_s;
        const Vec3 cd = dst[j] - mu_d;
        cov += cd * cs.transpose();
        var_s += cs.squaredNorm();
    }
    cov /= J;
    var_s /= J;
    if (var_s < 1e-24) {
        throw DegenerateFrameError("procrustes: all source joints coincide");
    }

    Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Vec3 s = Vec3::Ones();
    if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) s.z() = -1.0;
    const Eigen::Matrix3d rot =
        svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
    const double scale = svd.singularValues().dot(s) / var_s;

    std::vector<Vec3> aligned(J);
    for (int j = 0; j < J; ++j) {
        aligned[j] = scale * (rot * (src[j] - mu_s)) + mu_d;
    }
    return aligned;
}

/// MPJPE after per-frame similarity Procrustes alignment of pred to gt, mm.
inline double pa_mpjpe(const MotionSequence& pred, const MotionSequence& gt) {
    detail::require_same_shape(pred, gt, "pa_mpjpe");
    const int T = pred.frame_count(), J = pred.joint_count();
    double sum = 0.0;
    for (int t = 0; t < T; ++t) {
        const std::vector<Vec3> aligned =
            procrustes_align(pred.frames[t].positions, gt.frames[t].positions);
        for (int j = 0; j < J; ++j) {
            sum += (aligned[j] - gt.frames[t].positions[j]).norm();
        }
    }
    return sum / (static_cast<double>(T) * J) * 1000.0;
}

/// Mean finite-difference acceleration and velocity error (each motion
/// differentiated at its own fps), scaled x1000. Returns (e_acc, e_vel).
inline std::pair<double, double> accel_vel_err(const MotionSequence& pred,
                                               const MotionSequence& gt) {
    detail::require_same_shape(pred, gt, "accel_vel_err");
    const DerivativeTrack dp = compute_derivatives(pred);
    const DerivativeTrack dg = compute_derivatives(gt);
    const int T = pred.frame_count(), J = pred.joint_count();
    double acc = 0.0, vel = 0.0;
    for (int t = 0; t < T; ++t) {
        for (int j = 0; j < J; ++j) {
            acc += (dp.linear_acceleration[t][j] - dg.linear_acceleration[t][j]).norm();
            vel += (dp.linear_velocity[t][j] - dg.linear_velocity[t][j]).norm();
        }
    }
    const double denom = static_cast<double>(T) * J;
    return {acc / denom * 1000.0, vel / denom * 1000.0};
}

/// AE: mean L2 joint-position distance over the scope. AVE: mean L2 distance
/// between per-joint temporal variance vectors (population form, per axis).
/// Returns (ae, ave) in meters / meters^2.
inline std::pair<double, double> ae_ave(const MotionSequence& pred, const MotionSequence& gt,
                                        JointScope scope, int root_index = 0) {
    detail::require_same_shape(pred, gt, "ae_ave");
    const int T = pred.frame_count(), J = pred.joint_count();
    if (root_index < 0 || root_index >= J) throw ShapeError("ae_ave: root index out of range");

    std::vector<int> joints;
    if (scope == JointScope::RootOnly) {
        joints.push_back(root_index);
    } else {
        for (int j = 0; j < J; ++j) joints.push_back(j);
    }

    double ae = 0.0;
    for (int t = 0; t < T; ++t) {
        for (int j : joints) {
            ae += (pred.frames[t].positions[j] - gt.frames[t].positions[j]).norm();
        }
    }
    ae /= static_cast<double>(T) * joints.size();

    auto temporal_variance = [&](const MotionSequence& m, int j) {
        Vec3 mean = Vec3::Zero();
        for (int t = 0; t < T; ++t) mean += m.frames[t].positions[j];
        mean /= T;
        Vec3 var = Vec3::Zero();
        for (int t = 0; t < T; ++t) {
            const Vec3 d = m.frames[t].positions[j] - mean;
            var += d.cwiseProduct(d);
        }
        return Vec3(var / T);
    };
    double ave = 0.0;
    for (int j : joints) {
        ave += (temporal_variance(pred, j) - temporal_variance(gt, j)).norm();
    }
    ave /= static_cast<double>(joints.size());
    return {ae, ave};
}

inline PoseMetricReport compute_pose_metrics(const MotionSequence& pred, const MotionSequence& gt,
                                             int root_index = 0) {
    PoseMetricReport r;
    r.recon_err_mm = recon_err(pred, gt);
    r.mpjpe_mm = mpjpe(pred, gt, root_index);
    r.pa_mpjpe_mm = pa_mpjpe(pred, gt);
    std::tie(r.e_acc, r.e_vel) = accel_vel_err(pred, gt);
    std::tie(r.root_ae, r.root_ave) = ae_ave(pred, gt, JointScope::RootOnly, root_index);
    std::tie(r.joint_ae, r.joint_ave) = ae_ave(pred, gt, JointScope::AllJoints, root_index);
    r.validate();
    return r;
}

}  // namespace mofi
