// Test-only reference implementations, kept independent of the library code
// paths they check: direct-formula correlation coefficients, O(n^2) rank and
// pair enumeration, double-loop pose metrics, and an Eigen::umeyama-based
// Procrustes oracle.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>
#include <vector>

#include "mofi/rng.hpp"
#include "mofi/types.hpp"

namespace oracle {

// Pearson per the textbook formula, long double accumulation.
inline double plcc(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    long double ma = 0.0L, mb = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<long double>(n);
    mb /= static_cast<long double>(n);
    long double num = 0.0L, da2 = 0.0L, db2 = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        da2 += (a[i] - ma) * (a[i] - ma);
        db2 += (b[i] - mb) * (b[i] - mb);
    }
    return static_cast<double>(num / (std::sqrt(da2) * std::sqrt(db2)));
}

// Fractional ranks by O(n^2) counting: 1 + #smaller + #equal-before-or-after/2.
inline std::vector<double> ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t smaller = 0, equal = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (v[j] < v[i]) ++smaller;
            if (v[j] == v[i] && j != i) ++equal;
        }
        r[i] = 1.0 + static_cast<double>(smaller) + static_cast<double>(equal) / 2.0;
    }
    return r;
}

inline bool has_ties(const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            if (v[i] == v[j]) return true;
        }
    }
    return false;
}

// Tie-free Spearman via the rank-difference formula; with ties falls back to
// Pearson over counted ranks.
inline double srocc(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    const std::vector<double> ra = ranks(a);
    const std::vector<double> rb = ranks(b);
    if (!has_ties(a) && !has_ties(b)) {
        long double d2 = 0.0L;
        for (std::size_t i = 0; i < n; ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
        const long double dn = static_cast<long double>(n);
        return static_cast<double>(1.0L - 6.0L * d2 / (dn * (dn * dn - 1.0L)));
    }
    return plcc(ra, rb);
}

// Kendall tau-a by explicit concordant/discordant counting.
inline double krocc(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    long long concordant = 0, discordant = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double da = a[i] - a[j];
            const double db = b[i] - b[j];
            if (da * db > 0.0) {
                ++concordant;
            } else if (da * db < 0.0 && da != 0.0 && db != 0.0) {
                ++discordant;
            }
        }
    }
    const double total = static_cast<double>(n) * (static_cast<double>(n) - 1.0) / 2.0;
    return static_cast<double>(concordant - discordant) / total;
}

// --- pose metric oracles: naive double loops over frames and joints ---------

inline double recon_err_mm(const mofi::MotionSequence& pred, const mofi::MotionSequence& gt) {
    double sum = 0.0;
    int count = 0;
    for (int t = 0; t < pred.frame_count(); ++t) {
        for (int j = 0; j < pred.joint_count(); ++j) {
            double d2 = 0.0;
            for (int k = 0; k < 3; ++k) {
                const double d = pred.frames[t].positions[j][k] - gt.frames[t].positions[j][k];
                d2 += d * d;
            }
            sum += std::sqrt(d2);
            ++count;
        }
    }
    return sum / count * 1000.0;
}

// Similarity alignment via Eigen's umeyama, then the MPJPE-style average.
inline double pa_mpjpe_mm(const mofi::MotionSequence& pred, const mofi::MotionSequence& gt) {
    const int T = pred.frame_count(), J = pred.joint_count();
    double sum = 0.0;
    for (int t = 0; t < T; ++t) {
        Eigen::MatrixXd src(3, J), dst(3, J);
        for (int j = 0; j < J; ++j) {
            src.col(j) = pred.frames[t].positions[j];
            dst.col(j) = gt.frames[t].positions[j];
        }
        const Eigen::Matrix4d tf = Eigen::umeyama(src, dst, true);
        for (int j = 0; j < J; ++j) {
            const Eigen::Vector3d aligned =
                tf.topLeftCorner<3, 3>() * src.col(j) + tf.topRightCorner<3, 1>();
            sum += (aligned - dst.col(j)).norm();
        }
    }
    return sum / (static_cast<double>(T) * J) * 1000.0;
}

inline double flat_l2(const mofi::MotionSequence& a, const mofi::MotionSequence& b) {
    std::vector<double> flat_a, flat_b;
    for (int t = 0; t < a.frame_count(); ++t) {
        for (int j = 0; j < a.joint_count(); ++j) {
            for (int k = 0; k < 3; ++k) {
                flat_a.push_back(a.frames[t].positions[j][k]);
                flat_b.push_back(b.frames[t].positions[j][k]);
            }
        }
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < flat_a.size(); ++i) {
        sum += (flat_a[i] - flat_b[i]) * (flat_a[i] - flat_b[i]);
    }
    return std::sqrt(sum);
}

// --- random test data helpers ------------------------------------------------

inline mofi::Quat random_unit_quat(mofi::Rng& rng) {
    mofi::Quat q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    q.normalize();
    return q;
}

inline mofi::MotionSequence random_motion(mofi::Rng& rng, int frames, int joints,
                                          double fps = 30.0) {
    mofi::MotionSequence m;
    m.fps = fps;
    m.skeleton_id = "test";
    m.frames.resize(frames);
    for (auto& f : m.frames) {
        for (int j = 0; j < joints; ++j) {
            f.positions.emplace_back(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                     rng.uniform(0.0, 2.0));
            f.orientations.push_back(random_unit_quat(rng));
        }
    }
    return m;
}

inline mofi::MotionSequence static_motion(int frames, int joints, double fps = 30.0,
                                          double z = 1.0) {
    mofi::MotionSequence m;
    m.fps = fps;
    m.skeleton_id = "test";
    m.frames.resize(frames);
    for (auto& f : m.frames) {
        for (int j = 0; j < joints; ++j) {
            f.positions.emplace_back(0.1 * j, -0.2 * j, z + 0.05 * j);
            f.orientations.push_back(mofi::Quat::Identity());
        }
    }
    return m;
}

}  // namespace oracle
