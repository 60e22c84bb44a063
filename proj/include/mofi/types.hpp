#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mofi/errors.hpp"
#include "mofi/quat.hpp"

namespace mofi {

// Joint hierarchy. Positions are meters, Z-up, ground plane at z = 0.
struct Skeleton {
    std::vector<std::string> joint_names;
    std::vector<int> parent_index;  // root entry is -1
    int root_index = 0;
    std::vector<int> foot_indices;

    int joint_count() const { return static_cast<int>(joint_names.size()); }

    void validate() const {
        const int n = joint_count();
        if (n == 0) throw InvariantError("skeleton: no joints");
        if (static_cast<int>(parent_index.size()) != n) {
            throw InvariantError("skeleton: parent_index size mismatch");
        }
        if (root_index < 0 || root_index >= n) {
            throw InvariantError("skeleton: root_index out of range");
        }
        for (int j = 0; j < n; ++j) {
            const int p = parent_index[j];
            if (j == root_index) {
                if (p != -1) throw InvariantError("skeleton: root joint must have parent -1");
            } else if (p < 0 || p >= n || p == j) {
                throw InvariantError("skeleton: invalid parent for joint " + joint_names[j]);
            }
        }
        // Every joint must reach the root; bounded walk detects cycles.
        for (int j = 0; j < n; ++j) {
            int cur = j;
            int steps = 0;
            while (cur != root_index) {
                cur = parent_index[cur];
                if (cur < 0 || ++steps > n) {
                    throw InvariantError("skeleton: parent graph is not a tree rooted at root_index");
                }
            }
        }
        if (foot_indices.empty()) throw InvariantError("skeleton: foot_indices must be non-empty");
        for (int f : foot_indices) {
            if (f < 0 || f >= n) throw InvariantError("skeleton: foot index out of range");
        }
    }
};

// One sampled pose: per-joint world position and orientation.
struct FramePose {
    std::vector<Vec3> positions;
    std::vector<Quat> orientations;  // unit quaternions, (w, x, y, z)
};

struct MotionSequence {
    double fps = 0.0;
    std::string skeleton_id;
    std::vector<FramePose> frames;

    int frame_count() const { return static_cast<int>(frames.size()); }
    int joint_count() const { return frames.empty() ? 0 : static_cast<int>(frames[0].positions.size()); }

    void validate(double quat_tol = 1e-9) const {
        if (!(fps > 0.0)) throw InvariantError("motion: fps must be > 0");
        if (frame_count() < 2) throw InvariantError("motion: needs at least 2 frames");
        const std::size_t joints = frames[0].positions.size();
        if (joints == 0) throw InvariantError("motion: zero joints");
        for (const FramePose& f : frames) {
            if (f.positions.size() != joints || f.orientations.size() != joints) {
                throw InvariantError("motion: frame joint count mismatch");
            }
            for (const Quat& q : f.orientations) {
                if (!quat_is_unit(q, quat_tol)) {
                    throw InvariantError("motion: orientation quaternion is not unit norm");
                }
            }
        }
    }
};

// Finite-difference kinematics, one entry per (frame, joint).
struct DerivativeTrack {
    std::vector<std::vector<Vec3>> linear_velocity;      // m/s
    std::vector<std::vector<Vec3>> angular_velocity;     // rad/s
    std::vector<std::vector<Vec3>> linear_acceleration;  // m/s^2
};

}  // namespace mofi
