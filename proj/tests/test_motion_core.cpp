#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mofi/io.hpp"
#include "mofi/kinematics.hpp"
#include "oracles.hpp"

using namespace mofi;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "mofi_motion_core_tests";
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

MotionSequence two_frame_motion() {
    MotionSequence m;
    m.fps = 30.0;
    m.skeleton_id = "test";
    m.frames.resize(2);
    for (int t = 0; t < 2; ++t) {
        for (int j = 0; j < 3; ++j) {
            m.frames[t].positions.emplace_back(0.1 * t + 0.3 * j, -0.25 * j, 1.0 + 0.01 * t);
            m.frames[t].orientations.push_back(
                quat_from_axis_angle(Vec3::UnitZ(), 0.1 * t + 0.2 * j));
        }
    }
    return m;
}

}  // namespace

TEST(MotionIo, RoundTripPreservesMotion) {
    const MotionSequence m = two_frame_motion();
    const fs::path path = temp_dir() / "roundtrip.json";
    save_motion(m, path.string());
    const MotionSequence back = load_motion(path.string());
    ASSERT_EQ(back.frame_count(), 2);
    ASSERT_EQ(back.joint_count(), 3);
    EXPECT_EQ(back.fps, m.fps);
    EXPECT_EQ(back.skeleton_id, m.skeleton_id);
    for (int t = 0; t < 2; ++t) {
        for (int j = 0; j < 3; ++j) {
            EXPECT_LT((back.frames[t].positions[j] - m.frames[t].positions[j]).norm(), 1e-12);
            EXPECT_LT(quat_geodesic_distance(back.frames[t].orientations[j],
                                             m.frames[t].orientations[j]),
                      1e-9);
        }
    }
}

TEST(MotionIo, SaveLoadSaveIsByteIdentical) {
    const MotionSequence m = two_frame_motion();
    const fs::path a = temp_dir() / "bytes_a.json";
    const fs::path b = temp_dir() / "bytes_b.json";
    save_motion(m, a.string());
    save_motion(load_motion(a.string()), b.string());
    EXPECT_EQ(read_file(a), read_file(b));
}

TEST(MotionIo, ThreeElementQuaternionIsSchemaError) {
    const fs::path path = temp_dir() / "badquat.json";
    std::ofstream(path) << R"({"fps": 30, "skeleton_id": "t", "frames": [
        {"positions": [[0,0,1]], "rotations": [[1,0,0]]},
        {"positions": [[0,0,1]], "rotations": [[1,0,0]]}]})";
    EXPECT_THROW(load_motion(path.string()), SchemaError);
}

TEST(MotionIo, FarFromUnitQuaternionIsInvariantError) {
    const fs::path path = temp_dir() / "badnorm.json";
    std::ofstream(path) << R"({"fps": 30, "skeleton_id": "t", "frames": [
        {"positions": [[0,0,1]], "rotations": [[0.5,0,0,0]]},
        {"positions": [[0,0,1]], "rotations": [[0.5,0,0,0]]}]})";
    EXPECT_THROW(load_motion(path.string()), InvariantError);
}

TEST(MotionIo, NearUnitQuaternionIsRenormalized) {
    const fs::path path = temp_dir() / "nearunit.json";
    std::ofstream(path) << R"({"fps": 30, "skeleton_id": "t", "frames": [
        {"positions": [[0,0,1]], "rotations": [[1.0000005,0,0,0]]},
        {"positions": [[0,0,1]], "rotations": [[1.0000005,0,0,0]]}]})";
    const MotionSequence m = load_motion(path.string());
    EXPECT_NEAR(m.frames[0].orientations[0].norm(), 1.0, 1e-15);
}

TEST(MotionIo, MalformedJsonIsParseError) {
    const fs::path path = temp_dir() / "garbage.json";
    std::ofstream(path) << "{not json";
    EXPECT_THROW(load_motion(path.string()), ParseError);
}

TEST(MotionIo, MissingFieldIsSchemaError) {
    const fs::path path = temp_dir() / "nofps.json";
    std::ofstream(path) << R"({"skeleton_id": "t", "frames": []})";
    EXPECT_THROW(load_motion(path.string()), SchemaError);
}

TEST(MotionIo, JointCountMismatchIsInvariantError) {
    const fs::path path = temp_dir() / "mismatch.json";
    std::ofstream(path) << R"({"fps": 30, "skeleton_id": "t", "frames": [
        {"positions": [[0,0,1],[1,0,1]], "rotations": [[1,0,0,0],[1,0,0,0]]},
        {"positions": [[0,0,1]], "rotations": [[1,0,0,0]]}]})";
    EXPECT_THROW(load_motion(path.string()), InvariantError);
}

TEST(MotionIo, ZeroFrameMotionRejectedBeforeWrite) {
    MotionSequence m;
    m.fps = 30.0;
    m.skeleton_id = "t";
    const fs::path path = temp_dir() / "never_written.json";
    EXPECT_THROW(save_motion(m, path.string()), InvariantError);
    EXPECT_FALSE(fs::exists(path));
}

TEST(MotionIo, UnwritableDestinationIsIoError) {
    EXPECT_THROW(save_motion(two_frame_motion(), "/nonexistent_dir_xyz/m.json"), IoError);
}

TEST(SkeletonChecks, ValidatesTreeStructure) {
    Skeleton s;
    s.joint_names = {"a", "b", "c"};
    s.parent_index = {-1, 0, 1};
    s.root_index = 0;
    s.foot_indices = {2};
    EXPECT_NO_THROW(s.validate());

    Skeleton cycle = s;
    cycle.parent_index = {-1, 2, 1};  // b <-> c cycle
    EXPECT_THROW(cycle.validate(), InvariantError);

    Skeleton two_roots = s;
    two_roots.parent_index = {-1, -1, 1};
    EXPECT_THROW(two_roots.validate(), InvariantError);

    Skeleton no_feet = s;
    no_feet.foot_indices = {};
    EXPECT_THROW(no_feet.validate(), InvariantError);

    Skeleton bad_foot = s;
    bad_foot.foot_indices = {7};
    EXPECT_THROW(bad_foot.validate(), InvariantError);
}

TEST(SkeletonIo, RoundTrip) {
    Skeleton s;
    s.joint_names = {"root", "mid", "foot"};
    s.parent_index = {-1, 0, 1};
    s.root_index = 0;
    s.foot_indices = {2};
    const fs::path path = temp_dir() / "skeleton.json";
    save_skeleton(s, path.string());
    const Skeleton back = load_skeleton(path.string());
    EXPECT_EQ(back.joint_names, s.joint_names);
    EXPECT_EQ(back.parent_index, s.parent_index);
    EXPECT_EQ(back.root_index, s.root_index);
    EXPECT_EQ(back.foot_indices, s.foot_indices);
}

TEST(QuatDistance, AnchorValues) {
    const Quat id = Quat::Identity();
    EXPECT_EQ(quat_geodesic_distance(id, id), 0.0);
    const Quat z180 = quat_from_axis_angle(Vec3::UnitZ(), M_PI);
    EXPECT_NEAR(quat_geodesic_distance(id, z180), M_PI, 1e-12);
    const Quat x90 = quat_from_axis_angle(Vec3::UnitX(), M_PI / 2.0);
    // Independent route: 2*acos(|<a,b>|).
    const double via_acos = 2.0 * std::acos(std::abs(id.coeffs().dot(x90.coeffs())));
    EXPECT_NEAR(quat_geodesic_distance(id, x90), M_PI / 2.0, 1e-12);
    EXPECT_NEAR(quat_geodesic_distance(id, x90), via_acos, 1e-12);
}

TEST(QuatDistance, NonUnitInputThrows) {
    Quat bad(2.0, 0.0, 0.0, 0.0);
    EXPECT_THROW(quat_geodesic_distance(bad, Quat::Identity()), InvariantError);
}

TEST(QuatDistance, SymmetryAndSignFlipProperty) {
    Rng rng(411);
    for (int i = 0; i < 500; ++i) {
        const Quat a = oracle::random_unit_quat(rng);
        const Quat b = oracle::random_unit_quat(rng);
        const double dab = quat_geodesic_distance(a, b);
        EXPECT_EQ(dab, quat_geodesic_distance(b, a));
        Quat neg_a = a;
        neg_a.coeffs() = -neg_a.coeffs();
        EXPECT_EQ(dab, quat_geodesic_distance(neg_a, b));
        EXPECT_GE(dab, 0.0);
        EXPECT_LE(dab, M_PI + 1e-15);
    }
}

TEST(Derivatives, StaticMotionHasZeroDerivatives) {
    const MotionSequence m = oracle::static_motion(10, 4);
    const DerivativeTrack d = compute_derivatives(m);
    for (int t = 0; t < 10; ++t) {
        for (int j = 0; j < 4; ++j) {
            EXPECT_EQ(d.linear_velocity[t][j].norm(), 0.0);
            EXPECT_EQ(d.angular_velocity[t][j].norm(), 0.0);
            EXPECT_EQ(d.linear_acceleration[t][j].norm(), 0.0);
        }
    }
}

TEST(Derivatives, ConstantVelocityIsExact) {
    MotionSequence m;
    m.fps = 30.0;
    m.skeleton_id = "t";
    m.frames.resize(12);
    for (int t = 0; t < 12; ++t) {
        m.frames[t].positions.emplace_back(t / 30.0, 0.0, 1.0);
        m.frames[t].orientations.push_back(Quat::Identity());
    }
    const DerivativeTrack d = compute_derivatives(m);
    for (int t = 0; t < 12; ++t) {
        EXPECT_NEAR(d.linear_velocity[t][0].x(), 1.0, 1e-12);
        EXPECT_NEAR(d.linear_velocity[t][0].y(), 0.0, 1e-12);
    }
}

TEST(Derivatives, QuadraticTrajectoryAccelerationIsExact) {
    const double g = 9.81;
    MotionSequence m;
    m.fps = 30.0;
    m.skeleton_id = "t";
    m.frames.resize(20);
    for (int t = 0; t < 20; ++t) {
        const double time = t / 30.0;
        m.frames[t].positions.emplace_back(0.0, 0.0, 0.5 * g * time * time);
        m.frames[t].orientations.push_back(Quat::Identity());
    }
    const DerivativeTrack d = compute_derivatives(m);
    for (int t = 1; t < 19; ++t) {
        EXPECT_NEAR(d.linear_acceleration[t][0].z(), g, 1e-9);
    }
}

TEST(Derivatives, ConstantRotationRateIsExact) {
    const double omega = 1.7;  // rad/s about z
    MotionSequence m;
    m.fps = 30.0;
    m.skeleton_id = "t";
    m.frames.resize(15);
    for (int t = 0; t < 15; ++t) {
        m.frames[t].positions.emplace_back(0.0, 0.0, 1.0);
        m.frames[t].orientations.push_back(quat_from_axis_angle(Vec3::UnitZ(), omega * t / 30.0));
    }
    const DerivativeTrack d = compute_derivatives(m);
    for (int t = 0; t < 15; ++t) {
        EXPECT_NEAR(d.angular_velocity[t][0].z(), omega, 1e-9);
        EXPECT_NEAR(d.angular_velocity[t][0].head<2>().norm(), 0.0, 1e-12);
    }
}

TEST(Derivatives, FewerThanTwoFramesThrows) {
    MotionSequence m;
    m.fps = 30.0;
    m.skeleton_id = "t";
    m.frames.resize(1);
    m.frames[0].positions.emplace_back(0, 0, 0);
    m.frames[0].orientations.push_back(Quat::Identity());
    EXPECT_THROW(compute_derivatives(m), InvariantError);
}

TEST(Derivatives, TimeReversalNegatesInteriorVelocities) {
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const MotionSequence m = oracle::random_motion(rng, 9, 3);
        MotionSequence rev = m;
        std::reverse(rev.frames.begin(), rev.frames.end());
        const DerivativeTrack df = compute_derivatives(m);
        const DerivativeTrack dr = compute_derivatives(rev);
        const int T = m.frame_count();
        for (int t = 1; t < T - 1; ++t) {
            for (int j = 0; j < 3; ++j) {
                EXPECT_LT((df.linear_velocity[t][j] + dr.linear_velocity[T - 1 - t][j]).norm(),
                          1e-12);
                EXPECT_LT((df.angular_velocity[t][j] + dr.angular_velocity[T - 1 - t][j]).norm(),
                          1e-9);
            }
        }
    }
}

TEST(MotionValidation, FpsAndFrameCountInvariants) {
    MotionSequence m = two_frame_motion();
    m.fps = 0.0;
    EXPECT_THROW(m.validate(), InvariantError);
    m.fps = 30.0;
    m.frames.resize(1);
    EXPECT_THROW(m.validate(), InvariantError);
}
