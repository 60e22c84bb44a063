#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mofi/types.hpp"

namespace mofi {

using json = nlohmann::json;

namespace detail {

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ParseError("invalid JSON in " + path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << text;
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

inline double require_number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw SchemaError(std::string("missing or non-numeric field: ") + key);
    }
    return j[key].get<double>();
}

}  // namespace detail

/// Motion JSON schema:
///   {"fps": n, "skeleton_id": s,
///    "frames": [{"positions": [[x,y,z],...], "rotations": [[w,x,y,z],...]}, ...]}
inline MotionSequence motion_from_json(const json& j) {
    MotionSequence m;
    m.fps = detail::require_number(j, "fps");
    if (!j.contains("skeleton_id") || !j["skeleton_id"].is_string()) {
        throw SchemaError("missing or non-string field: skeleton_id");
    }
    m.skeleton_id = j["skeleton_id"].get<std::string>();
    if (!j.contains("frames") || !j["frames"].is_array()) {
        throw SchemaError("missing or non-array field: frames");
    }
    for (const json& jf : j["frames"]) {
        if (!jf.is_object() || !jf.contains("positions") || !jf.contains("rotations") ||
            !jf["positions"].is_array() || !jf["rotations"].is_array()) {
            throw SchemaError("frame must contain positions and rotations arrays");
        }
        FramePose pose;
        for (const json& jp : jf["positions"]) {
            if (!jp.is_array() || jp.size() != 3) throw SchemaError("position must be [x,y,z]");
            pose.positions.emplace_back(jp[0].get<double>(), jp[1].get<double>(),
                                        jp[2].get<double>());
        }
        for (const json& jq : jf["rotations"]) {
            if (!jq.is_array() || jq.size() != 4) throw SchemaError("rotation must be [w,x,y,z]");
            pose.orientations.emplace_back(jq[0].get<double>(), jq[1].get<double>(),
                                           jq[2].get<double>(), jq[3].get<double>());
        }
        if (pose.positions.size() != pose.orientations.size()) {
            throw SchemaError("frame positions/rotations length mismatch");
        }
        m.frames.push_back(std::move(pose));
    }

    // Re-normalize quaternions that drifted within 1e-6 of unit norm; reject
    // worse. Already-unit quaternions are left untouched so that
    // save -> load -> save is byte-identical.
    for (FramePose& f : m.frames) {
        for (Quat& q : f.orientations) {
            const double n = q.norm();
            if (std::abs(n - 1.0) > 1e-6) {
                throw InvariantError("quaternion norm off unit by more than 1e-6");
            }
            if (std::abs(n - 1.0) > 1e-12) q.coeffs() /= n;
        }
    }
    m.validate();
    return m;
}

inline json motion_to_json(const MotionSequence& m) {
    json frames = json::array();
    for (const FramePose& f : m.frames) {
        json jp = json::array();
        for (const Vec3& p : f.positions) jp.push_back({p.x(), p.y(), p.z()});
        json jq = json::array();
        for (const Quat& q : f.orientations) jq.push_back({q.w(), q.x(), q.y(), q.z()});
        frames.push_back({{"positions", jp}, {"rotations", jq}});
    }
    return json{{"fps", m.fps}, {"skeleton_id", m.skeleton_id}, {"frames", frames}};
}

inline MotionSequence load_motion(const std::string& path) {
    return motion_from_json(detail::read_json_file(path));
}

inline void save_motion(const MotionSequence& motion, const std::string& path) {
    motion.validate();
    detail::write_text_file(path, motion_to_json(motion).dump(2) + "\n");
}

/// Skeleton JSON schema:
///   {"joint_names": [...], "parent_index": [...], "root_index": n, "foot_indices": [...]}
inline Skeleton skeleton_from_json(const json& j) {
    Skeleton s;
    if (!j.contains("joint_names") || !j["joint_names"].is_array() ||
        !j.contains("parent_index") || !j["parent_index"].is_array() ||
        !j.contains("root_index") || !j["root_index"].is_number_integer() ||
        !j.contains("foot_indices") || !j["foot_indices"].is_array()) {
        throw SchemaError("skeleton JSON missing required fields");
    }
    for (const json& n : j["joint_names"]) s.joint_names.push_back(n.get<std::string>());
    for (const json& p : j["parent_index"]) s.parent_index.push_back(p.get<int>());
    s.root_index = j["root_index"].get<int>();
    for (const json& f : j["foot_indices"]) s.foot_indices.push_back(f.get<int>());
    s.validate();
    return s;
}

inline json skeleton_to_json(const Skeleton& s) {
    return json{{"joint_names", s.joint_names},
                {"parent_index", s.parent_index},
                {"root_index", s.root_index},
                {"foot_indices", s.foot_indices}};
}

inline Skeleton load_skeleton(const std::string& path) {
    return skeleton_from_json(detail::read_json_file(path));
}

inline void save_skeleton(const Skeleton& skeleton, const std::string& path) {
    skeleton.validate();
    detail::write_text_file(path, skeleton_to_json(skeleton).dump(2) + "\n");
}

}  // namespace mofi
