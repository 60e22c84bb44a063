#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mofi/correlation.hpp"
#include "mofi/rng.hpp"
#include "mofi/types.hpp"

namespace mofi {

// One prompt of the synthetic benchmark: a base-motion family plus the
// corruption family injected at severities > 0.
struct PromptSpec {
    std::string label;
    std::string base_family;  // walk | jump | idle | squat
    // float | penetrate | skate | jitter | teleport | none, or "mixed" to draw
    // two corruption families per prompt so groups span defect types.
    std::string corruption;
};

struct SynthSpec {
    std::vector<PromptSpec> prompts;
    int motions_per_prompt = 8;
    double fps = 30.0;
    double duration_s = 2.0;

    void validate() const {
        if (prompts.empty()) throw ConfigError("SynthSpec: no prompts");
        if (motions_per_prompt < 2) throw ConfigError("SynthSpec: motions_per_prompt must be >= 2");
        if (!(fps > 0.0) || !(duration_s > 0.0)) {
            throw ConfigError("SynthSpec: fps and duration must be positive");
        }
        static const std::vector<std::string> bases = {"walk", "jump", "idle", "squat"};
        static const std::vector<std::string> corruptions = {"float",  "penetrate", "skate",
                                                             "jitter", "teleport",  "none",
                                                             "mixed"};
        for (const PromptSpec& p : prompts) {
            if (p.label.empty()) throw ConfigError("SynthSpec: empty prompt label");
            if (std::find(bases.begin(), bases.end(), p.base_family) == bases.end()) {
                throw ConfigError("SynthSpec: unknown base family " + p.base_family);
            }
            if (std::find(corruptions.begin(), corruptions.end(), p.corruption) ==
                corruptions.end()) {
                throw ConfigError("SynthSpec: unknown corruption family " + p.corruption);
            }
        }
    }
};

struct ManifestRow {
    std::string motion_id;
    std::string prompt;
    std::string family;  // corruption family actually injected; "none" at severity 0
    int severity = 0;
    double magnitude = 0.0;
};

struct SynthDataset {
    Skeleton skeleton;
    std::vector<std::pair<std::string, MotionSequence>> motions;  // corrupted
    std::vector<std::pair<std::string, MotionSequence>> bases;    // severity-0 reference
    std::vector<MotionPair> pairs;
    std::vector<ManifestRow> manifest;
    std::vector<std::pair<std::string, std::string>> splits;  // motion_id -> train|test
};

inline Skeleton default_skeleton() {
    Skeleton s;
    s.joint_names = {"pelvis", "spine", "head", "l_foot", "r_foot", "l_hand", "r_hand"};
    s.parent_index = {-1, 0, 1, 0, 0, 1, 1};
    s.root_index = 0;
    s.foot_indices = {3, 4};
    s.validate();
    return s;
}

namespace synth_detail {

// Per-motion shape variation drawn once from the motion's RNG stream.
struct BaseParams {
    double phase = 0.0;
    double speed = 0.0;        // walk forward speed
    double cycle_s = 1.0;      // gait cycle
    double sway = 0.0;
    double bob = 0.0;
    double swing_height = 0.0;
    double arm = 0.0;
    double depth = 0.0;        // squat/jump travel
    double freq = 0.0;         // jump/squat frequency
    double yaw_amp = 0.0;
};

inline BaseParams draw_params(const std::string& family, Rng& rng) {
    BaseParams p;
    p.phase = rng.uniform();
    p.speed = rng.uniform(0.6, 0.8);
    p.cycle_s = 1.0;
    p.sway = rng.uniform(0.01, 0.025);
    p.bob = rng.uniform(0.015, 0.03);
    // Swing clearance stays above contact height even under the deepest
    // penetrate corruption, so swing advance frames are never pinned.
    p.swing_height = rng.uniform(0.20, 0.22);
    p.arm = rng.uniform(0.10, 0.20);
    p.yaw_amp = rng.uniform(0.05, 0.12);
    if (family == "jump") {
        p.depth = rng.uniform(0.20, 0.30);
        p.freq = rng.uniform(1.0, 1.3);
    } else if (family == "squat") {
        p.depth = rng.uniform(0.25, 0.35);
        p.freq = rng.uniform(0.35, 0.5);
    } else {
        p.depth = rng.uniform(0.0, 0.01);
        p.freq = rng.uniform(0.2, 0.3);
    }
    return p;
}

// Cubic smoothstep; zero slope at both edges.
inline double smoothstep(double q) {
    q = std::clamp(q, 0.0, 1.0);
    return q * q * (3.0 - 2.0 * q);
}

// Swing-phase horizontal advance: flat while the foot can still be in ground
// contact, so sampled contact frames never see horizontal motion.
inline double advance_profile(double ws) {
    constexpr double lo = 0.30, hi = 0.70;
    return smoothstep((ws - lo) / (hi - lo));
}

struct FootState {
    double x = 0.0;
    double z = 0.0;
};

// Gait cycle with duty factor 0.55: stance is pinned to a per-cycle plant
// position; swing lifts along a sine and advances one stride.
inline FootState walk_foot(double w, double stride, double swing_height) {
    constexpr double duty = 0.55;
    const double k = std::floor(w);
    const double u = w - k;
    auto plant_x = [&](double cycle) { return stride * (cycle + 0.5 * duty); };
    FootState f;
    if (u < duty) {
        f.x = plant_x(k);
        f.z = 0.0;
    } else {
        const double ws = (u - duty) / (1.0 - duty);
        // Two-sided lerp so the endpoints are bit-identical to the stance
        // plants; sampled contact frames then have exactly zero drift.
        const double adv = advance_profile(ws);
        f.x = plant_x(k) * (1.0 - adv) + plant_x(k + 1.0) * adv;
        f.z = swing_height * std::sin(M_PI * ws);
    }
    return f;
}

inline MotionSequence base_motion(const std::string& family, const BaseParams& p,
                                  const Skeleton& skeleton, double fps, double duration_s) {
    const int T = std::max(2, static_cast<int>(std::lround(fps * duration_s)));
    MotionSequence m;
    m.fps = fps;
    m.skeleton_id = "synth-humanoid-v1";
    m.frames.resize(T);

    constexpr double pelvis_h = 0.95;
    constexpr double foot_y = 0.10;
    constexpr double hand_y = 0.25;
    for (int t = 0; t < T; ++t) {
        const double time = t / fps;
        FramePose& f = m.frames[t];
        f.positions.assign(skeleton.joint_count(), Vec3::Zero());
        f.orientations.assign(skeleton.joint_count(), Quat::Identity());

        double px = 0.0, py = 0.0, pz = pelvis_h;
        Vec3 lfoot(0.0, foot_y, 0.0), rfoot(0.0, -foot_y, 0.0);
        double hand_swing = 0.0, hand_lift = 0.0;

        if (family == "walk") {
            const double w = time / p.cycle_s + p.phase;
            const double stride = p.speed * p.cycle_s;
            px = stride * (w - p.phase);
            py = p.sway * std::sin(2.0 * M_PI * w);
            pz = pelvis_h + p.bob * std::sin(4.0 * M_PI * w);
            const FootState lf = walk_foot(w, stride, p.swing_height);
            const FootState rf = walk_foot(w + 0.5, stride, p.swing_height);
            // Plant positions are laid out so mid-stance sits under the pelvis.
            lfoot = Vec3(lf.x - stride * p.phase, foot_y, lf.z);
            rfoot = Vec3(rf.x - stride * (0.5 + p.phase), -foot_y, rf.z);
            hand_swing = p.arm * std::sin(2.0 * M_PI * w);
        } else if (family == "jump") {
            const double c = 0.5 - 0.5 * std::cos(2.0 * M_PI * (p.freq * time + p.phase));
            pz = pelvis_h - p.depth * c;
            py = 0.01 * std::sin(2.0 * M_PI * 0.3 * time + p.phase);
            hand_lift = 0.25 * c;
        } else if (family == "squat") {
            const double c = 0.5 - 0.5 * std::cos(2.0 * M_PI * (p.freq * time + p.phase));
            pz = pelvis_h - p.depth * c;
            hand_swing = 0.15 * c;
            hand_lift = 0.10 * c;
        } else {  // idle
            py = 0.02 * std::sin(2.0 * M_PI * p.freq * time + 2.0 * M_PI * p.phase);
            px = 0.01 * std::sin(2.0 * M_PI * 0.17 * time + p.phase);
            pz = pelvis_h + p.depth * std::sin(2.0 * M_PI * 0.23 * time);
            hand_swing = 0.02 * std::sin(2.0 * M_PI * p.freq * time);
        }

        f.positions[0] = Vec3(px, py, pz);
        f.positions[1] = Vec3(px, py, pz + 0.25);
        f.positions[2] = Vec3(px, py * 0.8, pz + 0.65);
        f.positions[3] = lfoot;
        f.positions[4] = rfoot;
        f.positions[5] = Vec3(px + hand_swing, py + hand_y, pz + 0.15 + hand_lift);
        f.positions[6] = Vec3(px - hand_swing, py - hand_y, pz + 0.15 + hand_lift);

        const double yaw = p.yaw_amp * std::sin(2.0 * M_PI * time / p.cycle_s + p.phase);
        f.orientations[0] = quat_from_axis_angle(Vec3::UnitZ(), yaw);
        f.orientations[2] = quat_from_axis_angle(Vec3::UnitZ(), 0.5 * yaw);
    }
    return m;
}

// Magnitude of each corruption family per severity step, sized so the
// projection distances of the five families span comparable ranges. The
// penetrate sink stays below the walk swing clearance so swing advance frames
// are never pinned by the contact constraint, and the teleport offset grows
// geometrically so projection distances stay ordered even when the affected
// frame count varies with gait phase.
inline double severity_magnitude(const std::string& family, int severity) {
    if (severity == 0 || family == "none") return 0.0;
    const double s = static_cast<double>(severity);
    if (family == "float") return s * 0.03;      // uniform lift, meters
    if (family == "penetrate") return s * 0.02;  // uniform sink, meters
    if (family == "skate") return s * 0.055;     // foot drift speed, m/s
    if (family == "jitter") return s * 0.012;    // positional noise std, meters
    if (family == "teleport") return 0.04 * std::pow(1.8, s);  // displacement, meters
    throw ConfigError("unknown corruption family: " + family);
}

inline void apply_corruption(MotionSequence& m, const Skeleton& skeleton,
                             const std::string& family, double magnitude, Rng& rng) {
    if (magnitude == 0.0 || family == "none") return;
    const int T = m.frame_count();
    const int J = m.joint_count();
    if (family == "float") {
        for (auto& f : m.frames) {
            for (auto& pos : f.positions) pos.z() += magnitude;
        }
    } else if (family == "penetrate") {
        for (auto& f : m.frames) {
            for (auto& pos : f.positions) pos.z() -= magnitude;
        }
    } else if (family == "skate") {
        const double angle = rng.uniform(0.0, 2.0 * M_PI);
        const Eigen::Vector2d dir(std::cos(angle), std::sin(angle));
        for (int t = 0; t < T; ++t) {
            const double time = t / m.fps;
            for (int f : skeleton.foot_indices) {
                m.frames[t].positions[f].x() += dir.x() * magnitude * time;
                m.frames[t].positions[f].y() += dir.y() * magnitude * time;
            }
        }
    } else if (family == "jitter") {
        for (auto& f : m.frames) {
            for (auto& pos : f.positions) {
                pos.x() += rng.normal(0.0, magnitude);
                pos.y() += rng.normal(0.0, magnitude);
                pos.z() += rng.normal(0.0, magnitude);
            }
        }
    } else if (family == "teleport") {
        // Transient whole-body displacement glitch: 0.3 s starting at 40% of
        // the clip, then back. Fixed placement keeps the affected frame count
        // stable across severities.
        const int t_star = static_cast<int>(0.4 * T);
        const int width = std::max(1, static_cast<int>(std::lround(0.3 * m.fps)));
        const double angle = rng.uniform(0.0, 2.0 * M_PI);
        const Eigen::Vector2d dir(std::cos(angle), std::sin(angle));
        for (int t = t_star; t < std::min(T, t_star + width); ++t) {
            for (int j = 0; j < J; ++j) {
                m.frames[t].positions[j].x() += dir.x() * magnitude;
                m.frames[t].positions[j].y() += dir.y() * magnitude;
            }
        }
    } else {
        throw ConfigError("unknown corruption family: " + family);
    }
}

}  // namespace synth_detail

/// Deterministic synthetic dataset: procedural base motions that satisfy all
/// physics-heuristic zero conditions at severity 0, corrupted copies at
/// severities 1..5, better/worse pairs derived from severity order, a manifest
/// of injected magnitudes, and a per-prompt train/test split.
inline SynthDataset synth_generate(const SynthSpec& spec, std::uint64_t seed) {
    spec.validate();
    SynthDataset ds;
    ds.skeleton = default_skeleton();

    static const std::vector<std::string> kFamilies = {"float", "penetrate", "skate", "jitter",
                                                       "teleport"};
    for (std::size_t pi = 0; pi < spec.prompts.size(); ++pi) {
        const PromptSpec& prompt = spec.prompts[pi];
        struct Member {
            std::string id;
            int severity;
            std::string family;
        };
        std::vector<Member> members;

        // "mixed" prompts rotate through all corruption families so each group
        // spans defect types and the within-group losses see cross-family
        // contrast.
        Rng family_rng(derive_seed(seed, pi + 1, 0xFA11));
        const int rotation = family_rng.uniform_int(0, 4);

        for (int mi = 0; mi < spec.motions_per_prompt; ++mi) {
            Rng rng(derive_seed(seed, pi + 1, static_cast<std::uint64_t>(mi) + 1));
            const synth_detail::BaseParams params =
                synth_detail::draw_params(prompt.base_family, rng);
            MotionSequence base = synth_detail::base_motion(prompt.base_family, params,
                                                            ds.skeleton, spec.fps, spec.duration_s);
            const int severity = mi % 6;
            std::string family = prompt.corruption;
            if (severity == 0) {
                family = "none";
            } else if (prompt.corruption == "mixed") {
                family = kFamilies[(rotation + mi) % 5];
            }
            const double magnitude = synth_detail::severity_magnitude(family, severity);
            MotionSequence corrupted = base;
            synth_detail::apply_corruption(corrupted, ds.skeleton, family, magnitude, rng);

            char suffix[16];
            std::snprintf(suffix, sizeof(suffix), "_m%03d", mi);
            const std::string id = prompt.label + suffix;
            ds.motions.emplace_back(id, std::move(corrupted));
            ds.bases.emplace_back(id, std::move(base));
            ds.manifest.push_back(ManifestRow{id, prompt.label, family, severity, magnitude});
            members.push_back(Member{id, severity, family});
        }

        // Pairs: lower severity is "better", restricted to comparisons whose
        // physical ordering is unambiguous: same corruption family, or one
        // member is an uncorrupted severity-0 motion.
        auto comparable = [](const Member& a, const Member& b) {
            return a.family == b.family || a.severity == 0 || b.severity == 0;
        };
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = 0; b < members.size(); ++b) {
                if (members[a].severity < members[b].severity &&
                    comparable(members[a], members[b])) {
                    ds.pairs.push_back(MotionPair{members[a].id, members[b].id, prompt.label});
                }
            }
        }
    }

    // Hold out whole prompts (one per base family where possible) so the test
    // split carries fresh base-motion parameter draws, not just unseen frames.
    std::map<std::string, std::vector<std::size_t>> prompts_by_base;
    for (std::size_t pi = 0; pi < spec.prompts.size(); ++pi) {
        prompts_by_base[spec.prompts[pi].base_family].push_back(pi);
    }
    std::set<std::size_t> test_prompts;
    Rng split_rng(derive_seed(seed, 0, 0x7E57));
    for (const auto& [base, indices] : prompts_by_base) {
        if (indices.size() < 2) continue;
        // Roughly a quarter of each base family's prompts, at least one.
        const std::size_t holdout = std::max<std::size_t>(1, indices.size() / 4);
        std::vector<std::size_t> order = indices;
        split_rng.shuffle(order);
        for (std::size_t k = 0; k < holdout; ++k) test_prompts.insert(order[k]);
    }
    for (const ManifestRow& row : ds.manifest) {
        std::size_t pi = 0;
        for (; pi < spec.prompts.size(); ++pi) {
            if (spec.prompts[pi].label == row.prompt) break;
        }
        const bool test = test_prompts.count(pi) > 0;
        ds.splits.emplace_back(row.motion_id, test ? "test" : "train");
    }
    return ds;
}

/// The fixed desk-scale benchmark: 4 base families x 5 prompts each with
/// mixed corruption, 8 motions per prompt.
inline SynthSpec benchmark_spec() {
    SynthSpec spec;
    static const std::vector<std::string> bases = {"walk", "jump", "idle", "squat"};
    for (const std::string& base : bases) {
        for (int k = 0; k < 5; ++k) {
            char label[32];
            std::snprintf(label, sizeof(label), "%s%02d", base.c_str(), k);
            spec.prompts.push_back(PromptSpec{label, base, "mixed"});
        }
    }
    spec.motions_per_prompt = 8;
    spec.fps = 30.0;
    spec.duration_s = 2.0;
    return spec;
}

}  // namespace mofi
