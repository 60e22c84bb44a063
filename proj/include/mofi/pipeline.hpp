#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mofi/annotator.hpp"
#include "mofi/correlation.hpp"
#include "mofi/csv.hpp"
#include "mofi/io.hpp"
#include "mofi/physics_metrics.hpp"
#include "mofi/pose_metrics.hpp"
#include "mofi/scorer.hpp"
#include "mofi/synth.hpp"

namespace mofi {

namespace fs = std::filesystem;

// Top-level run configuration; a single JSON document, CLI flags override.
struct RunConfig {
    std::string dataset_dir;
    std::string output_dir;
    SynthSpec synth = benchmark_spec();
    ProjectionConfig annotator;
    PhysicsHeuristicConfig physics;
    TrainingConfig training;
    std::string report_format = "markdown";  // csv | markdown
};

inline RunConfig run_config_from_json(const json& j) {
    RunConfig cfg;
    if (j.contains("dataset_dir")) cfg.dataset_dir = j["dataset_dir"].get<std::string>();
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("report_format")) cfg.report_format = j["report_format"].get<std::string>();
    if (j.contains("synth")) {
        const json& s = j["synth"];
        if (s.contains("prompts")) {
            cfg.synth.prompts.clear();
            for (const json& p : s["prompts"]) {
                cfg.synth.prompts.push_back(PromptSpec{p.at("label").get<std::string>(),
                                                       p.at("base_family").get<std::string>(),
                                                       p.at("corruption").get<std::string>()});
            }
        }
        if (s.contains("motions_per_prompt")) cfg.synth.motions_per_prompt = s["motions_per_prompt"].get<int>();
        if (s.contains("fps")) cfg.synth.fps = s["fps"].get<double>();
        if (s.contains("duration_s")) cfg.synth.duration_s = s["duration_s"].get<double>();
    }
    if (j.contains("annotator")) {
        const json& a = j["annotator"];
        if (a.contains("max_iterations")) cfg.annotator.max_iterations = a["max_iterations"].get<int>();
        if (a.contains("step_size")) cfg.annotator.step_size = a["step_size"].get<double>();
        if (a.contains("constraint_tolerance_m")) cfg.annotator.constraint_tolerance_m = a["constraint_tolerance_m"].get<double>();
        if (a.contains("max_joint_speed_mps")) cfg.annotator.max_joint_speed_mps = a["max_joint_speed_mps"].get<double>();
        if (a.contains("smoothness_weight")) cfg.annotator.smoothness_weight = a["smoothness_weight"].get<double>();
        if (a.contains("contact_height_m")) cfg.annotator.contact_height_m = a["contact_height_m"].get<double>();
    }
    if (j.contains("physics_heuristics")) {
        const json& p = j["physics_heuristics"];
        if (p.contains("contact_height_m")) cfg.physics.contact_height_m = p["contact_height_m"].get<double>();
        if (p.contains("float_tolerance_m")) cfg.physics.float_tolerance_m = p["float_tolerance_m"].get<double>();
        if (p.contains("penetration_tolerance_m")) cfg.physics.penetration_tolerance_m = p["penetration_tolerance_m"].get<double>();
    }
    if (j.contains("training")) {
        const json& t = j["training"];
        if (t.contains("epochs")) cfg.training.epochs = t["epochs"].get<int>();
        if (t.contains("batch_size")) cfg.training.batch_size = t["batch_size"].get<int>();
        if (t.contains("learning_rate")) cfg.training.learning_rate = t["learning_rate"].get<double>();
        if (t.contains("lr_decay_per_epoch")) cfg.training.lr_decay_per_epoch = t["lr_decay_per_epoch"].get<double>();
        if (t.contains("lambda")) cfg.training.lambda = t["lambda"].get<double>();
        if (t.contains("weight_decay")) cfg.training.weight_decay = t["weight_decay"].get<double>();
        if (t.contains("prompt_categorized")) cfg.training.prompt_categorized = t["prompt_categorized"].get<bool>();
        if (t.contains("loss_mode")) {
            const std::string mode = t["loss_mode"].get<std::string>();
            if (mode == "pearson") {
                cfg.training.loss_mode = LossMode::Pearson;
            } else if (mode == "mse") {
                cfg.training.loss_mode = LossMode::Mse;
            } else {
                throw ConfigError("training.loss_mode must be 'pearson' or 'mse'");
            }
        }
        if (t.contains("hidden_sizes")) cfg.training.hidden_sizes = t["hidden_sizes"].get<std::vector<int>>();
    }
    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    return run_config_from_json(detail::read_json_file(path));
}

// ---------------------------------------------------------------------------
// Dataset on disk
// ---------------------------------------------------------------------------

inline void write_dataset(const SynthDataset& ds, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(fs::path(dir) / "motions", ec);
    fs::create_directories(fs::path(dir) / "bases", ec);
    if (ec) throw IoError("cannot create dataset directory " + dir);
    save_skeleton(ds.skeleton, (fs::path(dir) / "skeleton.json").string());
    for (const auto& [id, motion] : ds.motions) {
        save_motion(motion, (fs::path(dir) / "motions" / (id + ".json")).string());
    }
    for (const auto& [id, motion] : ds.bases) {
        save_motion(motion, (fs::path(dir) / "bases" / (id + ".json")).string());
    }
    std::vector<std::string> pair_lines{"better_id,worse_id,prompt"};
    for (const MotionPair& p : ds.pairs) {
        pair_lines.push_back(p.better_id + "," + p.worse_id + "," + p.prompt);
    }
    write_lines((fs::path(dir) / "pairs.csv").string(), pair_lines);

    std::vector<std::string> manifest_lines{"motion_id,prompt,family,severity,magnitude"};
    for (const ManifestRow& r : ds.manifest) {
        manifest_lines.push_back(r.motion_id + "," + r.prompt + "," + r.family + "," +
                                 std::to_string(r.severity) + "," + format_full(r.magnitude));
    }
    write_lines((fs::path(dir) / "manifest.csv").string(), manifest_lines);

    std::vector<std::string> split_lines{"motion_id,split"};
    for (const auto& [id, split] : ds.splits) split_lines.push_back(id + "," + split);
    write_lines((fs::path(dir) / "splits.csv").string(), split_lines);
}

struct DatasetOnDisk {
    Skeleton skeleton;
    std::vector<std::pair<std::string, MotionSequence>> motions;
    std::vector<std::pair<std::string, MotionSequence>> bases;  // may be empty
    std::vector<MotionPair> pairs;
    std::vector<ManifestRow> manifest;
    std::map<std::string, std::string> split_of;  // empty when no splits.csv
    std::map<std::string, std::string> prompt_of;
    std::map<std::string, std::string> family_of_prompt;  // prompt -> base family prefix
};

inline DatasetOnDisk load_dataset(const std::string& dir) {
    if (!fs::exists(fs::path(dir) / "manifest.csv")) {
        throw ConfigError("dataset directory has no manifest.csv: " + dir);
    }
    DatasetOnDisk ds;
    ds.skeleton = load_skeleton((fs::path(dir) / "skeleton.json").string());
    const auto manifest = read_csv((fs::path(dir) / "manifest.csv").string());
    if (manifest.size() < 2) throw ConfigError("dataset manifest is empty: " + dir);
    for (std::size_t i = 1; i < manifest.size(); ++i) {
        const auto& row = manifest[i];
        if (row.size() != 5) throw SchemaError("manifest row must have 5 columns");
        ManifestRow r;
        r.motion_id = row[0];
        r.prompt = row[1];
        r.family = row[2];
        r.severity = std::stoi(row[3]);
        r.magnitude = std::stod(row[4]);
        ds.manifest.push_back(r);
        ds.prompt_of[r.motion_id] = r.prompt;
    }
    std::sort(ds.manifest.begin(), ds.manifest.end(),
              [](const ManifestRow& a, const ManifestRow& b) { return a.motion_id < b.motion_id; });
    for (const ManifestRow& r : ds.manifest) {
        ds.motions.emplace_back(
            r.motion_id, load_motion((fs::path(dir) / "motions" / (r.motion_id + ".json")).string()));
        const fs::path base_path = fs::path(dir) / "bases" / (r.motion_id + ".json");
        if (fs::exists(base_path)) {
            ds.bases.emplace_back(r.motion_id, load_motion(base_path.string()));
        }
        // Base family is the prompt label minus its numeric suffix.
        std::string family = r.prompt;
        while (!family.empty() && std::isdigit(static_cast<unsigned char>(family.back()))) {
            family.pop_back();
        }
        ds.family_of_prompt[r.prompt] = family.empty() ? r.prompt : family;
    }
    if (fs::exists(fs::path(dir) / "pairs.csv")) {
        const auto pairs = read_csv((fs::path(dir) / "pairs.csv").string());
        for (std::size_t i = 1; i < pairs.size(); ++i) {
            if (pairs[i].size() != 3) throw SchemaError("pairs row must have 3 columns");
            ds.pairs.push_back(MotionPair{pairs[i][0], pairs[i][1], pairs[i][2]});
        }
    }
    if (fs::exists(fs::path(dir) / "splits.csv")) {
        const auto splits = read_csv((fs::path(dir) / "splits.csv").string());
        for (std::size_t i = 1; i < splits.size(); ++i) {
            if (splits[i].size() != 2) throw SchemaError("splits row must have 2 columns");
            ds.split_of[splits[i][0]] = splits[i][1];
        }
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Pipeline stages
// ---------------------------------------------------------------------------

inline void ensure_output_dir(const RunConfig& cfg) {
    if (cfg.output_dir.empty()) throw ConfigError("output_dir not set");
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.output_dir);
}

inline void run_synth(const RunConfig& cfg, std::uint64_t seed) {
    if (cfg.dataset_dir.empty()) throw ConfigError("dataset_dir not set");
    write_dataset(synth_generate(cfg.synth, seed), cfg.dataset_dir);
}

/// Projects every motion, writes annotations.csv
/// (motion_id,e_p_raw,physical_score,converged) and returns the annotations.
inline std::vector<PhysicalAnnotation> run_annotate(const RunConfig& cfg) {
    ensure_output_dir(cfg);
    const DatasetOnDisk ds = load_dataset(cfg.dataset_dir);
    const std::vector<PhysicalAnnotation> annotations =
        annotate_dataset(ds.motions, ds.skeleton, cfg.annotator);
    std::vector<std::string> lines{"motion_id,e_p_raw,physical_score,converged"};
    for (const PhysicalAnnotation& a : annotations) {
        lines.push_back(a.motion_id + "," + format_full(a.e_p_raw) + "," +
                        format_full(a.physical_score) + "," + (a.converged ? "true" : "false"));
    }
    write_lines((fs::path(cfg.output_dir) / "annotations.csv").string(), lines);
    return annotations;
}

inline std::map<std::string, PhysicalAnnotation> load_annotations(const std::string& path) {
    if (!fs::exists(path)) throw ConfigError("annotations file missing: " + path);
    std::map<std::string, PhysicalAnnotation> out;
    const auto rows = read_csv(path);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 4) throw SchemaError("annotation row must have 4 columns");
        PhysicalAnnotation a;
        a.motion_id = rows[i][0];
        a.e_p_raw = std::stod(rows[i][1]);
        a.physical_score = std::stod(rows[i][2]);
        a.converged = rows[i][3] == "true";
        out[a.motion_id] = a;
    }
    return out;
}

/// Trains the scorer on the train split and writes model.json plus
/// training_log.csv. Returns the trained model.
inline ScorerModel run_train(const RunConfig& cfg, std::uint64_t seed) {
    ensure_output_dir(cfg);
    const DatasetOnDisk ds = load_dataset(cfg.dataset_dir);
    const auto annotations =
        load_annotations((fs::path(cfg.output_dir) / "annotations.csv").string());

    auto in_train = [&](const std::string& id) {
        const auto it = ds.split_of.find(id);
        return it == ds.split_of.end() || it->second == "train";
    };
    std::vector<TrainingSample> samples;
    std::set<std::string> train_ids;
    for (const auto& [id, motion] : ds.motions) {
        if (!in_train(id)) continue;
        const auto a = annotations.find(id);
        if (a == annotations.end()) throw ConfigError("no annotation for motion " + id);
        TrainingSample s;
        s.id = id;
        s.prompt = ds.prompt_of.at(id);
        s.features = extract_features(motion, ds.skeleton);
        s.target = a->second.physical_score;
        samples.push_back(std::move(s));
        train_ids.insert(id);
    }
    std::vector<MotionPair> train_pairs;
    for (const MotionPair& p : ds.pairs) {
        if (train_ids.count(p.better_id) && train_ids.count(p.worse_id)) train_pairs.push_back(p);
    }

    TrainingConfig tcfg = cfg.training;
    tcfg.seed = seed;
    const TrainResult result = train_scorer(samples, train_pairs, tcfg);

    detail::write_text_file((fs::path(cfg.output_dir) / "model.json").string(),
                            scorer_to_json(result.model).dump(2) + "\n");
    std::vector<std::string> log_lines{"epoch,total,perceptual,correlation,lr"};
    for (const TrainingLogRow& r : result.log) {
        log_lines.push_back(std::to_string(r.epoch) + "," + format_full(r.total) + "," +
                            format_full(r.perceptual) + "," + format_full(r.correlation) + "," +
                            format_full(r.lr));
    }
    write_lines((fs::path(cfg.output_dir) / "training_log.csv").string(), log_lines);
    detail::write_text_file(
        (fs::path(cfg.output_dir) / "training_summary.json").string(),
        json{{"epochs", static_cast<int>(result.log.size())},
             {"final_train_plcc", result.final_train_plcc},
             {"final_train_accuracy", result.final_train_accuracy}}
                .dump(2) +
            "\n");
    return result.model;
}

// Registered rule-based score sources. Heuristic and error metrics are
// negated so that higher always means better, matching the scorer convention.
inline const std::vector<std::string>& metric_source_names() {
    static const std::vector<std::string> names = {"root_ave",    "root_ae",  "joint_ave",
                                                   "joint_ae",    "pfc",      "penetration",
                                                   "skating",     "floating"};
    return names;
}

inline std::map<std::string, double> metric_scores(const DatasetOnDisk& ds,
                                                   const std::string& source,
                                                   const PhysicsHeuristicConfig& physics) {
    std::map<std::string, double> scores;
    const bool needs_base = source == "root_ave" || source == "root_ae" ||
                            source == "joint_ave" || source == "joint_ae";
    std::map<std::string, const MotionSequence*> base_of;
    for (const auto& [id, m] : ds.bases) base_of[id] = &m;
    for (const auto& [id, motion] : ds.motions) {
        double value = 0.0;
        if (needs_base) {
            const auto b = base_of.find(id);
            if (b == base_of.end()) {
                throw ConfigError("metric source '" + source + "' needs bases/ references");
            }
            const JointScope scope = (source == "root_ave" || source == "root_ae")
                                         ? JointScope::RootOnly
                                         : JointScope::AllJoints;
            const auto [ae, ave] = ae_ave(motion, *b->second, scope, ds.skeleton.root_index);
            value = (source == "root_ae" || source == "joint_ae") ? ae : ave;
        } else if (source == "penetration") {
            value = penetration(motion, physics);
        } else if (source == "skating") {
            value = skating(motion, ds.skeleton, physics);
        } else if (source == "floating") {
            value = floating(motion, physics);
        } else if (source == "pfc") {
            value = pfc(motion, ds.skeleton);
        } else {
            throw ConfigError("unknown score source: " + source);
        }
        scores[id] = -value;  // lower error = better motion = higher score
    }
    return scores;
}

enum class EvalSplit { All, Train, Test };

inline EvalSplit eval_split_from_string(const std::string& s) {
    if (s == "all") return EvalSplit::All;
    if (s == "train") return EvalSplit::Train;
    if (s == "test") return EvalSplit::Test;
    throw ConfigError("split must be all|train|test");
}

/// Correlation report of a score source (model file or metric name) against
/// the physical annotations, plus pairwise accuracy on the perceptual pairs.
inline CorrelationReport run_eval(const RunConfig& cfg, const std::string& source,
                                  EvalSplit split = EvalSplit::All,
                                  std::string* wrote_basename = nullptr) {
    ensure_output_dir(cfg);
    const DatasetOnDisk ds = load_dataset(cfg.dataset_dir);
    const auto annotations =
        load_annotations((fs::path(cfg.output_dir) / "annotations.csv").string());

    auto in_split = [&](const std::string& id) {
        if (split == EvalSplit::All) return true;
        const auto it = ds.split_of.find(id);
        const std::string want = split == EvalSplit::Train ? "train" : "test";
        return it != ds.split_of.end() && it->second == want;
    };

    std::map<std::string, double> scores;
    std::string source_label = source;
    if (source.size() > 5 && source.substr(source.size() - 5) == ".json") {
        const ScorerModel model = scorer_from_json(detail::read_json_file(source));
        for (const auto& [id, motion] : ds.motions) {
            if (in_split(id)) {
                scores[id] = model.forward(extract_features(motion, ds.skeleton, model.feature_config));
            }
        }
        source_label = "scorer";
    } else {
        for (const auto& [id, value] : metric_scores(ds, source, cfg.physics)) {
            if (in_split(id)) scores[id] = value;
        }
    }

    std::map<std::string, double> targets;
    for (const auto& [id, a] : annotations) {
        if (in_split(id)) targets[id] = a.physical_score;
    }
    std::vector<MotionPair> pairs;
    for (const MotionPair& p : ds.pairs) {
        if (in_split(p.better_id) && in_split(p.worse_id)) pairs.push_back(p);
    }

    const CorrelationReport report =
        build_correlation_report(scores, targets, ds.prompt_of, ds.family_of_prompt, pairs);
    const std::string base = "correlation_" + source_label;
    write_lines((fs::path(cfg.output_dir) / (base + ".csv")).string(),
                correlation_report_csv(report));
    write_lines((fs::path(cfg.output_dir) / (base + ".md")).string(),
                correlation_report_markdown(report));
    if (wrote_basename) *wrote_basename = base;
    return report;
}

/// Combined report: per-motion pose metrics against the base references,
/// per-motion physics heuristics, and a summary table with one row per score
/// source (Accuracy / PLCC / SROCC / KROCC totals). Missing inputs become
/// explicit n/a cells rather than failures.
inline std::string run_report(const RunConfig& cfg, EvalSplit split = EvalSplit::All) {
    ensure_output_dir(cfg);
    const DatasetOnDisk ds = load_dataset(cfg.dataset_dir);

    auto in_split = [&](const std::string& id) {
        if (split == EvalSplit::All) return true;
        const auto it = ds.split_of.find(id);
        const std::string want = split == EvalSplit::Train ? "train" : "test";
        return it != ds.split_of.end() && it->second == want;
    };

    auto fixed = [](double v, int digits = 3) {
        if (std::isnan(v)) return std::string("n/a");
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
        return std::string(buf);
    };

    std::vector<std::string> md;
    md.push_back("# Motion fidelity report");
    md.push_back("");
    md.push_back("Heuristic definitions: penetration = mean max(0, -min_z - tol_pen); floating = "
                 "mean max(0, min_z - tol_float); skating = mean horizontal foot speed below the "
                 "contact height; PFC = normalized mean of |COM xy accel| * |v_left| * |v_right|. "
                 "Pose errors are measured against the clean base references. Rule-based score "
                 "sources are negated (higher = better) before correlation.");
    md.push_back("");

    // Pose metrics vs base references.
    md.push_back("## Pose metrics vs. reference");
    md.push_back("");
    if (ds.bases.empty()) {
        md.push_back("n/a (no bases/ directory in the dataset)");
    } else {
        std::map<std::string, const MotionSequence*> base_of;
        for (const auto& [id, m] : ds.bases) base_of[id] = &m;
        md.push_back("| motion | recon_err_mm | mpjpe_mm | pa_mpjpe_mm | e_acc | e_vel | root_ae | "
                     "root_ave | joint_ae | joint_ave |");
        md.push_back("|---|---|---|---|---|---|---|---|---|---|");
        std::vector<std::string> csv_lines{
            "motion_id,recon_err_mm,mpjpe_mm,pa_mpjpe_mm,e_acc,e_vel,root_ae,root_ave,joint_ae,joint_ave"};
        for (const auto& [id, motion] : ds.motions) {
            if (!in_split(id)) continue;
            const auto b = base_of.find(id);
            if (b == base_of.end()) continue;
            const PoseMetricReport r = compute_pose_metrics(motion, *b->second, ds.skeleton.root_index);
            md.push_back("| " + id + " | " + fixed(r.recon_err_mm) + " | " + fixed(r.mpjpe_mm) +
                         " | " + fixed(r.pa_mpjpe_mm) + " | " + fixed(r.e_acc) + " | " +
                         fixed(r.e_vel) + " | " + fixed(r.root_ae, 4) + " | " + fixed(r.root_ave, 4) +
                         " | " + fixed(r.joint_ae, 4) + " | " + fixed(r.joint_ave, 4) + " |");
            csv_lines.push_back(id + "," + format_full(r.recon_err_mm) + "," +
                                format_full(r.mpjpe_mm) + "," + format_full(r.pa_mpjpe_mm) + "," +
                                format_full(r.e_acc) + "," + format_full(r.e_vel) + "," +
                                format_full(r.root_ae) + "," + format_full(r.root_ave) + "," +
                                format_full(r.joint_ae) + "," + format_full(r.joint_ave));
        }
        write_lines((fs::path(cfg.output_dir) / "pose_metrics.csv").string(), csv_lines);
    }
    md.push_back("");

    // Physics heuristics per motion.
    md.push_back("## Physics heuristics");
    md.push_back("");
    md.push_back("| motion | penetration_m | skate_m_per_s | float_m | pfc |");
    md.push_back("|---|---|---|---|---|");
    std::vector<std::string> phys_lines{"motion_id,penetration_m,skate_m_per_s,float_m,pfc"};
    for (const auto& [id, motion] : ds.motions) {
        if (!in_split(id)) continue;
        const PhysicsHeuristicReport r = compute_physics_report(motion, ds.skeleton, cfg.physics);
        md.push_back("| " + id + " | " + fixed(r.penetration_m, 4) + " | " +
                     fixed(r.skate_m_per_s, 4) + " | " + fixed(r.float_m, 4) + " | " +
                     fixed(r.pfc, 4) + " |");
        phys_lines.push_back(id + "," + format_full(r.penetration_m) + "," +
                             format_full(r.skate_m_per_s) + "," + format_full(r.float_m) + "," +
                             format_full(r.pfc));
    }
    write_lines((fs::path(cfg.output_dir) / "physics_metrics.csv").string(), phys_lines);
    md.push_back("");

    // Summary: one row per score source, totals only.
    md.push_back("## Correlation with physical annotations");
    md.push_back("");
    md.push_back("| metric | Accuracy | PLCC | SROCC | KROCC |");
    md.push_back("|---|---|---|---|---|");
    const bool have_annotations =
        fs::exists(fs::path(cfg.output_dir) / "annotations.csv");
    std::vector<std::string> sources = metric_source_names();
    const std::string model_path = (fs::path(cfg.output_dir) / "model.json").string();
    if (fs::exists(model_path)) sources.push_back(model_path);
    for (const std::string& source : sources) {
        std::string name = source == model_path ? "scorer (trained)" : source;
        if (!have_annotations) {
            md.push_back("| " + name + " | n/a | n/a | n/a | n/a |");
            continue;
        }
        try {
            const CorrelationReport r = run_eval(cfg, source, split);
            md.push_back("| " + name + " | " + fixed(r.pairwise_accuracy) + " | " +
                         fixed(r.total.plcc) + " | " + fixed(r.total.srocc) + " | " +
                         fixed(r.total.krocc) + " |");
        } catch (const Error&) {
            md.push_back("| " + name + " | n/a | n/a | n/a | n/a |");
        }
    }
    md.push_back("");

    const std::string out_path =
        (fs::path(cfg.output_dir) /
         (cfg.report_format == "csv" ? "report.csv" : "report.md"))
            .string();
    if (cfg.report_format == "csv") {
        // The same content in CSV form: strip markdown table decoration.
        std::vector<std::string> csv;
        for (const std::string& line : md) {
            if (line.rfind("|---", 0) == 0) continue;
            if (!line.empty() && line.front() == '|') {
                std::string row = line.substr(1, line.size() - 2);
                std::string cell;
                std::string out_row;
                std::stringstream ss(row);
                while (std::getline(ss, cell, '|')) {
                    const std::size_t a = cell.find_first_not_of(' ');
                    const std::size_t b = cell.find_last_not_of(' ');
                    out_row += (a == std::string::npos ? "" : cell.substr(a, b - a + 1));
                    out_row += ",";
                }
                if (!out_row.empty()) out_row.pop_back();
                csv.push_back(out_row);
            } else {
                csv.push_back(line.empty() ? "" : "# " + line);
            }
        }
        write_lines(out_path, csv);
    } else {
        write_lines(out_path, md);
    }
    return out_path;
}

}  // namespace mofi
