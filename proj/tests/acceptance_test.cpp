// Acceptance suite: one test per release criterion, each printing a single
// PASS/FAIL line. Tolerances are pinned in code; see the README for the
// criterion list.

#include <gtest/gtest.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mofi/pipeline.hpp"
#include "oracles.hpp"

using namespace mofi;
namespace fs = std::filesystem;

namespace {

struct CriterionReporter {
    int number;
    std::string label;
    bool pass = true;
    std::string detail;

    CriterionReporter(int n, std::string l) : number(n), label(std::move(l)) {}
    ~CriterionReporter() {
        std::printf("[CRITERION %2d] %s - %s%s%s\n", number, pass ? "PASS" : "FAIL", label.c_str(),
                    detail.empty() ? "" : ": ", detail.c_str());
        std::fflush(stdout);
    }
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
        EXPECT_TRUE(ok) << what;
    }
};

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "mofi_acceptance" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Benchmark seed set, fixed for criteria 9 and 10.
const std::vector<std::uint64_t> kBenchmarkSeeds = {1, 2, 3, 4, 5};

struct BenchmarkRun {
    CorrelationReport pearson;
    CorrelationReport mse;
    CorrelationReport mixed;
    std::map<std::string, CorrelationReport> heuristics;
    double train_eval_seconds = 0.0;
};

BenchmarkRun run_benchmark_seed(std::uint64_t seed) {
    const fs::path root = fresh_dir("benchmark_" + std::to_string(seed));
    RunConfig cfg;
    cfg.dataset_dir = (root / "data").string();
    cfg.output_dir = (root / "out").string();

    const auto t0 = std::chrono::steady_clock::now();
    run_synth(cfg, seed);
    run_annotate(cfg);
    run_train(cfg, seed);
    BenchmarkRun out;
    out.pearson = run_eval(cfg, (fs::path(cfg.output_dir) / "model.json").string(), EvalSplit::Test);
    out.train_eval_seconds = elapsed_s(t0);

    for (const std::string name : {"pfc", "penetration", "skating", "floating"}) {
        out.heuristics[name] = run_eval(cfg, name, EvalSplit::Test);
    }

    auto variant = [&](const char* sub, auto mutate) {
        RunConfig v = cfg;
        v.output_dir = (root / sub).string();
        fs::create_directories(v.output_dir);
        fs::copy_file(fs::path(cfg.output_dir) / "annotations.csv",
                      fs::path(v.output_dir) / "annotations.csv",
                      fs::copy_options::overwrite_existing);
        mutate(v);
        run_train(v, seed);
        return run_eval(v, (fs::path(v.output_dir) / "model.json").string(), EvalSplit::Test);
    };
    out.mse = variant("mse", [](RunConfig& v) { v.training.loss_mode = LossMode::Mse; });
    out.mixed = variant("mixed", [](RunConfig& v) { v.training.prompt_categorized = false; });
    return out;
}

}  // namespace

TEST(Acceptance, Criterion1_CorrelationOracleEquivalence) {
    CriterionReporter c(1, "PLCC/SROCC/KROCC match brute-force oracles within 1e-10 on 1000 pairs");
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(1001);
    int checked = 0;
    double worst = 0.0;
    while (checked < 1000) {
        const int n = rng.uniform_int(2, 200);
        const bool with_ties = checked % 2 == 0;
        std::vector<double> a(n), b(n);
        for (int i = 0; i < n; ++i) {
            a[i] = with_ties ? static_cast<double>(rng.uniform_int(0, 7)) : rng.normal();
            b[i] = with_ties ? static_cast<double>(rng.uniform_int(0, 7)) : rng.normal();
        }
        bool constant_a = true, constant_b = true;
        for (int i = 1; i < n; ++i) {
            constant_a = constant_a && a[i] == a[0];
            constant_b = constant_b && b[i] == b[0];
        }
        if (constant_a || constant_b) continue;  // coefficients undefined
        ++checked;
        worst = std::max(worst, std::abs(plcc(a, b) - oracle::plcc(a, b)));
        worst = std::max(worst, std::abs(srocc(a, b) - oracle::srocc(a, b)));
        worst = std::max(worst, std::abs(krocc(a, b) - oracle::krocc(a, b)));
    }
    const double secs = elapsed_s(t0);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "max |impl - oracle| = %.3g, %.2fs", worst, secs);
    c.detail = buf;
    c.require(worst < 1e-10, "oracle deviation exceeds 1e-10");
    c.require(secs < 10.0, "runtime exceeds 10 s");
}

TEST(Acceptance, Criterion2_HandComputedAnchors) {
    CriterionReporter c(2, "plcc/srocc/krocc anchors on [1,2,3,4] vs [1,3,2,4]");
    const std::vector<double> a{1, 2, 3, 4}, b{1, 3, 2, 4};
    c.require(std::abs(plcc(a, b) - 0.8) < 1e-12, "plcc != 0.8");
    c.require(std::abs(srocc(a, b) - 0.8) < 1e-12, "srocc != 0.8");
    c.require(std::abs(krocc(a, b) - 2.0 / 3.0) < 1e-12, "krocc != 2/3");
}

TEST(Acceptance, Criterion3_GradientSuite) {
    CriterionReporter c(3, "analytic gradients pass central-difference checks at 100 points each");
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(1003);
    const double step = 1e-6;
    double worst = 0.0;

    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> point(8);
        for (double& v : point) v = rng.normal();
        auto fn = [](std::span<const double> x) {
            const std::size_t n = x.size() / 2;
            std::vector<double> hi(x.begin(), x.begin() + n), lo(x.begin() + n, x.end());
            return perceptual_loss(hi, lo);
        };
        worst = std::max(worst, grad_check(fn, point, step));
    }
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> pred(16), target(16);
        for (double& v : pred) v = rng.normal();
        for (double& v : target) v = rng.normal();
        auto fn = [&](std::span<const double> x) { return pearson_loss(x, target); };
        worst = std::max(worst, grad_check(fn, pred, step));
    }
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> scores(10), targets(10);
        for (double& v : scores) v = rng.normal();
        for (double& v : targets) v = rng.normal();
        const std::vector<std::pair<int, int>> pairs{{0, 1}, {2, 3}, {4, 5}, {6, 7}, {8, 9}};
        LossConfig lc;
        lc.lambda = 0.3;
        auto fn = [&](std::span<const double> x) { return total_loss(x, pairs, targets, lc); };
        worst = std::max(worst, grad_check(fn, scores, step));
    }
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> scores(6);
        for (double& v : scores) v = rng.normal();
        LossConfig lc;
        lc.tau = rng.normal();
        lc.critic_flipped = trial % 2 == 0;
        auto fn = [&](std::span<const double> x) { return critic_loss(x, lc); };
        worst = std::max(worst, grad_check(fn, scores, step));
    }
    const double secs = elapsed_s(t0);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "max relative error = %.3g, %.2fs", worst, secs);
    c.detail = buf;
    c.require(worst < 1e-5, "gradient check error exceeds 1e-5");
    c.require(secs < 30.0, "runtime exceeds 30 s");
}

TEST(Acceptance, Criterion4_LossAnchors) {
    CriterionReporter c(4, "perceptual zero-margin and Gaussian KL anchors");
    const LossValueAndGrad zero =
        perceptual_loss(std::vector<double>{0.7}, std::vector<double>{0.7});
    c.require(std::abs(zero.value - std::log(2.0)) < 1e-12, "zero margin != ln 2");
    c.require(std::abs(kl_loss(std::vector<double>{-1, 1}, std::vector<double>{0, 2}) - 0.5) <
                  1e-12,
              "KL(N(0,1)||N(1,1)) != 0.5");
    c.require(std::abs(kl_loss(std::vector<double>{-1, 1}, std::vector<double>{-2, 2}) -
                       (std::log(2.0) - 3.0 / 8.0)) < 1e-12,
              "KL(N(0,1)||N(0,4)) != ln2 - 3/8");
}

TEST(Acceptance, Criterion5_PoseMetricInvariances) {
    CriterionReporter c(5, "Procrustes and translation invariances of the pose metrics");
    Rng rng(1005);
    double worst_pa = 0.0;
    bool pa_le_mpjpe = true;
    for (int trial = 0; trial < 100; ++trial) {
        const MotionSequence gt = oracle::random_motion(rng, 3, 8);
        const Quat q = oracle::random_unit_quat(rng);
        const double scale = rng.uniform(0.5, 2.0);
        const Vec3 t(rng.normal(), rng.normal(), rng.normal());
        MotionSequence pred = gt;
        for (auto& f : pred.frames) {
            for (auto& p : f.positions) p = scale * (q * p) + t;
        }
        worst_pa = std::max(worst_pa, pa_mpjpe(pred, gt));
        pa_le_mpjpe = pa_le_mpjpe && pa_mpjpe(pred, gt) <= mpjpe(pred, gt) + 1e-9;
    }
    for (int trial = 0; trial < 100; ++trial) {
        const MotionSequence a = oracle::random_motion(rng, 3, 7);
        const MotionSequence b = oracle::random_motion(rng, 3, 7);
        pa_le_mpjpe = pa_le_mpjpe && pa_mpjpe(a, b) <= mpjpe(a, b) + 1e-9;
    }
    double worst_translation = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const MotionSequence gt = oracle::random_motion(rng, 4, 6);
        MotionSequence pred = gt;
        const Vec3 offset(rng.normal(), rng.normal(), rng.normal());
        for (auto& f : pred.frames) {
            for (auto& p : f.positions) p += offset;
        }
        worst_translation = std::max(worst_translation, mpjpe(pred, gt));
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "similarity pa_mpjpe max %.3g mm, translation mpjpe max %.3g mm",
                  worst_pa, worst_translation);
    c.detail = buf;
    c.require(worst_pa < 1e-8, "pa_mpjpe of similarity-transformed copy exceeds 1e-8");
    c.require(pa_le_mpjpe, "pa_mpjpe exceeded mpjpe");
    c.require(worst_translation < 1e-12, "mpjpe translation invariance violated");
}

TEST(Acceptance, Criterion6_ProjectionFeasibility) {
    CriterionReporter c(6, "projection feasibility and idempotence on 500 corrupted motions");
    const auto t0 = std::chrono::steady_clock::now();
    SynthSpec spec = benchmark_spec();
    spec.motions_per_prompt = 30;  // 25 corrupted motions per prompt
    const SynthDataset ds = synth_generate(spec, 1006);
    ProjectionConfig cfg;

    int corrupted = 0, feasible = 0;
    double worst_idempotence = 0.0;
    for (std::size_t i = 0; i < ds.motions.size(); ++i) {
        if (ds.manifest[i].severity == 0) continue;
        ++corrupted;
        const ProjectionResult first = project_to_physical(ds.motions[i].second, ds.skeleton, cfg);
        const FeasibilityReport fr = measure_feasibility(first.motion, ds.skeleton, cfg);
        if (first.converged && is_physically_feasible(fr, cfg, first.motion.fps)) {
            ++feasible;
            const ProjectionResult second = project_to_physical(first.motion, ds.skeleton, cfg);
            worst_idempotence =
                std::max(worst_idempotence, physical_error(first.motion, second.motion));
        }
    }
    const double secs = elapsed_s(t0);
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%d/%d feasible, idempotence max %.3g m, %.1fs", feasible,
                  corrupted, worst_idempotence, secs);
    c.detail = buf;
    c.require(corrupted == 500, "expected exactly 500 corrupted motions");
    c.require(feasible >= corrupted * 99 / 100, "fewer than 99% of projections feasible");
    c.require(worst_idempotence < 10.0 * cfg.constraint_tolerance_m,
              "reprojection moved by more than 10x tolerance");
    c.require(secs < 300.0, "runtime exceeds 5 min");
}

TEST(Acceptance, Criterion7_AnnotationFidelity) {
    CriterionReporter c(7, "levitation closed form, severity monotonicity, N(0,1) normalization");
    const Skeleton skel = default_skeleton();

    // Uniform levitation closed form with zero smoothness weight.
    SynthSpec base_spec;
    base_spec.prompts = {{"w", "walk", "none"}};
    base_spec.motions_per_prompt = 2;
    const MotionSequence base = synth_generate(base_spec, 1007).motions[0].second;
    MotionSequence floated = base;
    const double h = 0.10;
    for (auto& f : floated.frames) {
        for (auto& p : f.positions) p.z() += h;
    }
    ProjectionConfig no_smooth;
    no_smooth.smoothness_weight = 0.0;
    const ProjectionResult res = project_to_physical(floated, skel, no_smooth);
    const double expected =
        h * std::sqrt(static_cast<double>(base.joint_count()) * base.frame_count());
    const double e_p = physical_error(floated, res.motion);
    c.require(std::abs(e_p - expected) < 1e-6, "levitation e_p != h*sqrt(J*T)");

    // Per-family severity monotonicity of e_p (Spearman >= 0.9).
    for (const std::string family : {"float", "penetrate", "skate", "jitter", "teleport"}) {
        SynthSpec spec;
        spec.prompts = {{"w", "walk", family}, {"j", "jump", family}};
        spec.motions_per_prompt = 12;
        const SynthDataset ds = synth_generate(spec, 1008);
        std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_prompt;
        for (std::size_t i = 0; i < ds.motions.size(); ++i) {
            const ProjectionResult r = project_to_physical(ds.motions[i].second, skel,
                                                           ProjectionConfig{});
            by_prompt[ds.manifest[i].prompt].first.push_back(
                physical_error(ds.motions[i].second, r.motion));
            by_prompt[ds.manifest[i].prompt].second.push_back(
                static_cast<double>(ds.manifest[i].severity));
        }
        for (const auto& [prompt, vecs] : by_prompt) {
            const double rho = srocc(vecs.first, vecs.second);
            c.require(rho >= 0.9, family + "/" + prompt + " Spearman(e_p, severity) = " +
                                      std::to_string(rho) + " < 0.9");
        }
    }

    // Normalized population statistics.
    const fs::path root = fresh_dir("criterion7");
    RunConfig cfg;
    cfg.dataset_dir = (root / "data").string();
    cfg.output_dir = (root / "out").string();
    run_synth(cfg, 1009);
    const std::vector<PhysicalAnnotation> annotations = run_annotate(cfg);
    double mean = 0.0;
    for (const auto& a : annotations) mean += a.physical_score;
    mean /= annotations.size();
    double var = 0.0;
    for (const auto& a : annotations) var += (a.physical_score - mean) * (a.physical_score - mean);
    var /= annotations.size();
    c.require(std::abs(mean) < 1e-9, "normalized scores mean off 0 by more than 1e-9");
    c.require(std::abs(std::sqrt(var) - 1.0) < 1e-9, "normalized scores std off 1 by more than 1e-9");
}

TEST(Acceptance, Criterion8_RewardAnchor) {
    CriterionReporter c(8, "imitation reward identity and 0.01 m position anchor");
    Rng rng(1010);
    const MotionSequence x = oracle::random_motion(rng, 6, 4);
    const RewardSeries identity = imitation_reward(x, x, RewardWeights{});
    c.require(identity.mean == 1.0, "imitation_reward(x, x) != 1 exactly");

    const MotionSequence still = oracle::static_motion(6, 4);
    MotionSequence offset = still;
    for (auto& f : offset.frames) {
        for (auto& p : f.positions) p.x() += 0.01;
    }
    const RewardSeries anchored = imitation_reward(still, offset, RewardWeights{});
    c.require(std::abs(anchored.mean - (0.25 * std::exp(-1.0) + 0.75)) < 1e-12,
              "0.01 m anchor != 0.25*e^-1 + 0.75");
}

TEST(Acceptance, Criterion9_TrainingBenchmark) {
    CriterionReporter c(9, "trained scorer: held-out Total PLCC >= 0.8, accuracy >= 0.9, "
                           "dominates rule-based heuristics on 5 seeds");
    std::string summary;
    for (std::uint64_t seed : kBenchmarkSeeds) {
        const BenchmarkRun run = run_benchmark_seed(seed);
        char buf[96];
        std::snprintf(buf, sizeof(buf), "seed %llu: PLCC %.3f acc %.2f [%.0fs] ",
                      static_cast<unsigned long long>(seed), run.pearson.total.plcc,
                      run.pearson.pairwise_accuracy, run.train_eval_seconds);
        summary += buf;
        c.require(run.pearson.total.plcc >= 0.8,
                  "seed " + std::to_string(seed) + ": held-out Total PLCC < 0.8");
        c.require(run.pearson.pairwise_accuracy >= 0.9,
                  "seed " + std::to_string(seed) + ": pairwise accuracy < 0.9");
        for (const auto& [name, report] : run.heuristics) {
            // A heuristic with undefined (degenerate) PLCC cannot dominate.
            if (std::isnan(report.total.plcc)) continue;
            c.require(run.pearson.total.plcc > report.total.plcc,
                      "seed " + std::to_string(seed) + ": scorer PLCC does not exceed " + name);
        }
        c.require(run.train_eval_seconds < 300.0,
                  "seed " + std::to_string(seed) + ": runtime exceeds 5 min");
    }
    if (c.pass) c.detail = summary;
}

TEST(Acceptance, Criterion10_AblationBenchmark) {
    CriterionReporter c(10, "Pearson beats MSE on held-out SROCC/KROCC and prompt-categorized "
                            "beats mixed batching on held-out PLCC, each on >= 4 of 5 seeds");
    int srocc_wins = 0, krocc_wins = 0, categorized_wins = 0;
    std::string margins;
    for (std::uint64_t seed : kBenchmarkSeeds) {
        const BenchmarkRun run = run_benchmark_seed(seed);
        srocc_wins += run.pearson.total.srocc > run.mse.total.srocc;
        krocc_wins += run.pearson.total.krocc > run.mse.total.krocc;
        categorized_wins += run.pearson.total.plcc > run.mixed.total.plcc;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "seed %llu dSROCC %+0.3f dKROCC %+0.3f dPLCC %+0.3f; ",
                      static_cast<unsigned long long>(seed),
                      run.pearson.total.srocc - run.mse.total.srocc,
                      run.pearson.total.krocc - run.mse.total.krocc,
                      run.pearson.total.plcc - run.mixed.total.plcc);
        margins += buf;
    }
    char buf[512];
    std::snprintf(buf, sizeof(buf), "pearson>mse srocc %d/5 krocc %d/5; categorized>mixed %d/5 (%s)",
                  srocc_wins, krocc_wins, categorized_wins, margins.c_str());
    c.detail = buf;
    c.require(srocc_wins >= 4, "pearson did not beat mse on SROCC on >= 4 of 5 seeds");
    c.require(krocc_wins >= 4, "pearson did not beat mse on KROCC on >= 4 of 5 seeds");
    c.require(categorized_wins >= 4,
              "prompt-categorized did not beat mixed batching on PLCC on >= 4 of 5 seeds");
}

TEST(Acceptance, Criterion11_PipelineDeterminism) {
    CriterionReporter c(11, "full pipeline produces byte-identical artifacts across two runs");
    std::vector<fs::path> roots;
    for (int run = 0; run < 2; ++run) {
        const fs::path root = fresh_dir("determinism_" + std::to_string(run));
        RunConfig cfg;
        cfg.dataset_dir = (root / "data").string();
        cfg.output_dir = (root / "out").string();
        run_synth(cfg, 7);
        run_annotate(cfg);
        run_train(cfg, 7);
        run_eval(cfg, (fs::path(cfg.output_dir) / "model.json").string(), EvalSplit::Test);
        run_eval(cfg, "floating", EvalSplit::Test);
        run_report(cfg);
        roots.push_back(root);
    }
    std::vector<std::string> rel_a, rel_b;
    for (const auto& e : fs::recursive_directory_iterator(roots[0])) {
        if (e.is_regular_file()) rel_a.push_back(fs::relative(e.path(), roots[0]).string());
    }
    for (const auto& e : fs::recursive_directory_iterator(roots[1])) {
        if (e.is_regular_file()) rel_b.push_back(fs::relative(e.path(), roots[1]).string());
    }
    std::sort(rel_a.begin(), rel_a.end());
    std::sort(rel_b.begin(), rel_b.end());
    c.require(rel_a == rel_b, "artifact file lists differ");
    std::size_t mismatches = 0;
    for (const std::string& rel : rel_a) {
        if (read_file(roots[0] / rel) != read_file(roots[1] / rel)) ++mismatches;
    }
    c.require(mismatches == 0, std::to_string(mismatches) + " files differ between runs");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%zu artifacts compared", rel_a.size());
    if (c.pass) c.detail = buf;
}
