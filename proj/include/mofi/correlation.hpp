#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mofi/csv.hpp"
#include "mofi/errors.hpp"

namespace mofi {

// Scores for a set of motions, with a parallel id list.
struct ScoreVector {
    std::vector<std::string> ids;
    std::vector<double> values;
};

// A human/synthetic preference pair: `better_id` was judged the better motion.
struct MotionPair {
    std::string better_id;
    std::string worse_id;
    std::string prompt;
};

namespace detail {

inline bool all_equal(std::span<const double> v) {
    for (double x : v) {
        if (x != v[0]) return false;
    }
    return true;
}

inline void require_same_length(std::span<const double> a, std::span<const double> b,
                                const char* what) {
    if (a.size() != b.size()) throw ShapeError(std::string(what) + ": length mismatch");
    if (a.size() < 2) throw ShapeError(std::string(what) + ": needs at least 2 entries");
}

}  // namespace detail

/// Pearson linear correlation coefficient, in [-1, 1].
inline double plcc(std::span<const double> a, std::span<const double> b) {
    detail::require_same_length(a, b, "plcc");
    if (detail::all_equal(a) || detail::all_equal(b)) {
        throw DegenerateInputError("plcc: constant input vector");
    }
    const std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    return sab / (std::sqrt(saa) * std::sqrt(sbb));
}

/// Fractional (average) ranks, 1-based; ties share the mean of their positions.
inline std::vector<double> fractional_ranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

/// Spearman rank correlation: Pearson over fractional ranks. Coincides with the
/// 1 - 6*sum(d^2)/(n(n^2-1)) form in the tie-free case.
inline double srocc(std::span<const double> a, std::span<const double> b) {
    detail::require_same_length(a, b, "srocc");
    const std::vector<double> ra = fractional_ranks(a);
    const std::vector<double> rb = fractional_ranks(b);
    if (detail::all_equal(ra) || detail::all_equal(rb)) {
        throw DegenerateInputError("srocc: constant rank vector");
    }
    return plcc(ra, rb);
}

enum class KendallMode {
    TauA,          // (C - D) / (n(n-1)/2); ties contribute 0 to the sum
    CubicNormalized,  // 1 - 2/(n(n^2-1)) * sum sign*sign, a variant normalization seen in print
};

/// Kendall rank correlation. In TauA mode constant inputs yield 0 and set
/// *degenerate_flag when provided (there is no ordering information to score).
inline double krocc(std::span<const double> a, std::span<const double> b,
                    KendallMode mode = KendallMode::TauA, bool* degenerate_flag = nullptr) {
    detail::require_same_length(a, b, "krocc");
    if (degenerate_flag) *degenerate_flag = false;
    if (detail::all_equal(a) || detail::all_equal(b)) {
        if (degenerate_flag) *degenerate_flag = true;
        if (mode == KendallMode::TauA) return 0.0;
        throw DegenerateInputError("krocc: constant input vector");
    }
    const std::size_t n = a.size();
    auto sgn = [](double x) { return (x > 0.0) - (x < 0.0); };
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            sum += static_cast<double>(sgn(a[i] - a[j]) * sgn(b[i] - b[j]));
        }
    }
    const double dn = static_cast<double>(n);
    if (mode == KendallMode::TauA) {
        return sum / (dn * (dn - 1.0) / 2.0);
    }
    return 1.0 - 2.0 / (dn * (dn * dn - 1.0)) * sum;
}

/// Fraction of pairs scored correctly: score(better) > score(worse). Exact ties
/// count as incorrect (an undecided pair is an unclassified pair).
inline double pairwise_accuracy(const std::map<std::string, double>& scores,
                                std::span<const MotionPair> pairs) {
    if (pairs.empty()) throw ShapeError("pairwise_accuracy: no pairs");
    std::size_t correct = 0;
    for (const MotionPair& p : pairs) {
        const auto hi = scores.find(p.better_id);
        const auto lo = scores.find(p.worse_id);
        if (hi == scores.end() || lo == scores.end()) {
            throw MissingScoreError("pairwise_accuracy: no score for pair (" + p.better_id +
                                    ", " + p.worse_id + ")");
        }
        if (hi->second > lo->second) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

// One group's coefficients; `degenerate` marks groups where a coefficient was
// undefined (constant scores or labels) and the value is NaN.
struct GroupStats {
    double plcc = std::numeric_limits<double>::quiet_NaN();
    double srocc = std::numeric_limits<double>::quiet_NaN();
    double krocc = std::numeric_limits<double>::quiet_NaN();
    std::size_t n = 0;
    bool degenerate = false;
};

struct CorrelationReport {
    std::vector<std::pair<std::string, GroupStats>> per_prompt;  // sorted by prompt label
    std::vector<std::pair<std::string, GroupStats>> per_family;  // pooled by base family
    GroupStats total;
    double pairwise_accuracy = std::numeric_limits<double>::quiet_NaN();
    std::size_t pair_count = 0;
};

inline GroupStats group_stats(std::span<const double> pred, std::span<const double> target) {
    GroupStats g;
    g.n = pred.size();
    try {
        g.plcc = plcc(pred, target);
        g.srocc = srocc(pred, target);
        bool deg = false;
        g.krocc = krocc(pred, target, KendallMode::TauA, &deg);
        g.degenerate = deg;
    } catch (const Error&) {
        g.degenerate = true;
    }
    return g;
}

/// Per-prompt, per-family, and pooled correlations of `scores` against
/// `targets`, plus pairwise accuracy. `prompt_of` maps motion id -> prompt
/// label and `family_of` maps prompt label -> base family.
inline CorrelationReport build_correlation_report(
    const std::map<std::string, double>& scores, const std::map<std::string, double>& targets,
    const std::map<std::string, std::string>& prompt_of,
    const std::map<std::string, std::string>& family_of, std::span<const MotionPair> pairs) {
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_prompt;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_family;
    std::vector<double> all_pred, all_target;
    for (const auto& [id, score] : scores) {
        const auto t = targets.find(id);
        if (t == targets.end()) throw MissingScoreError("no target score for motion " + id);
        const auto pr = prompt_of.find(id);
        if (pr == prompt_of.end()) throw MissingScoreError("no prompt for motion " + id);
        by_prompt[pr->second].first.push_back(score);
        by_prompt[pr->second].second.push_back(t->second);
        const auto fam = family_of.find(pr->second);
        const std::string family = fam == family_of.end() ? std::string("other") : fam->second;
        by_family[family].first.push_back(score);
        by_family[family].second.push_back(t->second);
        all_pred.push_back(score);
        all_target.push_back(t->second);
    }

    CorrelationReport report;
    for (const auto& [prompt, vecs] : by_prompt) {
        report.per_prompt.emplace_back(prompt, group_stats(vecs.first, vecs.second));
    }
    for (const auto& [family, vecs] : by_family) {
        report.per_family.emplace_back(family, group_stats(vecs.first, vecs.second));
    }
    report.total = group_stats(all_pred, all_target);
    if (!pairs.empty()) {
        report.pairwise_accuracy = pairwise_accuracy(scores, pairs);
        report.pair_count = pairs.size();
    }
    return report;
}

namespace detail {

inline std::string cell(double v, bool missing_blank) {
    if (std::isnan(v)) return missing_blank ? "n/a" : "nan";
    return format_full(v);
}

}  // namespace detail

/// CSV layout: one row per coefficient, one column per prompt, then one pooled
/// column per family, then Total; accuracy appended as its own row.
inline std::vector<std::string> correlation_report_csv(const CorrelationReport& r) {
    std::string header = "metric";
    for (const auto& [label, g] : r.per_prompt) header += "," + label;
    for (const auto& [label, g] : r.per_family) header += ",family:" + label;
    header += ",total";
    std::vector<std::string> lines{header};
    auto row = [&](const char* name, auto pick) {
        std::string line = name;
        for (const auto& [label, g] : r.per_prompt) line += "," + detail::cell(pick(g), false);
        for (const auto& [label, g] : r.per_family) line += "," + detail::cell(pick(g), false);
        line += "," + detail::cell(pick(r.total), false);
        lines.push_back(line);
    };
    row("plcc", [](const GroupStats& g) { return g.plcc; });
    row("srocc", [](const GroupStats& g) { return g.srocc; });
    row("krocc", [](const GroupStats& g) { return g.krocc; });
    std::string nrow = "n";
    for (const auto& [label, g] : r.per_prompt) nrow += "," + std::to_string(g.n);
    for (const auto& [label, g] : r.per_family) nrow += "," + std::to_string(g.n);
    nrow += "," + std::to_string(r.total.n);
    lines.push_back(nrow);
    lines.push_back("pairwise_accuracy," + detail::cell(r.pairwise_accuracy, false) + " (" +
                    std::to_string(r.pair_count) + " pairs)");
    return lines;
}

inline std::vector<std::string> correlation_report_markdown(const CorrelationReport& r) {
    auto fixed = [&](double v) {
        if (std::isnan(v)) return std::string("n/a");
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", v);
        return std::string(buf);
    };
    std::string header = "| metric |";
    std::string rule = "|---|";
    for (const auto& [label, g] : r.per_prompt) {
        header += " " + label + " |";
        rule += "---|";
    }
    for (const auto& [label, g] : r.per_family) {
        header += " " + label + " (all) |";
        rule += "---|";
    }
    header += " Total |";
    rule += "---|";
    std::vector<std::string> lines{header, rule};
    auto row = [&](const char* name, auto pick) {
        std::string line = std::string("| ") + name + " |";
        for (const auto& [label, g] : r.per_prompt) line += " " + fixed(pick(g)) + " |";
        for (const auto& [label, g] : r.per_family) line += " " + fixed(pick(g)) + " |";
        line += " " + fixed(pick(r.total)) + " |";
        lines.push_back(line);
    };
    row("PLCC", [](const GroupStats& g) { return g.plcc; });
    row("SROCC", [](const GroupStats& g) { return g.srocc; });
    row("KROCC", [](const GroupStats& g) { return g.krocc; });
    lines.push_back("");
    lines.push_back("Pairwise accuracy: " + fixed(r.pairwise_accuracy) + " over " +
                    std::to_string(r.pair_count) + " pairs.");
    return lines;
}

}  // namespace mofi
