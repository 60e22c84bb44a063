#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mofi/errors.hpp"

namespace mofi {

// Scalar loss with partial derivatives w.r.t. the predicted scores that fed it.
// Each operation documents its gradient layout.
struct LossValueAndGrad {
    double value = 0.0;
    std::vector<double> grad;
};

struct LossConfig {
    double lambda = 0.3;         // weight of the correlation term in the total loss
    double tau = 0.0;            // critic-loss sigmoid threshold
    bool critic_flipped = false; // false: -sigmoid(tau - F) as printed; true: -sigmoid(F - tau)

    void validate() const {
        if (lambda < 0.0) throw ConfigError("LossConfig: lambda must be >= 0");
    }
};

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// -log sigmoid(d), computed through log1p so large margins do not overflow.
inline double neg_log_sigmoid(double d) {
    return d >= 0.0 ? std::log1p(std::exp(-d)) : -d + std::log1p(std::exp(d));
}

/// Pairwise preference loss: mean over pairs of -log sigmoid(s_better - s_worse).
/// Gradient layout: [d/ds_better..., d/ds_worse...] (length 2N).
inline LossValueAndGrad perceptual_loss(std::span<const double> score_better,
                                        std::span<const double> score_worse) {
    if (score_better.size() != score_worse.size()) {
        throw ShapeError("perceptual_loss: better/worse length mismatch");
    }
    if (score_better.empty()) throw ShapeError("perceptual_loss: empty input");
    const std::size_t n = score_better.size();
    LossValueAndGrad out;
    out.grad.assign(2 * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = score_better[i] - score_worse[i];
        out.value += neg_log_sigmoid(d);
        const double g = -sigmoid(-d) / static_cast<double>(n);  // d/d(s_better)
        out.grad[i] = g;
        out.grad[n + i] = -g;
    }
    out.value /= static_cast<double>(n);
    return out;
}

/// Correlation loss: -PLCC(pred, target), gradient w.r.t. pred (length n).
inline LossValueAndGrad pearson_loss(std::span<const double> pred,
                                     std::span<const double> target) {
    if (pred.size() != target.size()) throw ShapeError("pearson_loss: length mismatch");
    const std::size_t n = pred.size();
    if (n < 2) throw ShapeError("pearson_loss: needs at least 2 entries");
    bool pred_const = true, target_const = true;
    for (std::size_t i = 1; i < n; ++i) {
        pred_const = pred_const && pred[i] == pred[0];
        target_const = target_const && target[i] == target[0];
    }
    if (pred_const || target_const) {
        throw DegenerateInputError("pearson_loss: constant input vector");
    }

    double mp = 0.0, mt = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mp += pred[i];
        mt += target[i];
    }
    mp /= static_cast<double>(n);
    mt /= static_cast<double>(n);
    std::vector<double> u(n), v(n);
    double suu = 0.0, svv = 0.0, suv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = pred[i] - mp;
        v[i] = target[i] - mt;
        suu += u[i] * u[i];
        svv += v[i] * v[i];
        suv += u[i] * v[i];
    }
    const double su = std::sqrt(suu);
    const double sv = std::sqrt(svv);
    const double rho = suv / (su * sv);

    LossValueAndGrad out;
    out.value = -rho;
    out.grad.resize(n);
    // d rho / d pred_i = v_i/(su sv) - rho u_i/su^2 (centered v sums to zero).
    for (std::size_t i = 0; i < n; ++i) {
        out.grad[i] = -(v[i] / (su * sv) - rho * u[i] / suu);
    }
    return out;
}

/// Mean squared error against targets; the regression baseline used by the
/// loss-function ablation. Gradient w.r.t. pred (length n).
inline LossValueAndGrad mse_loss(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size()) throw ShapeError("mse_loss: length mismatch");
    if (pred.empty()) throw ShapeError("mse_loss: empty input");
    const std::size_t n = pred.size();
    LossValueAndGrad out;
    out.grad.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = pred[i] - target[i];
        out.value += d * d;
        out.grad[i] = 2.0 * d / static_cast<double>(n);
    }
    out.value /= static_cast<double>(n);
    return out;
}

/// Joint objective over one batch of scores: pairwise preference loss over the
/// index pairs plus lambda times the correlation loss against targets.
/// Gradient w.r.t. `scores` (length n), contributions summed by score identity.
/// With no pairs the preference term is 0; with lambda == 0 the correlation
/// term is skipped entirely.
inline LossValueAndGrad total_loss(std::span<const double> scores,
                                   std::span<const std::pair<int, int>> better_worse_pairs,
                                   std::span<const double> targets, const LossConfig& cfg) {
    cfg.validate();
    const std::size_t n = scores.size();
    LossValueAndGrad out;
    out.grad.assign(n, 0.0);

    if (!better_worse_pairs.empty()) {
        std::vector<double> hi(better_worse_pairs.size()), lo(better_worse_pairs.size());
        for (std::size_t k = 0; k < better_worse_pairs.size(); ++k) {
            const auto [b, w] = better_worse_pairs[k];
            if (b < 0 || w < 0 || b >= static_cast<int>(n) || w >= static_cast<int>(n)) {
                throw ShapeError("total_loss: pair index out of range");
            }
            hi[k] = scores[b];
            lo[k] = scores[w];
        }
        const LossValueAndGrad p = perceptual_loss(hi, lo);
        out.value += p.value;
        for (std::size_t k = 0; k < better_worse_pairs.size(); ++k) {
            out.grad[better_worse_pairs[k].first] += p.grad[k];
            out.grad[better_worse_pairs[k].second] += p.grad[better_worse_pairs.size() + k];
        }
    }
    if (cfg.lambda != 0.0) {
        if (targets.size() != n) throw ShapeError("total_loss: targets length mismatch");
        const LossValueAndGrad c = pearson_loss(scores, targets);
        out.value += cfg.lambda * c.value;
        for (std::size_t i = 0; i < n; ++i) out.grad[i] += cfg.lambda * c.grad[i];
    }
    return out;
}

/// Critic loss for generator fine-tuning: mean of -sigmoid(tau - F) as printed,
/// or -sigmoid(F - tau) when cfg.critic_flipped is set.
inline LossValueAndGrad critic_loss(std::span<const double> scores, const LossConfig& cfg) {
    if (scores.empty()) throw ShapeError("critic_loss: empty input");
    const std::size_t n = scores.size();
    LossValueAndGrad out;
    out.grad.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = cfg.critic_flipped ? scores[i] - cfg.tau : cfg.tau - scores[i];
        const double s = sigmoid(x);
        out.value += -s;
        const double ds = s * (1.0 - s);  // d sigmoid(x) / dx
        out.grad[i] = (cfg.critic_flipped ? -ds : ds) / static_cast<double>(n);
    }
    out.value /= static_cast<double>(n);
    return out;
}

/// KL divergence between Gaussian fits (population mean/variance) of the two
/// score sets: KL(N(current) || N(reference)). Stand-in for a distributional
/// regularizer over model outputs; the Gaussianization is this toolkit's choice.
inline double kl_loss(std::span<const double> current_scores,
                      std::span<const double> reference_scores) {
    auto fit = [](std::span<const double> v, const char* name) {
        if (v.size() < 2) throw ShapeError(std::string("kl_loss: ") + name + " needs >= 2 entries");
        double m = 0.0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - m) * (x - m);
        var /= static_cast<double>(v.size());
        if (var <= 0.0) throw DegenerateInputError(std::string("kl_loss: zero variance in ") + name);
        return std::pair<double, double>(m, var);
    };
    const auto [m1, v1] = fit(current_scores, "current");
    const auto [m2, v2] = fit(reference_scores, "reference");
    return 0.5 * std::log(v2 / v1) + (v1 + (m1 - m2) * (m1 - m2)) / (2.0 * v2) - 0.5;
}

/// Central-difference check of an analytic gradient. Returns the max
/// per-coordinate error |g_fd - g_an| / max(|g_fd|, |g_an|, 0.01); the absolute
/// floor keeps near-zero coordinates from drowning in finite-difference noise.
inline double grad_check(const std::function<LossValueAndGrad(std::span<const double>)>& f,
                         std::span<const double> point, double step) {
    std::vector<double> x(point.begin(), point.end());
    const LossValueAndGrad at = f(x);
    if (at.grad.size() != x.size()) throw ShapeError("grad_check: gradient length mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double saved = x[i];
        x[i] = saved + step;
        const double fp = f(x).value;
        x[i] = saved - step;
        const double fm = f(x).value;
        x[i] = saved;
        const double fd = (fp - fm) / (2.0 * step);
        const double denom = std::max({std::abs(fd), std::abs(at.grad[i]), 1e-2});
        worst = std::max(worst, std::abs(fd - at.grad[i]) / denom);
    }
    return worst;
}

}  // namespace mofi
