#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mofi/correlation.hpp"
#include "mofi/features.hpp"
#include "mofi/losses.hpp"
#include "mofi/rng.hpp"

namespace mofi {

enum class LossMode { Pearson, Mse };

struct TrainingConfig {
    int epochs = 200;
    int batch_size = 64;
    // Tuned for full-batch updates on the small feature network; minibatch
    // training of a large backbone would sit around 4e-5. Decayed
    // exponentially per epoch.
    double learning_rate = 5e-2;
    double lr_decay_per_epoch = 0.995;
    double lambda = 0.3;
    // Decoupled weight decay on the weight matrices (not biases). Keeps the
    // preference-loss margins from inflating without bound.
    double weight_decay = 0.0;
    std::uint64_t seed = 0;
    bool prompt_categorized = true;
    LossMode loss_mode = LossMode::Pearson;
    std::vector<int> hidden_sizes = {64, 32};

    void validate() const {
        if (epochs <= 0 || batch_size <= 0 || !(learning_rate > 0.0) || lambda < 0.0 ||
            !(lr_decay_per_epoch > 0.0) || lr_decay_per_epoch > 1.0 || weight_decay < 0.0) {
            throw ConfigError("TrainingConfig: invalid numeric parameters");
        }
        for (int h : hidden_sizes) {
            if (h <= 0) throw ConfigError("TrainingConfig: hidden layer sizes must be positive");
        }
    }
};

// Feature-MLP fidelity scorer: z-normalized input, tanh hidden layers, linear
// scalar output. Weights are row-major [out][in] per layer.
struct ScorerModel {
    static constexpr const char* kFormatTag = "mofi-scorer-v1";

    FeatureConfig feature_config;
    std::vector<int> layer_sizes;  // e.g. [48, 64, 32, 1]
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
    std::vector<double> norm_mean;
    std::vector<double> norm_std;  // floored at 1e-8 when frozen

    int input_size() const { return layer_sizes.empty() ? 0 : layer_sizes.front(); }
    int layer_count() const { return static_cast<int>(layer_sizes.size()) - 1; }

    void validate() const {
        if (layer_sizes.size() < 2 || layer_sizes.back() != 1) {
            throw InvariantError("scorer: layer_sizes must end in a single scalar output");
        }
        if (static_cast<int>(weights.size()) != layer_count() ||
            static_cast<int>(biases.size()) != layer_count()) {
            throw InvariantError("scorer: layer count mismatch");
        }
        for (int l = 0; l < layer_count(); ++l) {
            const std::size_t rows = static_cast<std::size_t>(layer_sizes[l + 1]);
            const std::size_t cols = static_cast<std::size_t>(layer_sizes[l]);
            if (weights[l].size() != rows * cols || biases[l].size() != rows) {
                throw InvariantError("scorer: weight shape inconsistent with layer_sizes");
            }
        }
        if (norm_mean.size() != static_cast<std::size_t>(input_size()) ||
            norm_std.size() != static_cast<std::size_t>(input_size())) {
            throw InvariantError("scorer: normalization stats shape mismatch");
        }
    }

    // activations[0] is the normalized input; activations[l+1] the output of
    // layer l (post-tanh for hidden layers, raw for the final linear layer).
    struct ForwardCache {
        std::vector<std::vector<double>> activations;
    };

    double forward_cached(std::span<const double> features, ForwardCache& cache) const {
        if (features.size() != static_cast<std::size_t>(input_size())) {
            throw ShapeError("scorer forward: feature length mismatch");
        }
        cache.activations.assign(layer_count() + 1, {});
        std::vector<double>& x0 = cache.activations[0];
        x0.resize(features.size());
        for (std::size_t i = 0; i < features.size(); ++i) {
            x0[i] = (features[i] - norm_mean[i]) / norm_std[i];
        }
        for (int l = 0; l < layer_count(); ++l) {
            const std::vector<double>& in = cache.activations[l];
            std::vector<double>& out = cache.activations[l + 1];
            const int rows = layer_sizes[l + 1];
            const int cols = layer_sizes[l];
            out.resize(rows);
            const bool last = l == layer_count() - 1;
            for (int r = 0; r < rows; ++r) {
                double z = biases[l][r];
                const double* wrow = &weights[l][static_cast<std::size_t>(r) * cols];
                for (int c = 0; c < cols; ++c) z += wrow[c] * in[c];
                out[r] = last ? z : std::tanh(z);
            }
        }
        return cache.activations.back()[0];
    }

    double forward(std::span<const double> features) const {
        ForwardCache cache;
        return forward_cached(features, cache);
    }

    // Accumulates d(loss)/d(params) for one sample given d(loss)/d(score).
    void backprop(const ForwardCache& cache, double dscore,
                  std::vector<std::vector<double>>& wgrad,
                  std::vector<std::vector<double>>& bgrad) const {
        std::vector<double> delta{dscore};
        for (int l = layer_count() - 1; l >= 0; --l) {
            const std::vector<double>& in = cache.activations[l];
            const int rows = layer_sizes[l + 1];
            const int cols = layer_sizes[l];
            std::vector<double> delta_prev(cols, 0.0);
            for (int r = 0; r < rows; ++r) {
                const double g = delta[r];
                bgrad[l][r] += g;
                double* wg = &wgrad[l][static_cast<std::size_t>(r) * cols];
                const double* wrow = &weights[l][static_cast<std::size_t>(r) * cols];
                for (int c = 0; c < cols; ++c) {
                    wg[c] += g * in[c];
                    delta_prev[c] += g * wrow[c];
                }
            }
            if (l > 0) {
                // Pass through the tanh of the layer below: y = tanh(z), dy/dz = 1 - y^2.
                const std::vector<double>& act = cache.activations[l];
                for (int c = 0; c < cols; ++c) delta_prev[c] *= 1.0 - act[c] * act[c];
            }
            delta = std::move(delta_prev);
        }
    }
};

inline ScorerModel make_scorer_model(int input_size, const std::vector<int>& hidden_sizes,
                                     std::uint64_t seed, const FeatureConfig& fcfg = {}) {
    ScorerModel m;
    m.feature_config = fcfg;
    m.layer_sizes.push_back(input_size);
    for (int h : hidden_sizes) m.layer_sizes.push_back(h);
    m.layer_sizes.push_back(1);
    Rng rng(derive_seed(seed, 0xC0FFEE));
    for (int l = 0; l < m.layer_count(); ++l) {
        const int rows = m.layer_sizes[l + 1];
        const int cols = m.layer_sizes[l];
        const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
        std::vector<double> w(static_cast<std::size_t>(rows) * cols);
        for (double& v : w) v = rng.uniform(-limit, limit);
        m.weights.push_back(std::move(w));
        m.biases.emplace_back(rows, 0.0);
    }
    m.norm_mean.assign(input_size, 0.0);
    m.norm_std.assign(input_size, 1.0);
    return m;
}

inline nlohmann::json scorer_to_json(const ScorerModel& m) {
    m.validate();
    return nlohmann::json{{"format", ScorerModel::kFormatTag},
                          {"activation", "tanh"},
                          {"feature_config",
                           {{"contact_height_m", m.feature_config.contact_height_m},
                            {"float_tolerance_m", m.feature_config.float_tolerance_m},
                            {"penetration_tolerance_m", m.feature_config.penetration_tolerance_m}}},
                          {"layer_sizes", m.layer_sizes},
                          {"norm_mean", m.norm_mean},
                          {"norm_std", m.norm_std},
                          {"weights", m.weights},
                          {"biases", m.biases}};
}

inline ScorerModel scorer_from_json(const nlohmann::json& j) {
    if (!j.contains("format") || j["format"] != ScorerModel::kFormatTag) {
        throw SchemaError("scorer model: unknown or missing format tag");
    }
    ScorerModel m;
    const auto& fc = j.at("feature_config");
    m.feature_config.contact_height_m = fc.at("contact_height_m").get<double>();
    m.feature_config.float_tolerance_m = fc.at("float_tolerance_m").get<double>();
    m.feature_config.penetration_tolerance_m = fc.at("penetration_tolerance_m").get<double>();
    m.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    m.norm_mean = j.at("norm_mean").get<std::vector<double>>();
    m.norm_std = j.at("norm_std").get<std::vector<double>>();
    m.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    m.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    m.validate();
    return m;
}

struct TrainingSample {
    std::string id;
    std::string prompt;
    std::vector<double> features;
    double target = 0.0;  // physical_score
};

struct TrainingLogRow {
    int epoch = 0;
    double total = 0.0;
    double perceptual = 0.0;
    double correlation = 0.0;
    double lr = 0.0;
};

struct TrainResult {
    ScorerModel model;
    std::vector<TrainingLogRow> log;
    // Final fit metrics over the training samples/pairs.
    double final_train_plcc = std::numeric_limits<double>::quiet_NaN();
    double final_train_accuracy = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

struct Batch {
    std::vector<int> sample_indices;                  // into the sample list
    std::vector<std::pair<int, int>> pairs_local;     // (better, worse) within the batch
};

// Loss over one batch, with gradient accumulated into wgrad/bgrad. Returns
// (total, perceptual, correlation) components.
inline std::array<double, 3> batch_step(const ScorerModel& model,
                                        const std::vector<TrainingSample>& samples,
                                        const Batch& batch, double lambda, LossMode mode,
                                        std::vector<std::vector<double>>& wgrad,
                                        std::vector<std::vector<double>>& bgrad) {
    const std::size_t n = batch.sample_indices.size();
    std::vector<ScorerModel::ForwardCache> caches(n);
    std::vector<double> scores(n), targets(n);
    for (std::size_t i = 0; i < n; ++i) {
        const TrainingSample& s = samples[batch.sample_indices[i]];
        scores[i] = model.forward_cached(s.features, caches[i]);
        targets[i] = s.target;
    }

    double perceptual = 0.0, correlation = 0.0;
    std::vector<double> dscore(n, 0.0);
    if (!batch.pairs_local.empty()) {
        LossConfig pc;
        pc.lambda = 0.0;
        const LossValueAndGrad p = total_loss(scores, batch.pairs_local, targets, pc);
        perceptual = p.value;
        for (std::size_t i = 0; i < n; ++i) dscore[i] += p.grad[i];
    }
    if (lambda != 0.0 && n >= 2) {
        const LossValueAndGrad c =
            mode == LossMode::Pearson ? pearson_loss(scores, targets) : mse_loss(scores, targets);
        correlation = c.value;
        for (std::size_t i = 0; i < n; ++i) dscore[i] += lambda * c.grad[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (dscore[i] != 0.0) model.backprop(caches[i], dscore[i], wgrad, bgrad);
    }
    return {perceptual + lambda * correlation, perceptual, correlation};
}

}  // namespace detail

/// Trains the fidelity scorer with full-batch gradient descent per batch and
/// exponential learning-rate decay. With prompt_categorized batching each step
/// draws one prompt group; otherwise batches are mixed-prompt chunks of
/// batch_size. Deterministic under a fixed seed.
inline TrainResult train_scorer(const std::vector<TrainingSample>& samples,
                                const std::vector<MotionPair>& pairs, const TrainingConfig& cfg) {
    cfg.validate();
    if (samples.empty()) throw ConfigError("train_scorer: no samples");
    const int input_size = static_cast<int>(samples[0].features.size());
    std::map<std::string, int> index_of;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (static_cast<int>(samples[i].features.size()) != input_size) {
            throw ShapeError("train_scorer: inconsistent feature lengths");
        }
        index_of[samples[i].id] = static_cast<int>(i);
    }
    std::vector<std::pair<int, int>> pair_indices;
    for (const MotionPair& p : pairs) {
        const auto b = index_of.find(p.better_id);
        const auto w = index_of.find(p.worse_id);
        if (b == index_of.end() || w == index_of.end()) {
            throw ConfigError("train_scorer: pair references unknown motion id");
        }
        pair_indices.emplace_back(b->second, w->second);
    }

    ScorerModel model = make_scorer_model(input_size, cfg.hidden_sizes, cfg.seed);
    // Input normalization frozen from the training set.
    for (int c = 0; c < input_size; ++c) {
        double mean = 0.0;
        for (const TrainingSample& s : samples) mean += s.features[c];
        mean /= static_cast<double>(samples.size());
        double var = 0.0;
        for (const TrainingSample& s : samples) {
            var += (s.features[c] - mean) * (s.features[c] - mean);
        }
        var /= static_cast<double>(samples.size());
        model.norm_mean[c] = mean;
        model.norm_std[c] = std::max(std::sqrt(var), 1e-8);
    }

    // Prompt groups (sorted labels for a deterministic base order).
    std::map<std::string, std::vector<int>> groups;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        groups[samples[i].prompt].push_back(static_cast<int>(i));
    }
    if (cfg.prompt_categorized) {
        for (const auto& [prompt, members] : groups) {
            if (members.size() < 2) {
                throw ConfigError("train_scorer: prompt group '" + prompt +
                                  "' has fewer than 2 motions");
            }
            if (static_cast<int>(members.size()) > cfg.batch_size) {
                throw ConfigError("train_scorer: prompt group '" + prompt +
                                  "' exceeds batch_size");
            }
        }
    }

    Rng shuffle_rng(derive_seed(cfg.seed, 0x5EED));
    std::vector<std::vector<double>> wgrad, bgrad;
    for (int l = 0; l < model.layer_count(); ++l) {
        wgrad.emplace_back(model.weights[l].size(), 0.0);
        bgrad.emplace_back(model.biases[l].size(), 0.0);
    }

    TrainResult result;
    double lr = cfg.learning_rate;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<detail::Batch> batches;
        if (cfg.prompt_categorized) {
            std::vector<std::string> order;
            for (const auto& [prompt, members] : groups) order.push_back(prompt);
            shuffle_rng.shuffle(order);
            for (const std::string& prompt : order) {
                detail::Batch b;
                b.sample_indices = groups[prompt];
                std::map<int, int> local;
                for (std::size_t i = 0; i < b.sample_indices.size(); ++i) {
                    local[b.sample_indices[i]] = static_cast<int>(i);
                }
                for (const auto& [hi, lo] : pair_indices) {
                    const auto a = local.find(hi);
                    const auto c = local.find(lo);
                    if (a != local.end() && c != local.end()) {
                        b.pairs_local.emplace_back(a->second, c->second);
                    }
                }
                batches.push_back(std::move(b));
            }
        } else {
            std::vector<int> order(samples.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
            shuffle_rng.shuffle(order);
            for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
                detail::Batch b;
                const std::size_t end = std::min(order.size(), start + cfg.batch_size);
                b.sample_indices.assign(order.begin() + start, order.begin() + end);
                std::map<int, int> local;
                for (std::size_t i = 0; i < b.sample_indices.size(); ++i) {
                    local[b.sample_indices[i]] = static_cast<int>(i);
                }
                for (const auto& [hi, lo] : pair_indices) {
                    const auto a = local.find(hi);
                    const auto c = local.find(lo);
                    if (a != local.end() && c != local.end()) {
                        b.pairs_local.emplace_back(a->second, c->second);
                    }
                }
                batches.push_back(std::move(b));
            }
        }

        TrainingLogRow row;
        row.epoch = epoch;
        row.lr = lr;
        for (const detail::Batch& batch : batches) {
            for (auto& g : wgrad) std::fill(g.begin(), g.end(), 0.0);
            for (auto& g : bgrad) std::fill(g.begin(), g.end(), 0.0);
            const auto [total, perceptual, correlation] =
                detail::batch_step(model, samples, batch, cfg.lambda, cfg.loss_mode, wgrad, bgrad);
            row.total += total;
            row.perceptual += perceptual;
            row.correlation += correlation;
            const double keep = 1.0 - lr * cfg.weight_decay;
            for (int l = 0; l < model.layer_count(); ++l) {
                for (std::size_t i = 0; i < model.weights[l].size(); ++i) {
                    model.weights[l][i] = keep * model.weights[l][i] - lr * wgrad[l][i];
                }
                for (std::size_t i = 0; i < model.biases[l].size(); ++i) {
                    model.biases[l][i] -= lr * bgrad[l][i];
                }
            }
        }
        const double nb = static_cast<double>(batches.size());
        row.total /= nb;
        row.perceptual /= nb;
        row.correlation /= nb;
        result.log.push_back(row);
        lr *= cfg.lr_decay_per_epoch;
    }

    std::vector<double> final_scores(samples.size()), final_targets(samples.size());
    std::map<std::string, double> score_of;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        final_scores[i] = model.forward(samples[i].features);
        final_targets[i] = samples[i].target;
        score_of[samples[i].id] = final_scores[i];
    }
    try {
        result.final_train_plcc = plcc(final_scores, final_targets);
    } catch (const Error&) {
    }
    if (!pairs.empty()) result.final_train_accuracy = pairwise_accuracy(score_of, pairs);

    result.model = std::move(model);
    return result;
}

/// Deterministic batch inference: motion id -> scalar score.
inline std::map<std::string, double> predict_scores(
    const ScorerModel& model,
    const std::vector<std::pair<std::string, MotionSequence>>& motions,
    const Skeleton& skeleton) {
    std::map<std::string, double> out;
    for (const auto& [id, motion] : motions) {
        out[id] = model.forward(extract_features(motion, skeleton, model.feature_config));
    }
    return out;
}

// Parameter flattening used by the end-to-end gradient checks.
inline std::vector<double> flatten_params(const ScorerModel& m) {
    std::vector<double> out;
    for (int l = 0; l < m.layer_count(); ++l) {
        out.insert(out.end(), m.weights[l].begin(), m.weights[l].end());
        out.insert(out.end(), m.biases[l].begin(), m.biases[l].end());
    }
    return out;
}

inline void set_params(ScorerModel& m, std::span<const double> flat) {
    std::size_t k = 0;
    for (int l = 0; l < m.layer_count(); ++l) {
        for (double& w : m.weights[l]) w = flat[k++];
        for (double& b : m.biases[l]) b = flat[k++];
    }
    if (k != flat.size()) throw ShapeError("set_params: flat parameter length mismatch");
}

/// Batch loss as a function of the flattened parameters, with the analytic
/// parameter gradient. Used by training-path gradient checks.
inline LossValueAndGrad scorer_loss_param_grad(const ScorerModel& base,
                                               const std::vector<TrainingSample>& samples,
                                               const std::vector<std::pair<int, int>>& pairs_local,
                                               double lambda, LossMode mode,
                                               std::span<const double> flat_params) {
    ScorerModel model = base;
    set_params(model, flat_params);
    detail::Batch batch;
    for (std::size_t i = 0; i < samples.size(); ++i) batch.sample_indices.push_back(static_cast<int>(i));
    batch.pairs_local = pairs_local;
    std::vector<std::vector<double>> wgrad, bgrad;
    for (int l = 0; l < model.layer_count(); ++l) {
        wgrad.emplace_back(model.weights[l].size(), 0.0);
        bgrad.emplace_back(model.biases[l].size(), 0.0);
    }
    const auto [total, perceptual, correlation] =
        detail::batch_step(model, samples, batch, lambda, mode, wgrad, bgrad);
    LossValueAndGrad out;
    out.value = total;
    for (int l = 0; l < model.layer_count(); ++l) {
        out.grad.insert(out.grad.end(), wgrad[l].begin(), wgrad[l].end());
        out.grad.insert(out.grad.end(), bgrad[l].begin(), bgrad[l].end());
    }
    return out;
}

}  // namespace mofi
