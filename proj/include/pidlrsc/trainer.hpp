#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "pidlrsc/model.hpp"

namespace pidlrsc {

struct EpochMetrics {
    std::size_t epoch = 0;
    double loss = 0.0;  // mean total loss over the epoch's steps
    double ce = 0.0;    // mean cross-entropy
    double train_acc = 0.0;
};

struct TrainResult {
    ModelParams params;
    std::vector<EpochMetrics> history;
};

/// Raised when the loss becomes non-finite; carries the last finite parameters.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, ModelParams last_good, std::vector<EpochMetrics> history)
        : Error(what), last_good_(std::move(last_good)), history_(std::move(history)) {}

    const ModelParams& last_good() const noexcept { return last_good_; }
    const std::vector<EpochMetrics>& history() const noexcept { return history_; }

private:
    ModelParams last_good_;
    std::vector<EpochMetrics> history_;
};

/// Plain SGD or Adam (beta1 = 0.9, beta2 = 0.999, eps = 1e-8) over every block.
class Optimizer {
public:
    Optimizer(OptimizerKind kind, double lr, const ModelParams& shape)
        : kind_(kind), lr_(lr), m_(zeros_like(shape)), v_(zeros_like(shape)) {}

    void step(ModelParams& params, const ModelParams& grad) {
        ++t_;
        auto p = blocks(params);
        auto g = blocks(grad);
        auto m = blocks(m_);
        auto v = blocks(v_);
        const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
        for (std::size_t b = 0; b < p.size(); ++b) {
            for (std::size_t i = 0; i < p[b].values.size(); ++i) {
                const double gi = g[b].values[i];
                if (kind_ == OptimizerKind::sgd) {
                    p[b].values[i] -= lr_ * gi;
                    continue;
                }
                double& mi = m[b].values[i];
                double& vi = v[b].values[i];
                mi = kBeta1 * mi + (1.0 - kBeta1) * gi;
                vi = kBeta2 * vi + (1.0 - kBeta2) * gi * gi;
                p[b].values[i] -= lr_ * (mi / bc1) / (std::sqrt(vi / bc2) + kEps);
            }
        }
    }

private:
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;

    OptimizerKind kind_;
    double lr_;
    std::uint64_t t_ = 0;
    ModelParams m_;
    ModelParams v_;
};

inline FrequencySample epoch_frequencies(const TrainConfig& cfg, std::size_t dim, std::size_t epoch) {
    return FrequencySample::draw(cfg.frequencies, dim, cfg.sigma_t,
                                 derive_seed(cfg.seed, {stream::frequencies, epoch}));
}

/// Fixed frequency draw used for evaluation and explanation.
inline FrequencySample eval_frequencies(const TrainConfig& cfg, std::size_t dim) {
    return FrequencySample::draw(cfg.frequencies, dim, cfg.sigma_t, derive_seed(cfg.seed, {stream::eval_frequencies}));
}

using EpochCallback = std::function<void(const EpochMetrics&, const ModelParams&)>;

/// One gradient step per bag, bags visited in a seeded shuffle each epoch.
inline TrainResult train(std::span<const Bag> dataset, const PrototypeSet& prototypes, const TrainConfig& cfg,
                         std::size_t classes, const EpochCallback& on_epoch = {},
                         std::optional<ModelParams> initial = std::nullopt) {
    cfg.validate();
    if (dataset.empty()) throw DimensionError("train: empty dataset");
    const std::size_t n_in = dataset.front().features.cols();
    for (const Bag& b : dataset) {
        if (b.features.cols() != n_in) throw DimensionError("train: bags disagree on feature dimension");
        if (b.label >= classes) throw DimensionError("train: label out of range");
    }
    if (prototypes.features.cols() != n_in) throw DimensionError("train: prototype dimension mismatch");

    TrainResult result;
    result.params = initial ? std::move(*initial) : init_params(n_in, classes, cfg);
    Optimizer opt(cfg.optimizer, cfg.learning_rate, result.params);

    std::vector<std::size_t> order(dataset.size());
    std::size_t steps = 0;
    ModelParams last_finite = result.params;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const FrequencySample freqs = epoch_frequencies(cfg, result.params.n_feat(), epoch);
        const ModelContext ctx{prototypes, freqs, cfg};
        std::iota(order.begin(), order.end(), 0);
        Rng rng(derive_seed(cfg.seed, {stream::shuffle, epoch}));
        shuffle(std::span<std::size_t>(order), rng);

        EpochMetrics metrics;
        metrics.epoch = epoch;
        std::size_t correct = 0;
        for (std::size_t idx : order) {
            const Bag& bag = dataset[idx];
            ForwardResult fwd;
            try {
                fwd = forward(bag.features, bag.bag_id, result.params, ctx, bag.label);
            } catch (const Error& e) {
                if (steps == 0 || !(dynamic_cast<const NumericalError*>(&e) || dynamic_cast<const DegenerateBagError*>(&e)))
                    throw;
                throw DivergenceError("train: " + std::string(e.what()) + " at epoch " + std::to_string(epoch) +
                                          ", bag " + std::to_string(bag.bag_id),
                                      last_finite, result.history);
            }
            if (!std::isfinite(fwd.loss)) {
                throw DivergenceError("train: non-finite loss at epoch " + std::to_string(epoch) + ", bag " +
                                          std::to_string(bag.bag_id),
                                      result.params, result.history);
            }
            metrics.loss += fwd.loss;
            metrics.ce += fwd.ce;
            if (fwd.predicted() == bag.label) ++correct;
            const ModelParams grad = backward(bag.features, bag.label, result.params, ctx, fwd);
            ModelParams next = result.params;
            opt.step(next, grad);
            for (const auto& b : blocks(std::as_const(next))) {
                if (!all_finite(b.values)) {
                    throw DivergenceError("train: non-finite parameter " + std::string(b.name), result.params,
                                          result.history);
                }
            }
            last_finite = result.params;
            result.params = std::move(next);
            ++steps;
        }
        const auto n = static_cast<double>(dataset.size());
        metrics.loss /= n;
        metrics.ce /= n;
        metrics.train_acc = static_cast<double>(correct) / n;
        result.history.push_back(metrics);
        if (on_epoch) on_epoch(metrics, result.params);
    }
    return result;
}

}  // namespace pidlrsc
