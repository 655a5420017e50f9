#pragma once

// Bag scoring S(X) = f(A(F(X))):
//   F  affine + tanh projector applied to instances and prototypes,
//   A  metric clustering, prototype disentanglement and distance-weighted refinement,
//   f  affine head with softmax.
// Loss = CE + g1·c_min - g2·min(c_max, cap) + g3·Tr(WᵀW). Gradients are
// hand-derived with cluster assignments and the semantic ranking held fixed.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pidlrsc/cfd.hpp"
#include "pidlrsc/linalg.hpp"
#include "pidlrsc/lrsc.hpp"
#include "pidlrsc/metric.hpp"
#include "pidlrsc/pid.hpp"
#include "pidlrsc/rng.hpp"
#include "pidlrsc/synthbag.hpp"

namespace pidlrsc {

/// Ablation variants of the aggregation step.
enum class Variant {
    no_cluster,     // bag mean -> head
    naive_cluster,  // Euclidean k-means (W = I), equal cluster weights
    lrsc_only,      // learned metric k-means, equal cluster weights
    full,           // learned metric k-means + prototype disentanglement
};

enum class DistanceMetric { cfd, mmd };
enum class OptimizerKind { sgd, adam };

inline std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::no_cluster: return "no_cluster";
        case Variant::naive_cluster: return "naive_cluster";
        case Variant::lrsc_only: return "lrsc_only";
        case Variant::full: return "full";
    }
    return "?";
}
inline std::string_view to_string(DistanceMetric m) { return m == DistanceMetric::cfd ? "cfd" : "mmd"; }
inline std::string_view to_string(OptimizerKind o) { return o == OptimizerKind::sgd ? "sgd" : "adam"; }
inline std::string_view to_string(Normalization n) { return n == Normalization::max ? "max" : "sum"; }

struct TrainConfig {
    double gamma1 = 0.1;
    double gamma2 = 0.1;
    double gamma3 = 0.01;
    double learning_rate = 0.005;
    std::size_t epochs = 30;
    std::uint64_t seed = 0;
    std::size_t k = 3;
    std::size_t rank = 0;    // 0: max(2, n_feat/4)
    std::size_t n_feat = 0;  // 0: n_in
    std::size_t frequencies = 256;
    double sigma_t = 1.0;
    double epsilon = 1e-8;
    OptimizerKind optimizer = OptimizerKind::adam;
    DistanceMetric metric = DistanceMetric::cfd;
    Variant variant = Variant::full;
    Normalization normalization = Normalization::max;
    double c_max_cap = 10.0;
    double mmd_bandwidth = 0.0;  // 0: 1/sigma_t

    std::size_t feature_dim(std::size_t n_in) const { return n_feat == 0 ? n_in : n_feat; }
    std::size_t metric_rank(std::size_t n_in) const {
        const std::size_t f = feature_dim(n_in);
        if (variant == Variant::naive_cluster) return f;
        return rank == 0 ? default_rank(f) : rank;
    }
    double bandwidth() const { return mmd_bandwidth > 0.0 ? mmd_bandwidth : 1.0 / sigma_t; }

    void validate() const {
        if (gamma1 < 0.0 || gamma2 < 0.0 || gamma3 < 0.0) throw NumericalError("train: gammas must be >= 0");
        if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
            throw NumericalError("train: learning rate must be finite and >= 0");
        }
        if (epochs < 1) throw DimensionError("train: epochs must be >= 1");
        if (k < 1) throw DimensionError("train: k must be >= 1");
        if (variant == Variant::full && k != 3) throw DimensionError("train: the full model needs k = 3");
        if (frequencies < 1) throw DimensionError("train: need at least one frequency");
        if (!(sigma_t > 0.0)) throw NumericalError("train: sigma_t must be positive");
        if (!(epsilon > 0.0)) throw NumericalError("train: epsilon must be positive");
        if (!(c_max_cap > 0.0)) throw NumericalError("train: c_max_cap must be positive");
        if (mmd_bandwidth < 0.0) throw NumericalError("train: mmd_bandwidth must be >= 0");
    }
};

struct ModelParams {
    Matrix projector_weight;  // n_feat × n_in
    Vector projector_bias;    // n_feat
    MetricMatrix metric;      // r × n_feat
    Matrix head_weight;       // C × n_feat
    Vector head_bias;         // C

    std::size_t n_in() const noexcept { return projector_weight.cols(); }
    std::size_t n_feat() const noexcept { return projector_weight.rows(); }
    std::size_t rank() const noexcept { return metric.rank(); }
    std::size_t classes() const noexcept { return head_weight.rows(); }

    bool operator==(const ModelParams& o) const {
        return projector_weight == o.projector_weight && projector_bias == o.projector_bias &&
               metric.weights() == o.metric.weights() && head_weight == o.head_weight && head_bias == o.head_bias;
    }
};

struct ParamBlock {
    std::string_view name;
    std::span<double> values;
};

struct ConstParamBlock {
    std::string_view name;
    std::span<const double> values;
};

inline std::array<ParamBlock, 5> blocks(ModelParams& p) {
    return {{{"projector.weight", p.projector_weight.values()},
             {"projector.bias", p.projector_bias},
             {"metric.W", p.metric.weights().values()},
             {"head.weight", p.head_weight.values()},
             {"head.bias", p.head_bias}}};
}

inline std::array<ConstParamBlock, 5> blocks(const ModelParams& p) {
    return {{{"projector.weight", p.projector_weight.values()},
             {"projector.bias", p.projector_bias},
             {"metric.W", p.metric.weights().values()},
             {"head.weight", p.head_weight.values()},
             {"head.bias", p.head_bias}}};
}

/// Same-shaped zero parameters (gradient accumulator).
inline ModelParams zeros_like(const ModelParams& p) {
    ModelParams z;
    z.projector_weight = Matrix(p.projector_weight.rows(), p.projector_weight.cols());
    z.projector_bias = Vector(p.projector_bias.size(), 0.0);
    z.metric = MetricMatrix(Matrix(p.metric.rank(), p.metric.dim()));
    z.head_weight = Matrix(p.head_weight.rows(), p.head_weight.cols());
    z.head_bias = Vector(p.head_bias.size(), 0.0);
    return z;
}

/// Projector near the identity, metric per MetricMatrix::initialize (identity
/// for the naive variant), small random head.
inline ModelParams init_params(std::size_t n_in, std::size_t classes, const TrainConfig& cfg) {
    const std::size_t f = cfg.feature_dim(n_in);
    const std::size_t r = cfg.metric_rank(n_in);
    if (r > f) throw DimensionError("init_params: rank exceeds feature dimension");
    Rng rng(derive_seed(cfg.seed, {stream::params_init}));
    ModelParams p;
    p.projector_weight = Matrix(f, n_in);
    for (double& x : p.projector_weight.values()) x = normal(rng, 0.0, 0.01);
    for (std::size_t i = 0; i < std::min(f, n_in); ++i) p.projector_weight(i, i) += 1.0;
    p.projector_bias = Vector(f, 0.0);
    p.head_weight = Matrix(classes, f);
    const double sd = 0.1 / std::sqrt(static_cast<double>(f));
    for (double& x : p.head_weight.values()) x = normal(rng, 0.0, sd);
    p.head_bias = Vector(classes, 0.0);
    p.metric = cfg.variant == Variant::naive_cluster
                   ? MetricMatrix::identity(f)
                   : MetricMatrix::initialize(r, f, derive_seed(cfg.seed, {stream::metric_init}));
    return p;
}

/// tanh(X Pᵀ + b), row by row.
inline Matrix apply_projector(const ModelParams& p, const Matrix& x) {
    if (x.cols() != p.n_in()) {
        throw DimensionError("projector expects " + std::to_string(p.n_in()) + " input features, got " +
                             std::to_string(x.cols()));
    }
    Matrix z(x.rows(), p.n_feat());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto xi = x.row(i);
        auto zi = z.row(i);
        for (std::size_t o = 0; o < p.n_feat(); ++o) {
            auto w = p.projector_weight.row(o);
            double s = p.projector_bias[o];
            for (std::size_t j = 0; j < xi.size(); ++j) s += w[j] * xi[j];
            zi[o] = std::tanh(s);
        }
    }
    return z;
}

inline Vector softmax(std::span<const double> logits) {
    const double top = *std::max_element(logits.begin(), logits.end());
    Vector p(logits.size());
    double total = 0.0;
    for (std::size_t c = 0; c < logits.size(); ++c) {
        p[c] = std::exp(logits[c] - top);
        total += p[c];
    }
    for (double& x : p) x /= total;
    return p;
}

/// Assignments and semantic ranking held constant during differentiation.
struct FrozenState {
    std::vector<std::size_t> assignments;
    RankOrder order{0, 1, 2};
};

struct ForwardResult {
    Vector logits;
    Vector probs;
    Vector representation;  // input to the head (z_wsi for the full model)
    Matrix projected;       // Z = F(X)
    Matrix projected_prototypes;
    SubspacePartition partition;  // empty for no_cluster
    DisentangledBag detail;       // filled for the full model only
    std::optional<PhaseTable> instance_phases;   // full model with CFD
    std::optional<PhaseTable> prototype_phases;
    double ce = 0.0;
    double c_min = 0.0;
    double c_max = 0.0;
    double trace = 0.0;
    double loss = 0.0;  // valid when a label was supplied

    std::size_t predicted() const {
        return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
    }
    FrozenState frozen() const { return {partition.assignments, detail.order}; }
};

struct ModelContext {
    const PrototypeSet& prototypes;
    const FrequencySample& freqs;
    const TrainConfig& config;
};

namespace detail {

inline std::uint64_t cluster_seed(const TrainConfig& cfg, std::uint64_t bag_id) {
    return derive_seed(cfg.seed, {stream::clustering, bag_id});
}

// d_A(a, b) with v = W(a - b); returns the norm and writes v, a - b.
inline double metric_gap(const MetricMatrix& metric, std::span<const double> a, std::span<const double> b,
                         Vector& v, Vector& delta) {
    delta.assign(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) delta[i] = a[i] - b[i];
    v = matvec(metric.weights(), delta);
    return norm2(v);
}

}  // namespace detail

/// Runs the model on one bag. With `label`, also evaluates the loss terms.
/// With `frozen`, clustering and ranking are replaced by the given state.
inline ForwardResult forward(const Matrix& instances, std::uint64_t bag_id, const ModelParams& params,
                             const ModelContext& ctx, std::optional<std::size_t> label = std::nullopt,
                             const FrozenState* frozen = nullptr) {
    const TrainConfig& cfg = ctx.config;
    ForwardResult out;
    out.projected = apply_projector(params, instances);
    const Matrix& z = out.projected;

    switch (cfg.variant) {
        case Variant::no_cluster:
            out.representation = column_mean(z);
            break;
        case Variant::naive_cluster:
        case Variant::lrsc_only: {
            const MetricMatrix& metric = params.metric;
            if (frozen) {
                out.partition = partition_from_assignments(project_rows(metric, z), frozen->assignments, cfg.k);
            } else {
                out.partition = cluster(z, metric, cfg.k, detail::cluster_seed(cfg, bag_id));
            }
            out.representation = Vector(params.n_feat(), 0.0);
            for (std::size_t c = 0; c < cfg.k; ++c) {
                const Vector pooled = pool_subspace(z, out.partition.assignments, c);
                for (std::size_t j = 0; j < pooled.size(); ++j)
                    out.representation[j] += pooled[j] / static_cast<double>(cfg.k);
            }
            break;
        }
        case Variant::full: {
            if (frozen) {
                out.partition =
                    partition_from_assignments(project_rows(params.metric, z), frozen->assignments, cfg.k);
            } else {
                out.partition = cluster(z, params.metric, cfg.k, detail::cluster_seed(cfg, bag_id));
            }
            out.projected_prototypes = apply_projector(params, ctx.prototypes.features);
            const Matrix& zp = out.projected_prototypes;
            std::array<double, 3> d{};
            if (cfg.metric == DistanceMetric::cfd) {
                out.instance_phases = phase_table(z, ctx.freqs);
                out.prototype_phases = phase_table(zp, ctx.freqs);
                const CfSeries proto_series = cf_series(*out.prototype_phases, all_rows(zp.rows()));
                for (std::size_t c = 0; c < 3; ++c) {
                    std::vector<std::size_t> idx = out.partition.members(c);
                    if (idx.empty()) idx = all_rows(z.rows());
                    d[c] = cfd_from_series(cf_series(*out.instance_phases, idx), proto_series);
                }
            } else {
                for (std::size_t c = 0; c < 3; ++c) {
                    const std::vector<std::size_t> idx = out.partition.members(c);
                    d[c] = mmd_distance(idx.empty() ? z : select_rows(z, idx), zp, cfg.bandwidth());
                }
            }
            out.detail = disentangle_from_distances(out.partition, z, column_mean(zp), d,
                                                    frozen ? std::optional<RankOrder>(frozen->order) : std::nullopt);
            out.representation = refine(out.detail, cfg.epsilon, cfg.normalization);
            break;
        }
    }

    out.logits = matvec(params.head_weight, out.representation);
    for (std::size_t c = 0; c < out.logits.size(); ++c) out.logits[c] += params.head_bias[c];
    out.probs = softmax(out.logits);

    if (label) {
        if (*label >= params.classes()) throw DimensionError("loss: label out of range");
        out.ce = -std::log(std::max(out.probs[*label], 1e-300));
        out.loss = out.ce;
        if (cfg.variant == Variant::full) {
            Vector v, delta;
            out.c_min = detail::metric_gap(params.metric, out.detail.pooled[out.detail.order[0]],
                                           out.detail.prototype_mean, v, delta);
            out.c_max = detail::metric_gap(params.metric, out.detail.pooled[out.detail.order[2]],
                                           out.detail.prototype_mean, v, delta);
            out.loss += cfg.gamma1 * out.c_min - cfg.gamma2 * std::min(out.c_max, cfg.c_max_cap);
        }
        if (cfg.variant == Variant::full || cfg.variant == Variant::lrsc_only) {
            out.trace = trace_reg(params.metric);
            out.loss += cfg.gamma3 * out.trace;
        }
    }
    return out;
}

inline ForwardResult forward(const Bag& bag, const ModelParams& params, const ModelContext& ctx,
                             std::optional<std::size_t> label = std::nullopt) {
    return forward(bag.features, bag.bag_id, params, ctx, label);
}

inline double loss(const Bag& bag, std::size_t label, const ModelParams& params, const ModelContext& ctx) {
    return forward(bag.features, bag.bag_id, params, ctx, label).loss;
}

/// Gradient of the loss at the state captured by `fwd` (assignments and
/// ranking frozen). `fwd` must come from `forward` with the same label.
inline ModelParams backward(const Matrix& instances, std::size_t label, const ModelParams& params,
                            const ModelContext& ctx, const ForwardResult& fwd) {
    const TrainConfig& cfg = ctx.config;
    ModelParams g = zeros_like(params);
    const std::size_t f = params.n_feat();
    const Matrix& z = fwd.projected;

    // Softmax cross-entropy.
    Vector g_logits = fwd.probs;
    g_logits[label] -= 1.0;
    for (std::size_t c = 0; c < g_logits.size(); ++c) {
        g.head_bias[c] = g_logits[c];
        auto row = g.head_weight.row(c);
        for (std::size_t j = 0; j < f; ++j) row[j] = g_logits[c] * fwd.representation[j];
    }
    const Vector g_rep = matvec_transposed(params.head_weight, g_logits);

    Matrix g_z(z.rows(), f);
    Matrix g_zp;

    auto spread_to_members = [&](const Vector& g_mean, std::size_t cluster) {
        const std::vector<std::size_t> idx = fwd.partition.members(cluster);
        const double inv = 1.0 / static_cast<double>(idx.size());
        for (std::size_t i : idx) {
            auto gi = g_z.row(i);
            for (std::size_t j = 0; j < f; ++j) gi[j] += g_mean[j] * inv;
        }
    };

    switch (cfg.variant) {
        case Variant::no_cluster: {
            const double inv = 1.0 / static_cast<double>(z.rows());
            for (std::size_t i = 0; i < z.rows(); ++i) {
                auto gi = g_z.row(i);
                for (std::size_t j = 0; j < f; ++j) gi[j] = g_rep[j] * inv;
            }
            break;
        }
        case Variant::naive_cluster:
        case Variant::lrsc_only: {
            Vector g_mean(f);
            for (std::size_t j = 0; j < f; ++j) g_mean[j] = g_rep[j] / static_cast<double>(cfg.k);
            for (std::size_t c = 0; c < cfg.k; ++c) spread_to_members(g_mean, c);
            break;
        }
        case Variant::full: {
            const DisentangledBag& d = fwd.detail;
            const Matrix& zp = fwd.projected_prototypes;
            g_zp = Matrix(zp.rows(), f);
            std::array<Vector, 3> g_pooled;
            Vector g_proto_mean = g_rep;  // prototype weight is exactly 1
            std::array<double, 3> g_w{};
            for (std::size_t c = 0; c < 3; ++c) {
                g_pooled[c] = Vector(f);
                for (std::size_t j = 0; j < f; ++j) g_pooled[c][j] = d.weights[c] * g_rep[j];
                g_w[c] = dot(g_rep, d.pooled[c]);
            }

            // w_c = 1 - d_c / D, with D = d_max + eps or sum(d) + eps.
            std::array<double, 3> g_d{};
            const double denom = (cfg.normalization == Normalization::max ? d.distances[d.order[2]]
                                                                          : d.distances[0] + d.distances[1] +
                                                                                d.distances[2]) +
                                 cfg.epsilon;
            double through_denom = 0.0;
            for (std::size_t c = 0; c < 3; ++c) {
                g_d[c] -= g_w[c] / denom;
                through_denom += g_w[c] * d.distances[c] / (denom * denom);
            }
            if (cfg.normalization == Normalization::max) {
                g_d[d.order[2]] += through_denom;
            } else {
                for (double& x : g_d) x += through_denom;
            }

            // Cluster-separation terms.
            auto separation = [&](std::size_t cluster, double weight) {
                Vector v, delta;
                const double c = detail::metric_gap(params.metric, d.pooled[cluster], d.prototype_mean, v, delta);
                if (c == 0.0 || weight == 0.0) return;
                const Matrix& w = params.metric.weights();
                for (std::size_t a = 0; a < w.rows(); ++a) {
                    auto gw = g.metric.weights().row(a);
                    const double s = weight * v[a] / c;
                    for (std::size_t b = 0; b < w.cols(); ++b) gw[b] += s * delta[b];
                }
                Vector g_delta = matvec_transposed(w, v);
                for (std::size_t j = 0; j < f; ++j) {
                    const double gj = weight * g_delta[j] / c;
                    g_pooled[cluster][j] += gj;
                    g_proto_mean[j] -= gj;
                }
            };
            separation(d.order[0], cfg.gamma1);
            if (fwd.c_max < cfg.c_max_cap) separation(d.order[2], -cfg.gamma2);

            // Pooled means and prototype mean.
            for (std::size_t c = 0; c < 3; ++c) spread_to_members(g_pooled[c], c);
            const double inv_p = 1.0 / static_cast<double>(zp.rows());
            for (std::size_t i = 0; i < zp.rows(); ++i) {
                auto gi = g_zp.row(i);
                for (std::size_t j = 0; j < f; ++j) gi[j] += g_proto_mean[j] * inv_p;
            }

            // Set distances to the prototypes.
            const std::vector<std::size_t> proto_rows = all_rows(zp.rows());
            std::optional<CfSeries> proto_series;
            if (cfg.metric == DistanceMetric::cfd) proto_series = cf_series(*fwd.prototype_phases, proto_rows);
            for (std::size_t c = 0; c < 3; ++c) {
                if (g_d[c] == 0.0) continue;
                const std::vector<std::size_t> idx = fwd.partition.members(c);
                if (cfg.metric == DistanceMetric::cfd) {
                    cfd_backward(*fwd.instance_phases, idx, cf_series(*fwd.instance_phases, idx), *fwd.prototype_phases,
                                 proto_rows, *proto_series, ctx.freqs, g_d[c], g_z, g_zp);
                } else {
                    const Matrix zc = select_rows(z, idx);
                    Matrix g_zc(zc.rows(), f);
                    mmd_backward(zc, zp, cfg.bandwidth(), g_d[c], g_zc, g_zp);
                    for (std::size_t r = 0; r < idx.size(); ++r) {
                        auto dst = g_z.row(idx[r]);
                        auto src = g_zc.row(r);
                        for (std::size_t j = 0; j < f; ++j) dst[j] += src[j];
                    }
                }
            }
            break;
        }
    }

    if (cfg.variant == Variant::full || cfg.variant == Variant::lrsc_only) {
        const Matrix& w = params.metric.weights();
        auto gw = g.metric.weights().values();
        auto wv = w.values();
        for (std::size_t i = 0; i < gw.size(); ++i) gw[i] += 2.0 * cfg.gamma3 * wv[i];
    }

    // Through tanh into the projector.
    auto projector_backward = [&](const Matrix& x, const Matrix& zz, const Matrix& gz) {
        for (std::size_t i = 0; i < x.rows(); ++i) {
            auto xi = x.row(i);
            for (std::size_t o = 0; o < f; ++o) {
                const double gpre = gz(i, o) * (1.0 - zz(i, o) * zz(i, o));
                if (gpre == 0.0) continue;
                g.projector_bias[o] += gpre;
                auto gw = g.projector_weight.row(o);
                for (std::size_t j = 0; j < xi.size(); ++j) gw[j] += gpre * xi[j];
            }
        }
    };
    projector_backward(instances, z, g_z);
    if (cfg.variant == Variant::full) projector_backward(ctx.prototypes.features, fwd.projected_prototypes, g_zp);

    for (const auto& b : blocks(std::as_const(g))) {
        for (std::size_t i = 0; i < b.values.size(); ++i) {
            if (!std::isfinite(b.values[i])) {
                throw NumericalError("non-finite gradient at " + std::string(b.name) + "[" + std::to_string(i) + "]");
            }
        }
    }
    return g;
}

/// Per-block worst coordinate of a gradient check.
struct BlockCheck {
    std::string block;
    GradReport worst;
    std::size_t probes = 0;
};

struct GradientCheckResult {
    std::vector<GradReport> probes;
    std::vector<std::string> probe_blocks;
    std::vector<BlockCheck> per_block;
    double max_relative_error = 0.0;
    double tolerance = 1e-5;
    bool passed() const { return max_relative_error <= tolerance; }
};

/// Compares `backward` to central differences of the frozen-state loss at
/// `coordinates` coordinates spread round-robin across the parameter blocks.
/// `tamper` may modify the analytic gradient before comparison (fault injection).
inline GradientCheckResult gradient_check(const Matrix& instances, std::uint64_t bag_id, std::size_t label,
                                          const ModelParams& params, const ModelContext& ctx,
                                          std::size_t coordinates, std::uint64_t seed, double h = 1e-6,
                                          double tolerance = 1e-5,
                                          const std::function<void(ModelParams&)>& tamper = {}) {
    const ForwardResult base = forward(instances, bag_id, params, ctx, label);
    const FrozenState frozen = base.frozen();
    ModelParams analytic = backward(instances, label, params, ctx, base);
    if (tamper) tamper(analytic);

    GradientCheckResult result;
    result.tolerance = tolerance;
    Rng rng(seed);
    ModelParams probe = params;
    const auto grad_blocks = blocks(std::as_const(analytic));
    auto probe_blocks = blocks(probe);

    // Skip blocks the variant never touches (all-zero analytic and numeric).
    std::vector<std::size_t> active;
    for (std::size_t b = 0; b < probe_blocks.size(); ++b) {
        const bool metric_used = ctx.config.variant == Variant::full || ctx.config.variant == Variant::lrsc_only;
        if (probe_blocks[b].name == "metric.W" && !metric_used) continue;
        active.push_back(b);
    }
    result.per_block.resize(active.size());
    for (std::size_t a = 0; a < active.size(); ++a) result.per_block[a].block = probe_blocks[active[a]].name;

    for (std::size_t n = 0; n < coordinates; ++n) {
        const std::size_t a = n % active.size();
        const std::size_t b = active[a];
        auto values = probe_blocks[b].values;
        const std::size_t i = uniform_index(rng, values.size());
        const double original = values[i];
        auto eval = [&](double x) {
            values[i] = x;
            const double l = forward(instances, bag_id, probe, ctx, label, &frozen).loss;
            values[i] = original;
            return l;
        };
        const double up = eval(original + h);
        const double down = eval(original - h);
        if (!std::isfinite(up) || !std::isfinite(down)) throw NumericalError("gradient_check: non-finite loss");
        const double numeric = (up - down) / (2.0 * h);
        const GradReport rep = make_grad_report(i, grad_blocks[b].values[i], numeric);
        result.probes.push_back(rep);
        result.probe_blocks.emplace_back(probe_blocks[b].name);
        BlockCheck& bc = result.per_block[a];
        if (bc.probes == 0 || rep.relative_error > bc.worst.relative_error) bc.worst = rep;
        ++bc.probes;
        result.max_relative_error = std::max(result.max_relative_error, rep.relative_error);
    }
    return result;
}

}  // namespace pidlrsc
