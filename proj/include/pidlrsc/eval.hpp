#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pidlrsc/log.hpp"
#include "pidlrsc/trainer.hpp"

namespace pidlrsc {

inline double accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> labels) {
    if (predicted.size() != labels.size()) throw DimensionError("accuracy: length mismatch");
    if (predicted.empty()) throw EmptySetError("accuracy: no samples");
    std::size_t hit = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) hit += predicted[i] == labels[i];
    return static_cast<double>(hit) / static_cast<double>(labels.size());
}

namespace detail {

// Mann-Whitney AUC with average ranks for ties.
inline double rank_auc(std::span<const double> scores, std::span<const std::uint8_t> positive) {
    const std::size_t n = scores.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && scores[idx[j + 1]] == scores[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t q = i; q <= j; ++q) rank[idx[q]] = avg;
        i = j + 1;
    }
    double pos_rank_sum = 0.0;
    double n_pos = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (positive[i]) {
            pos_rank_sum += rank[i];
            n_pos += 1.0;
        }
    }
    const double n_neg = static_cast<double>(n) - n_pos;
    return (pos_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

}  // namespace detail

/// One-vs-rest macro AUC. Classes without positives or negatives are skipped.
inline double macro_auc(const Matrix& probs, std::span<const std::size_t> labels) {
    if (probs.rows() != labels.size()) throw DimensionError("macro_auc: row count does not match labels");
    if (probs.rows() == 0) throw UndefinedMetricError("macro_auc: no samples");
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        double s = 0.0;
        for (double p : probs.row(i)) s += p;
        if (std::abs(s - 1.0) > 1e-9) throw NumericalError("macro_auc: row " + std::to_string(i) + " does not sum to 1");
    }
    double total = 0.0;
    std::size_t defined = 0;
    std::vector<double> scores(probs.rows());
    std::vector<std::uint8_t> positive(probs.rows());
    for (std::size_t c = 0; c < probs.cols(); ++c) {
        std::size_t n_pos = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            scores[i] = probs(i, c);
            positive[i] = labels[i] == c;
            n_pos += positive[i];
        }
        if (n_pos == 0 || n_pos == labels.size()) {
            log::warn("macro_auc: class " + std::to_string(c) + " skipped (needs positives and negatives)");
            continue;
        }
        total += detail::rank_auc(scores, positive);
        ++defined;
    }
    if (defined == 0) throw UndefinedMetricError("macro_auc: no class has a defined AUC");
    return total / static_cast<double>(defined);
}

/// One-way ANOVA effect size SS_between / SS_total of 1-D values.
inline double eta_squared_1d(std::span<const double> values, std::span<const std::size_t> labels) {
    if (values.size() != labels.size()) throw DimensionError("eta_squared: length mismatch");
    if (values.size() < 2) throw UndefinedMetricError("eta_squared: need at least 2 samples");
    std::map<std::size_t, std::pair<double, std::size_t>> groups;
    double grand = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto& g = groups[labels[i]];
        g.first += values[i];
        ++g.second;
        grand += values[i];
    }
    if (groups.size() < 2) throw UndefinedMetricError("eta_squared: need at least 2 classes");
    grand /= static_cast<double>(values.size());
    double ss_total = 0.0;
    for (double v : values) ss_total += (v - grand) * (v - grand);
    if (ss_total == 0.0) {
        log::warn("eta_squared: zero total variance");
        return 0.0;
    }
    double ss_between = 0.0;
    for (const auto& [label, g] : groups) {
        const double mean = g.first / static_cast<double>(g.second);
        ss_between += static_cast<double>(g.second) * (mean - grand) * (mean - grand);
    }
    return ss_between / ss_total;
}

/// Projection of each row onto the direction between the means of the two
/// most populous classes (ties to the lower class index).
inline Vector class_direction_projection(const Matrix& features, std::span<const std::size_t> labels) {
    if (features.rows() != labels.size()) throw DimensionError("eta_squared: row count does not match labels");
    std::map<std::size_t, std::size_t> counts;
    for (std::size_t l : labels) ++counts[l];
    if (counts.size() < 2) throw UndefinedMetricError("eta_squared: need at least 2 classes");
    std::vector<std::pair<std::size_t, std::size_t>> by_count(counts.begin(), counts.end());
    std::stable_sort(by_count.begin(), by_count.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    const std::size_t ca = std::min(by_count[0].first, by_count[1].first);
    const std::size_t cb = std::max(by_count[0].first, by_count[1].first);

    Vector mean_a(features.cols(), 0.0), mean_b(features.cols(), 0.0);
    for (std::size_t i = 0; i < features.rows(); ++i) {
        Vector* dst = labels[i] == ca ? &mean_a : labels[i] == cb ? &mean_b : nullptr;
        if (!dst) continue;
        auto r = features.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) (*dst)[j] += r[j];
    }
    Vector dir(features.cols());
    for (std::size_t j = 0; j < dir.size(); ++j) {
        dir[j] = mean_b[j] / static_cast<double>(counts[cb]) - mean_a[j] / static_cast<double>(counts[ca]);
    }
    const double len = norm2(dir);
    if (len > 0.0)
        for (double& x : dir) x /= len;
    Vector out(features.rows());
    for (std::size_t i = 0; i < features.rows(); ++i) out[i] = dot(features.row(i), dir);
    return out;
}

inline double eta_squared(const Matrix& features, std::span<const std::size_t> labels) {
    const Vector proj = class_direction_projection(features, labels);
    return eta_squared_1d(proj, labels);
}

struct DisentangleScore {
    double anchored = 0.0;          // TIs/NTIs/BGIs read directly as tumor/nontumor/background
    double best_permutation = 0.0;  // best relabeling per bag
    double tumor_anchored = 0.0;    // anchored, tumor instances only
    std::size_t instances = 0;
    std::size_t tumor_instances = 0;
};

/// Agreement of semantic instance maps with generator roles.
inline DisentangleScore disentangle_accuracy(std::span<const std::vector<Semantic>> maps,
                                             std::span<const std::vector<Role>> roles) {
    if (maps.size() != roles.size()) throw DimensionError("disentangle_accuracy: bag count mismatch");
    DisentangleScore s;
    std::size_t anchored = 0, best = 0, tumor_hit = 0;
    for (std::size_t b = 0; b < maps.size(); ++b) {
        if (roles[b].empty() && !maps[b].empty()) {
            throw RolesUnavailableError("disentangle_accuracy: bag " + std::to_string(b) + " has no roles");
        }
        if (roles[b].size() != maps[b].size()) throw DimensionError("disentangle_accuracy: instance count mismatch");
        std::array<std::array<std::size_t, 3>, 3> confusion{};
        for (std::size_t i = 0; i < maps[b].size(); ++i) {
            const auto sem = static_cast<std::size_t>(maps[b][i]);
            const auto role = static_cast<std::size_t>(roles[b][i]);
            ++confusion[sem][role];
            if (sem == role) ++anchored;
            if (roles[b][i] == Role::tumor) {
                ++s.tumor_instances;
                if (maps[b][i] == Semantic::TIs) ++tumor_hit;
            }
        }
        std::array<std::size_t, 3> perm{0, 1, 2};
        std::size_t bag_best = 0;
        do {
            std::size_t hits = 0;
            for (std::size_t k = 0; k < 3; ++k) hits += confusion[k][perm[k]];
            bag_best = std::max(bag_best, hits);
        } while (std::next_permutation(perm.begin(), perm.end()));
        best += bag_best;
        s.instances += maps[b].size();
    }
    if (s.instances == 0) throw RolesUnavailableError("disentangle_accuracy: no instances with roles");
    s.anchored = static_cast<double>(anchored) / static_cast<double>(s.instances);
    s.best_permutation = static_cast<double>(best) / static_cast<double>(s.instances);
    s.tumor_anchored = s.tumor_instances ? static_cast<double>(tumor_hit) / static_cast<double>(s.tumor_instances) : 0.0;
    return s;
}

struct EvalReport {
    std::string variant;
    std::string metric;
    std::uint64_t seed = 0;
    double acc = 0.0;
    std::optional<double> auc;
    std::optional<double> eta2;
    std::optional<DisentangleScore> disentangle;
    double seconds = 0.0;
    std::size_t test_bags = 0;
    std::optional<std::string> error;

    std::vector<std::uint64_t> bag_ids;
    std::vector<std::size_t> labels;
    std::vector<std::size_t> predicted;
    Vector projection;  // 1-D class-direction projection of the representations
};

/// Scores trained parameters on `test` with the fixed evaluation frequencies.
inline EvalReport evaluate(std::span<const Bag> test, const ModelParams& params, const PrototypeSet& prototypes,
                           const TrainConfig& cfg) {
    if (test.empty()) throw EmptySetError("evaluate: empty test set");
    const FrequencySample freqs = eval_frequencies(cfg, params.n_feat());
    const ModelContext ctx{prototypes, freqs, cfg};

    EvalReport r;
    r.variant = std::string(to_string(cfg.variant));
    r.metric = std::string(to_string(cfg.metric));
    r.seed = cfg.seed;
    r.test_bags = test.size();
    Matrix probs(test.size(), params.classes());
    Matrix reps(test.size(), params.n_feat());
    std::vector<std::vector<Semantic>> maps;
    std::vector<std::vector<Role>> roles;
    for (std::size_t b = 0; b < test.size(); ++b) {
        const ForwardResult f = forward(test[b], params, ctx);
        std::copy(f.probs.begin(), f.probs.end(), probs.row(b).begin());
        std::copy(f.representation.begin(), f.representation.end(), reps.row(b).begin());
        r.bag_ids.push_back(test[b].bag_id);
        r.labels.push_back(test[b].label);
        r.predicted.push_back(f.predicted());
        if (cfg.variant == Variant::full) {
            maps.push_back(f.detail.instance_map);
            roles.push_back(test[b].roles);
        }
    }
    r.acc = accuracy(r.predicted, r.labels);
    try {
        r.auc = macro_auc(probs, r.labels);
    } catch (const UndefinedMetricError& e) {
        log::warn(e.what());
    }
    try {
        r.projection = class_direction_projection(reps, r.labels);
        r.eta2 = eta_squared_1d(r.projection, r.labels);
    } catch (const UndefinedMetricError& e) {
        log::warn(e.what());
    }
    if (!maps.empty()) {
        try {
            r.disentangle = disentangle_accuracy(maps, roles);
        } catch (const RolesUnavailableError& e) {
            log::warn(e.what());
        }
    }
    return r;
}

/// Trains on `train`, evaluates on `test`; `seconds` covers both.
inline EvalReport run_variant(std::span<const Bag> train_set, std::span<const Bag> test, const PrototypeSet& prototypes,
                              const TrainConfig& cfg, std::size_t classes) {
    const auto start = std::chrono::steady_clock::now();
    const TrainResult trained = train(train_set, prototypes, cfg, classes);
    EvalReport r = evaluate(test, trained.params, prototypes, cfg);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

struct VariantSpec {
    std::string name;
    Variant variant;
    DistanceMetric metric;
};

inline std::vector<VariantSpec> ablation_variants() {
    return {{"no_cluster", Variant::no_cluster, DistanceMetric::cfd},
            {"naive_cluster", Variant::naive_cluster, DistanceMetric::cfd},
            {"lrsc_only", Variant::lrsc_only, DistanceMetric::cfd},
            {"full", Variant::full, DistanceMetric::cfd},
            {"full_mmd", Variant::full, DistanceMetric::mmd}};
}

/// Seeded 70/30 split of bag indices: (train, test).
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n, std::uint64_t seed,
                                                                                   double train_fraction = 0.7) {
    if (n < 2) throw DimensionError("split: need at least 2 bags");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(derive_seed(seed, {stream::split}));
    shuffle(std::span<std::size_t>(idx), rng);
    auto n_train = static_cast<std::size_t>(std::round(train_fraction * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    std::vector<std::size_t> tr(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> te(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    return {tr, te};
}

inline double median(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

struct AblationRow {
    std::string name;
    std::vector<EvalReport> runs;  // one per seed, failures carry `error`
    double median_acc = std::nan("");
    double median_auc = std::nan("");
    double median_eta2 = std::nan("");
    double median_tumor = std::nan("");
};

struct AblationTable {
    std::vector<AblationRow> rows;

    const AblationRow& row(std::string_view name) const {
        for (const auto& r : rows)
            if (r.name == name) return r;
        throw NotFoundError("ablation: no row " + std::string(name));
    }
};

using ReportCallback = std::function<void(const EvalReport&)>;

/// Every variant on every seed. The split and training seeds are both `seed`.
inline AblationTable run_ablation(std::span<const Bag> dataset, const PrototypeSet& prototypes,
                                  const TrainConfig& base, std::size_t classes, std::span<const std::uint64_t> seeds,
                                  const ReportCallback& on_report = {}) {
    if (seeds.empty()) throw DimensionError("ablation: no seeds");
    AblationTable table;
    for (const VariantSpec& spec : ablation_variants()) table.rows.push_back({spec.name, {}});
    const auto specs = ablation_variants();
    for (std::uint64_t seed : seeds) {
        const auto [tr_idx, te_idx] = split_indices(dataset.size(), seed);
        std::vector<Bag> tr, te;
        for (std::size_t i : tr_idx) tr.push_back(dataset[i]);
        for (std::size_t i : te_idx) te.push_back(dataset[i]);
        for (std::size_t v = 0; v < specs.size(); ++v) {
            TrainConfig cfg = base;
            cfg.seed = seed;
            cfg.variant = specs[v].variant;
            cfg.metric = specs[v].metric;
            EvalReport r;
            try {
                r = run_variant(tr, te, prototypes, cfg, classes);
            } catch (const Error& e) {
                r.seed = seed;
                r.metric = std::string(to_string(cfg.metric));
                r.error = e.what();
                log::warn("ablation: " + specs[v].name + " seed " + std::to_string(seed) + ": " + e.what());
            }
            r.variant = specs[v].name;
            if (on_report) on_report(r);
            table.rows[v].runs.push_back(std::move(r));
        }
    }
    for (AblationRow& row : table.rows) {
        std::vector<double> acc, auc, eta, tumor;
        for (const EvalReport& r : row.runs) {
            if (r.error) continue;
            acc.push_back(r.acc);
            if (r.auc) auc.push_back(*r.auc);
            if (r.eta2) eta.push_back(*r.eta2);
            if (r.disentangle) tumor.push_back(r.disentangle->tumor_anchored);
        }
        row.median_acc = median(acc);
        row.median_auc = median(auc);
        row.median_eta2 = median(eta);
        row.median_tumor = median(tumor);
    }
    return table;
}

}  // namespace pidlrsc
