#pragma once

// Prototype-anchored disentanglement: clusters are ranked by their distance
// to the prototype set (closest = tumor, farthest = background) and the bag
// representation is the distance-weighted sum of pooled cluster features plus
// the prototype mean.

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pidlrsc/cfd.hpp"
#include "pidlrsc/linalg.hpp"
#include "pidlrsc/lrsc.hpp"

namespace pidlrsc {

enum class Semantic { TIs = 0, NTIs = 1, BGIs = 2 };

inline std::string_view to_string(Semantic s) {
    switch (s) {
        case Semantic::TIs: return "TIs";
        case Semantic::NTIs: return "NTIs";
        case Semantic::BGIs: return "BGIs";
    }
    return "?";
}

struct PrototypeSet {
    enum class Source { synthetic, file };

    Matrix features;  // p × n
    Source source = Source::synthetic;

    std::size_t count() const noexcept { return features.rows(); }
};

enum class Normalization { max, sum };

/// Clusters ordered by rank: order[0] is TIs, order[1] NTIs, order[2] BGIs.
using RankOrder = std::array<std::size_t, 3>;

struct DisentangledBag {
    std::array<Semantic, 3> semantic_of_cluster{};
    RankOrder order{};
    std::array<double, 3> distances{};             // per cluster
    std::array<double, 3> normalized_distances{};  // per cluster
    std::array<double, 3> weights{};               // per cluster, 1 - normalized distance
    std::array<Vector, 3> pooled;                  // per cluster
    Vector prototype_mean;
    Vector z_wsi;
    std::vector<Semantic> instance_map;
    bool degenerate = false;  // an empty cluster was replaced by the bag mean

    /// Weights as (TIs, NTIs, BGIs, prototypes).
    std::array<double, 4> semantic_weights() const {
        return {weights[order[0]], weights[order[1]], weights[order[2]], 1.0};
    }
    double distance_of(Semantic s) const { return distances[order[static_cast<std::size_t>(s)]]; }
};

/// Mean of the instances assigned to `cluster`.
inline Vector pool_subspace(const Matrix& features, std::span<const std::size_t> assignments, std::size_t cluster) {
    if (assignments.size() != features.rows()) throw DimensionError("pool_subspace: assignment count mismatch");
    Vector mean(features.cols(), 0.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] != cluster) continue;
        auto r = features.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) mean[j] += r[j];
        ++count;
    }
    if (count == 0) throw EmptyClusterError("pool_subspace: cluster " + std::to_string(cluster) + " is empty");
    for (double& x : mean) x /= static_cast<double>(count);
    return mean;
}

/// Rank clusters by ascending distance; ties keep the lower cluster index first.
inline RankOrder rank_by_distance(const std::array<double, 3>& d) {
    RankOrder order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    return order;
}

/// Normalized distances: d / (max + eps) or d / (sum + eps).
inline std::array<double, 3> normalize_distances(const std::array<double, 3>& d, const RankOrder& order,
                                                 double epsilon, Normalization mode = Normalization::max) {
    const double denom = (mode == Normalization::max ? d[order[2]] : d[0] + d[1] + d[2]) + epsilon;
    return {d[0] / denom, d[1] / denom, d[2] / denom};
}

/// Fills normalized distances, weights and z_wsi; returns z_wsi.
inline Vector refine(DisentangledBag& bag, double epsilon, Normalization mode = Normalization::max) {
    if (!(epsilon > 0.0)) throw NumericalError("refine: epsilon must be positive");
    bag.normalized_distances = normalize_distances(bag.distances, bag.order, epsilon, mode);
    for (std::size_t c = 0; c < 3; ++c) bag.weights[c] = 1.0 - bag.normalized_distances[c];
    Vector z = bag.prototype_mean;
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t j = 0; j < z.size(); ++j) z[j] += bag.weights[c] * bag.pooled[c][j];
    }
    bag.z_wsi = z;
    return z;
}

/// Ranks clusters by the given distances and fills pooled vectors and the
/// instance map. Empty clusters take the bag mean and flag the bag.
/// With `frozen_order` the semantic ranking is taken as given instead of sorted.
inline DisentangledBag disentangle_from_distances(const SubspacePartition& partition, const Matrix& features,
                                                  Vector prototype_mean, const std::array<double, 3>& distances,
                                                  std::optional<RankOrder> frozen_order = std::nullopt) {
    if (partition.k() != 3) throw DimensionError("disentangle: expected 3 clusters");
    if (partition.assignments.size() != features.rows()) {
        throw DimensionError("disentangle: partition does not match the instance count");
    }
    DisentangledBag out;
    out.prototype_mean = std::move(prototype_mean);
    out.distances = distances;
    for (std::size_t c = 0; c < 3; ++c) {
        try {
            out.pooled[c] = pool_subspace(features, partition.assignments, c);
        } catch (const EmptyClusterError&) {
            out.degenerate = true;
            out.pooled[c] = column_mean(features);
        }
    }
    out.order = frozen_order ? *frozen_order : rank_by_distance(out.distances);
    for (std::size_t rank = 0; rank < 3; ++rank) out.semantic_of_cluster[out.order[rank]] = static_cast<Semantic>(rank);
    out.instance_map.reserve(features.rows());
    for (std::size_t a : partition.assignments) out.instance_map.push_back(out.semantic_of_cluster[a]);
    return out;
}

/// Disentangles with an arbitrary set distance `distance(Z_k, prototypes)`.
/// An empty cluster is measured as the whole bag.
template <typename DistanceFn>
DisentangledBag disentangle_with(const SubspacePartition& partition, const Matrix& features,
                                 const PrototypeSet& prototypes, DistanceFn&& distance,
                                 std::optional<RankOrder> frozen_order = std::nullopt) {
    if (partition.k() != 3) throw DimensionError("disentangle: expected 3 clusters");
    if (prototypes.count() == 0) throw EmptySetError("disentangle: empty prototype set");
    std::array<double, 3> d{};
    for (std::size_t c = 0; c < 3; ++c) {
        const std::vector<std::size_t> idx = partition.members(c);
        d[c] = idx.empty() ? distance(features, prototypes.features)
                           : distance(select_rows(features, idx), prototypes.features);
    }
    return disentangle_from_distances(partition, features, column_mean(prototypes.features), d, frozen_order);
}

inline DisentangledBag disentangle(const SubspacePartition& partition, const Matrix& features,
                                   const PrototypeSet& prototypes, const FrequencySample& freqs) {
    return disentangle_with(partition, features, prototypes,
                            [&](const Matrix& a, const Matrix& b) { return cfd_distance(a, b, freqs); });
}

}  // namespace pidlrsc
