#pragma once

// k-means in the W-projected space. Initialization visits points in a
// canonical content order so the result does not depend on instance order.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "pidlrsc/linalg.hpp"
#include "pidlrsc/metric.hpp"
#include "pidlrsc/rng.hpp"

namespace pidlrsc {

struct SubspacePartition {
    std::vector<std::size_t> assignments;  // one per instance, input order
    Matrix centroids;                      // k × r
    double inertia = 0.0;
    std::size_t iterations_used = 0;
    std::vector<double> inertia_history;   // after every Lloyd iteration

    std::size_t k() const noexcept { return centroids.rows(); }

    std::vector<std::size_t> members(std::size_t cluster) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < assignments.size(); ++i)
            if (assignments[i] == cluster) out.push_back(i);
        return out;
    }
};

namespace detail {

inline std::uint64_t content_hash(std::span<const double> row) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double x : row) {
        auto bits = std::bit_cast<std::uint64_t>(x == 0.0 ? 0.0 : x);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

/// Index of the nearest centroid; ties go to the lowest index.
inline std::size_t nearest_centroid(std::span<const double> p, const Matrix& centroids, double* dist = nullptr) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
        const double d = squared_distance(p, centroids.row(c));
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (dist) *dist = best_d;
    return best;
}

/// Ascending lexicographic order of `points`, ties by hash of `content`.
inline std::vector<std::size_t> canonical_order(const Matrix& points, const Matrix& content) {
    std::vector<std::uint64_t> hashes(content.rows());
    for (std::size_t i = 0; i < content.rows(); ++i) hashes[i] = content_hash(content.row(i));
    std::vector<std::size_t> order(points.rows());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        auto ra = points.row(a);
        auto rb = points.row(b);
        for (std::size_t j = 0; j < ra.size(); ++j) {
            if (ra[j] < rb[j]) return true;
            if (rb[j] < ra[j]) return false;
        }
        return hashes[a] < hashes[b];
    });
    return order;
}

inline std::size_t count_distinct_sorted(const Matrix& sorted) {
    if (sorted.rows() == 0) return 0;
    std::size_t distinct = 1;
    for (std::size_t i = 1; i < sorted.rows(); ++i) {
        auto a = sorted.row(i - 1);
        auto b = sorted.row(i);
        if (!std::equal(a.begin(), a.end(), b.begin())) ++distinct;
    }
    return distinct;
}

}  // namespace detail

namespace detail {

// Greedy k-means++ seeding over `sorted`: each new center is the best of
// `trials` D²-sampled candidates by resulting potential.
inline Matrix seed_centroids(const Matrix& sorted, std::size_t k, std::size_t trials, Rng& rng) {
    const std::size_t m = sorted.rows();
    Matrix centroids(k, sorted.cols());
    const std::size_t first = uniform_index(rng, m);
    std::copy_n(sorted.row(first).begin(), sorted.cols(), centroids.row(0).begin());
    std::vector<double> d2(m);
    for (std::size_t i = 0; i < m; ++i) d2[i] = squared_distance(sorted.row(i), centroids.row(0));

    auto sample = [&](double total) {
        const double target = uniform01(rng) * total;
        double cumulative = 0.0;
        std::size_t last_positive = m;
        for (std::size_t i = 0; i < m; ++i) {
            if (d2[i] <= 0.0) continue;
            last_positive = i;
            cumulative += d2[i];
            if (cumulative > target) return i;
        }
        return last_positive;  // rounding pushed the target past the end
    };

    std::vector<double> candidate_d2(m), best_d2(m);
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (double d : d2) total += d;
        std::size_t best = m;
        double best_potential = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < trials; ++t) {
            const std::size_t cand = sample(total);
            double potential = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                candidate_d2[i] = std::min(d2[i], squared_distance(sorted.row(i), sorted.row(cand)));
                potential += candidate_d2[i];
            }
            if (t == 0 || potential < best_potential) {
                best_potential = potential;
                best = cand;
                best_d2.swap(candidate_d2);
            }
        }
        std::copy_n(sorted.row(best).begin(), sorted.cols(), centroids.row(c).begin());
        d2.swap(best_d2);
        best_d2.resize(m);
    }
    return centroids;
}

struct LloydRun {
    std::vector<std::size_t> assign;
    Matrix centroids;
    std::vector<double> inertia_history;
    std::size_t iterations = 0;
};

inline LloydRun lloyd(const Matrix& sorted, Matrix centroids, std::size_t max_iters) {
    const std::size_t m = sorted.rows();
    const std::size_t k = centroids.rows();
    LloydRun run;
    run.assign.assign(m, k);
    std::vector<std::size_t> counts(k);
    std::vector<double> dist(m);
    std::size_t iter = 0;
    for (; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t c = nearest_centroid(sorted.row(i), centroids, &dist[i]);
            if (c != run.assign[i]) {
                run.assign[i] = c;
                changed = true;
            }
        }
        if (!changed) break;

        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t c : run.assign) ++counts[c];
        // Empty cluster: take over the point farthest from its own centroid.
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            std::size_t far = m;
            double far_d = -1.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (counts[run.assign[i]] > 1 && dist[i] > far_d) {
                    far_d = dist[i];
                    far = i;
                }
            }
            --counts[run.assign[far]];
            run.assign[far] = c;
            counts[c] = 1;
            dist[far] = 0.0;
        }

        centroids = Matrix(k, sorted.cols());
        for (std::size_t i = 0; i < m; ++i) {
            auto dst = centroids.row(run.assign[i]);
            auto src = sorted.row(i);
            for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
        }
        for (std::size_t c = 0; c < k; ++c)
            for (double& x : centroids.row(c)) x /= static_cast<double>(counts[c]);

        double inertia = 0.0;
        for (std::size_t i = 0; i < m; ++i) inertia += squared_distance(sorted.row(i), centroids.row(run.assign[i]));
        run.inertia_history.push_back(inertia);
    }
    run.centroids = std::move(centroids);
    run.iterations = iter;
    return run;
}

}  // namespace detail

/// Largest projected coordinate magnitude accepted by clustering.
inline constexpr double kMaxCoordinate = 1e150;

struct ClusterOptions {
    std::size_t max_iters = 100;
    std::size_t restarts = 4;  // seeding + Lloyd runs; the lowest inertia wins
    std::size_t trials = 0;    // candidates per greedy seeding step; 0: 2 + floor(ln k)
};

/// Lloyd's algorithm with greedy k-means++ seeding on already-projected points.
/// `content` supplies the tie-break hash (defaults to the points themselves).
inline SubspacePartition cluster_projected(const Matrix& points, std::size_t k, std::uint64_t seed,
                                           const ClusterOptions& options = {}, const Matrix* content = nullptr) {
    const std::size_t m = points.rows();
    if (k == 0) throw DegenerateBagError("cluster: k must be positive");
    if (m < k) {
        throw DegenerateBagError("cluster: " + std::to_string(m) + " instances for " + std::to_string(k) +
                                 " clusters");
    }
    for (double x : points.values()) {
        if (!(std::abs(x) <= kMaxCoordinate)) throw NumericalError("cluster: projected points are non-finite or too large");
    }
    const std::vector<std::size_t> order = detail::canonical_order(points, content ? *content : points);
    const Matrix sorted = select_rows(points, order);
    if (detail::count_distinct_sorted(sorted) < k) {
        throw DegenerateBagError("cluster: fewer than " + std::to_string(k) + " distinct projected points");
    }
    const std::size_t trials =
        options.trials ? options.trials : 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));

    Rng rng(seed);
    detail::LloydRun best;
    double best_inertia = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < std::max<std::size_t>(1, options.restarts); ++r) {
        detail::LloydRun run = detail::lloyd(sorted, detail::seed_centroids(sorted, k, trials, rng), options.max_iters);
        const double inertia = run.inertia_history.empty() ? 0.0 : run.inertia_history.back();
        if (inertia < best_inertia) {
            best_inertia = inertia;
            best = std::move(run);
        }
    }

    SubspacePartition result;
    result.assignments.assign(m, 0);
    for (std::size_t i = 0; i < m; ++i) result.assignments[order[i]] = best.assign[i];
    result.centroids = std::move(best.centroids);
    result.inertia = best_inertia;
    result.iterations_used = best.iterations;
    result.inertia_history = std::move(best.inertia_history);
    return result;
}

/// Clusters the rows of `features` under the metric (Euclidean on W·z).
inline SubspacePartition cluster(const Matrix& features, const MetricMatrix& metric, std::size_t k,
                                 std::uint64_t seed, const ClusterOptions& options = {}) {
    const Matrix projected = project_rows(metric, features);
    return cluster_projected(projected, k, seed, options, &features);
}

/// Partition with fixed assignments; centroids are the means of `points` per cluster.
inline SubspacePartition partition_from_assignments(const Matrix& points, std::span<const std::size_t> assignments,
                                                    std::size_t k) {
    if (assignments.size() != points.rows()) throw DimensionError("partition: assignment count mismatch");
    SubspacePartition p;
    p.assignments.assign(assignments.begin(), assignments.end());
    p.centroids = Matrix(k, points.cols());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        if (assignments[i] >= k) throw DimensionError("partition: cluster index out of range");
        auto dst = p.centroids.row(assignments[i]);
        auto src = points.row(i);
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
        ++counts[assignments[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) continue;
        for (double& x : p.centroids.row(c)) x /= static_cast<double>(counts[c]);
    }
    for (std::size_t i = 0; i < points.rows(); ++i)
        p.inertia += detail::squared_distance(points.row(i), p.centroids.row(assignments[i]));
    return p;
}

/// Nearest centroid of W·point; ties to the lowest index.
inline std::size_t assign(std::span<const double> point, const SubspacePartition& partition,
                          const MetricMatrix& metric) {
    const Vector p = project(metric, point);
    return detail::nearest_centroid(p, partition.centroids);
}

}  // namespace pidlrsc
