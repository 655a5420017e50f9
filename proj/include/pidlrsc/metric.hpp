#pragma once

// Low-rank Mahalanobis metric d_A(z1, z2) = ||W (z1 - z2)||, A = WᵀW.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>

#include "pidlrsc/linalg.hpp"
#include "pidlrsc/log.hpp"
#include "pidlrsc/rng.hpp"

namespace pidlrsc {

class MetricMatrix {
public:
    MetricMatrix() = default;

    /// W is r×n with r ≤ n.
    explicit MetricMatrix(Matrix w) : w_(std::move(w)) {
        if (w_.rows() > w_.cols()) {
            throw DimensionError("metric rank " + std::to_string(w_.rows()) +
                                 " exceeds feature dimension " + std::to_string(w_.cols()));
        }
    }

    static MetricMatrix identity(std::size_t n) { return MetricMatrix(Matrix::identity(n)); }

    /// N(0, 1/n) entries plus 0.5 on the leading r×r diagonal.
    static MetricMatrix initialize(std::size_t rank, std::size_t dim, std::uint64_t seed) {
        if (2 * rank > dim) {
            log::warn("metric rank " + std::to_string(rank) + " is above half the feature dimension");
        }
        Rng rng(seed);
        Matrix w(rank, dim);
        const double sd = 1.0 / std::sqrt(static_cast<double>(dim));
        for (double& x : w.values()) x = normal(rng, 0.0, sd);
        for (std::size_t i = 0; i < std::min(rank, dim); ++i) w(i, i) += 0.5;
        return MetricMatrix(std::move(w));
    }

    std::size_t rank() const noexcept { return w_.rows(); }
    std::size_t dim() const noexcept { return w_.cols(); }

    const Matrix& weights() const noexcept { return w_; }
    Matrix& weights() noexcept { return w_; }

private:
    Matrix w_;
};

/// Default projection rank for feature dimension n: max(2, n/4), capped at n.
inline std::size_t default_rank(std::size_t n) {
    return std::min<std::size_t>(n, std::max<std::size_t>(2, n / 4));
}

inline Vector project(const MetricMatrix& metric, std::span<const double> z) {
    if (z.size() != metric.dim()) {
        throw DimensionError("project: expected length " + std::to_string(metric.dim()) + ", got " +
                             std::to_string(z.size()));
    }
    return matvec(metric.weights(), z);
}

/// Projects every row: returns m×r.
inline Matrix project_rows(const MetricMatrix& metric, const Matrix& features) {
    if (features.cols() != metric.dim()) throw DimensionError("project_rows: feature dimension mismatch");
    return matmul(features, transpose(metric.weights()));
}

inline double mahalanobis(const MetricMatrix& metric, std::span<const double> z1, std::span<const double> z2) {
    if (z1.size() != metric.dim() || z2.size() != metric.dim()) {
        throw DimensionError("mahalanobis: vector length does not match metric dimension");
    }
    Vector delta(z1.size());
    for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = z1[i] - z2[i];
    return norm2(matvec(metric.weights(), delta));
}

/// A = WᵀW (n×n). Diagnostics only; the training path never materializes it.
inline Matrix gram(const MetricMatrix& metric) {
    const Matrix& w = metric.weights();
    Matrix a(w.cols(), w.cols());
    for (std::size_t k = 0; k < w.rows(); ++k) {
        auto r = w.row(k);
        for (std::size_t i = 0; i < r.size(); ++i)
            for (std::size_t j = 0; j < r.size(); ++j) a(i, j) += r[i] * r[j];
    }
    return a;
}

/// Tr(WᵀW) = ||W||_F², the nuclear norm of the PSD matrix A.
inline double trace_reg(const MetricMatrix& metric) { return frobenius_sq(metric.weights()); }

/// d trace_reg / dW = 2W.
inline Matrix trace_reg_gradient(const MetricMatrix& metric) {
    Matrix g = metric.weights();
    for (double& x : g.values()) x *= 2.0;
    return g;
}

}  // namespace pidlrsc
