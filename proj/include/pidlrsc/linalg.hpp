#pragma once

// Dense double-precision matrices, a central-difference gradient probe and a
// one-sided Jacobi SVD used for rank and nuclear-norm checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pidlrsc/errors.hpp"

namespace pidlrsc {

using Vector = std::vector<double>;

/// Row-major dense matrix.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
        : rows_(rows), cols_(cols), values_(std::move(values)) {
        if (values_.size() != rows_ * cols_) {
            throw DimensionError("matrix value count " + std::to_string(values_.size()) +
                                 " does not match " + std::to_string(rows_) + "x" +
                                 std::to_string(cols_));
        }
    }

    Matrix(std::initializer_list<std::initializer_list<double>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        values_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw DimensionError("ragged matrix literal");
            values_.insert(values_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix column(std::span<const double> v) {
        return Matrix(v.size(), 1, std::vector<double>(v.begin(), v.end()));
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) noexcept { return {values_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept {
        return {values_.data() + i * cols_, cols_};
    }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

inline bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

inline void require_finite(const Matrix& m, const char* what) {
    if (!all_finite(m.values())) throw NumericalError(std::string(what) + ": non-finite entry");
}

/// Standard product, summing k left to right for every (i, j).
inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                             " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            auto orow = out.row(i);
            auto brow = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
        }
    }
    require_finite(out, "matmul");
    return out;
}

inline Matrix transpose(const Matrix& m) {
    Matrix t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
    return t;
}

/// m · v
inline Vector matvec(const Matrix& m, std::span<const double> v) {
    if (m.cols() != v.size()) {
        throw DimensionError("matvec: matrix has " + std::to_string(m.cols()) +
                             " columns, vector has " + std::to_string(v.size()));
    }
    Vector out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < r.size(); ++j) s += r[j] * v[j];
        out[i] = s;
    }
    return out;
}

/// mᵀ · v
inline Vector matvec_transposed(const Matrix& m, std::span<const double> v) {
    if (m.rows() != v.size()) throw DimensionError("matvec_transposed: length mismatch");
    Vector out(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) out[j] += r[j] * v[i];
    }
    return out;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

inline double frobenius_sq(const Matrix& m) {
    double s = 0.0;
    for (double x : m.values()) s += x * x;
    return s;
}

/// Mean of every row, summed in row order.
inline Vector column_mean(const Matrix& m) {
    if (m.rows() == 0) throw EmptySetError("column_mean of an empty matrix");
    Vector mean(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) mean[j] += r[j];
    }
    for (double& x : mean) x /= static_cast<double>(m.rows());
    return mean;
}

/// Rows of `m` selected by `indices`, in the given order.
inline Matrix select_rows(const Matrix& m, std::span<const std::size_t> indices) {
    Matrix out(indices.size(), m.cols());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        auto src = m.row(indices[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

/// Singular values in descending order, via one-sided Jacobi rotations.
inline Vector singular_values(const Matrix& m, double tol = 1e-12, int max_sweeps = 100) {
    require_finite(m, "singular_values");
    // Work on the orientation with at least as many rows as columns.
    Matrix u = m.rows() >= m.cols() ? m : transpose(m);
    const std::size_t rows = u.rows();
    const std::size_t cols = u.cols();

    auto column_dot = [&](std::size_t p, std::size_t q) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows; ++i) s += u(i, p) * u(i, q);
        return s;
    };

    bool converged = cols < 2;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < cols; ++p) {
            for (std::size_t q = p + 1; q < cols; ++q) {
                const double alpha = column_dot(p, p);
                const double beta = column_dot(q, q);
                const double gamma = column_dot(p, q);
                if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < rows; ++i) {
                    const double up = u(i, p);
                    const double uq = u(i, q);
                    u(i, p) = c * up - s * uq;
                    u(i, q) = s * up + c * uq;
                }
            }
        }
        converged = !rotated;
    }
    if (!converged) throw NumericalError("singular_values: Jacobi iteration did not converge");

    Vector sigma(cols);
    for (std::size_t j = 0; j < cols; ++j) sigma[j] = std::sqrt(column_dot(j, j));
    std::sort(sigma.begin(), sigma.end(), std::greater<>());
    return sigma;
}

/// Central difference of `f` along coordinate `i`.
inline double finite_diff(const std::function<double(std::span<const double>)>& f,
                          std::span<const double> x, std::size_t i, double h) {
    if (!(h > 0.0)) throw NumericalError("finite_diff: step must be positive");
    if (i >= x.size()) throw DimensionError("finite_diff: coordinate out of range");
    Vector probe(x.begin(), x.end());
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    if (!std::isfinite(up) || !std::isfinite(down)) {
        throw NumericalError("finite_diff: function is not finite at the probe points");
    }
    return (up - down) / (2.0 * h);
}

/// |analytic - numeric| / max(1, |analytic|, |numeric|)
inline double relative_error(double analytic, double numeric) {
    return std::abs(analytic - numeric) /
           std::max({1.0, std::abs(analytic), std::abs(numeric)});
}

/// One probed coordinate of a gradient check.
struct GradReport {
    std::size_t index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    double relative_error = 0.0;
};

inline GradReport make_grad_report(std::size_t index, double analytic, double numeric) {
    return {index, analytic, numeric, relative_error(analytic, numeric)};
}

}  // namespace pidlrsc
