#pragma once

// Empirical characteristic functions, the amplitude/phase discrepancy between
// two point sets, and a Gaussian-kernel MMD for comparison.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

#include "pidlrsc/linalg.hpp"
#include "pidlrsc/rng.hpp"

namespace pidlrsc {

/// Smoothing for the square root when differentiating at Chf = 0.
inline constexpr double kCfdSmoothing = 1e-12;

struct FrequencySample {
    Matrix frequencies;  // T × n, i.i.d. N(0, sigma_t²)
    double sigma_t = 1.0;
    std::uint64_t seed = 0;

    std::size_t count() const noexcept { return frequencies.rows(); }
    std::size_t dim() const noexcept { return frequencies.cols(); }

    static FrequencySample draw(std::size_t count, std::size_t dim, double sigma_t, std::uint64_t seed) {
        if (count == 0) throw DimensionError("FrequencySample: need at least one frequency");
        if (!(sigma_t > 0.0)) throw NumericalError("FrequencySample: sigma_t must be positive");
        Rng rng(seed);
        Matrix f(count, dim);
        for (double& x : f.values()) x = normal(rng, 0.0, sigma_t);
        return {std::move(f), sigma_t, seed};
    }
};

struct CfValue {
    double amplitude = 0.0;
    double phase = 0.0;  // (-pi, pi]
};

/// (mean cos, mean sin) of tᵀz over a set, one entry per frequency.
struct CfSeries {
    Vector re;
    Vector im;
};

namespace detail {

inline void require_nonempty(const Matrix& m, const char* what) {
    if (m.rows() == 0) throw EmptySetError(std::string(what) + ": empty instance set");
}

inline CfValue to_polar(double re, double im) {
    const double amplitude = std::hypot(re, im);
    double phase = amplitude == 0.0 ? 0.0 : std::atan2(im, re);
    if (phase <= -std::numbers::pi) phase = std::numbers::pi;
    return {amplitude, phase};
}

}  // namespace detail

inline CfValue empirical_cf(const Matrix& features, std::span<const double> t) {
    detail::require_nonempty(features, "empirical_cf");
    if (t.size() != features.cols()) throw DimensionError("empirical_cf: frequency length mismatch");
    double re = 0.0;
    double im = 0.0;
    for (std::size_t j = 0; j < features.rows(); ++j) {
        const double theta = dot(t, features.row(j));
        re += std::cos(theta);
        im += std::sin(theta);
    }
    const auto m = static_cast<double>(features.rows());
    return detail::to_polar(re / m, im / m);
}

/// Amplitude/phase form: (a1 - a2)² + 2·a1·a2·(1 - cos(p1 - p2)).
inline double chf_two_term(const CfValue& a, const CfValue& b) {
    const double da = a.amplitude - b.amplitude;
    return da * da + 2.0 * a.amplitude * b.amplitude * (1.0 - std::cos(a.phase - b.phase));
}

/// |phi_a - phi_b|² computed in Cartesian form.
inline double chf_modulus(const CfValue& a, const CfValue& b) {
    const double re = a.amplitude * std::cos(a.phase) - b.amplitude * std::cos(b.phase);
    const double im = a.amplitude * std::sin(a.phase) - b.amplitude * std::sin(b.phase);
    return re * re + im * im;
}

inline double chf(const Matrix& za, const Matrix& zb, std::span<const double> t) {
    detail::require_nonempty(za, "chf");
    detail::require_nonempty(zb, "chf");
    return chf_two_term(empirical_cf(za, t), empirical_cf(zb, t));
}

/// cos(tᵀz) and sin(tᵀz) for every point (row) and frequency (column).
struct PhaseTable {
    Matrix cos;
    Matrix sin;

    std::size_t points() const noexcept { return cos.rows(); }
};

inline PhaseTable phase_table(const Matrix& points, const FrequencySample& freqs) {
    if (points.cols() != freqs.dim()) throw DimensionError("phase_table: frequency dimension mismatch");
    Matrix theta = matmul(points, transpose(freqs.frequencies));
    PhaseTable table{theta, std::move(theta)};
    auto c = table.cos.values();
    auto s = table.sin.values();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double x = s[i];
        c[i] = std::cos(x);
        s[i] = std::sin(x);
    }
    return table;
}

/// Empirical CF over the listed rows of a phase table.
inline CfSeries cf_series(const PhaseTable& table, std::span<const std::size_t> rows) {
    if (rows.empty()) throw EmptySetError("cf_series: empty instance set");
    const std::size_t T = table.cos.cols();
    CfSeries s{Vector(T, 0.0), Vector(T, 0.0)};
    for (std::size_t r : rows) {
        auto c = table.cos.row(r);
        auto sn = table.sin.row(r);
        for (std::size_t f = 0; f < T; ++f) {
            s.re[f] += c[f];
            s.im[f] += sn[f];
        }
    }
    const auto inv = 1.0 / static_cast<double>(rows.size());
    for (std::size_t f = 0; f < T; ++f) {
        s.re[f] *= inv;
        s.im[f] *= inv;
    }
    return s;
}

inline std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    return rows;
}

inline CfSeries cf_series(const Matrix& points, const FrequencySample& freqs) {
    detail::require_nonempty(points, "cf_series");
    return cf_series(phase_table(points, freqs), all_rows(points.rows()));
}

/// Monte-Carlo mean of sqrt(Chf(t)) over the sampled frequencies.
inline double cfd_from_series(const CfSeries& a, const CfSeries& b) {
    double total = 0.0;
    for (std::size_t f = 0; f < a.re.size(); ++f) {
        const double dr = a.re[f] - b.re[f];
        const double di = a.im[f] - b.im[f];
        total += std::sqrt(dr * dr + di * di);
    }
    return total / static_cast<double>(a.re.size());
}

inline double cfd_distance(const Matrix& za, const Matrix& zb, const FrequencySample& freqs) {
    return cfd_from_series(cf_series(za, freqs), cf_series(zb, freqs));
}

namespace detail {

// grad.row(rows[j]) += d(series)/d(point rows[j]) contracted with (g_re, g_im).
inline void cf_series_backward(const PhaseTable& table, std::span<const std::size_t> rows,
                               const FrequencySample& freqs, std::span<const double> g_re,
                               std::span<const double> g_im, Matrix& grad) {
    const std::size_t T = freqs.count();
    const auto inv_m = 1.0 / static_cast<double>(rows.size());
    Vector coef(T);
    for (std::size_t r : rows) {
        auto c = table.cos.row(r);
        auto s = table.sin.row(r);
        for (std::size_t f = 0; f < T; ++f) coef[f] = (-g_re[f] * s[f] + g_im[f] * c[f]) * inv_m;
        auto g = grad.row(r);
        for (std::size_t f = 0; f < T; ++f) {
            auto t = freqs.frequencies.row(f);
            const double cf = coef[f];
            for (std::size_t d = 0; d < g.size(); ++d) g[d] += cf * t[d];
        }
    }
}

}  // namespace detail

/// Adds upstream · d(cfd)/d(points) for the set `rows_a` of table_a against
/// the set `rows_b` of table_b, accumulating into grad_a / grad_b (full-size).
inline void cfd_backward(const PhaseTable& table_a, std::span<const std::size_t> rows_a, const CfSeries& sa,
                         const PhaseTable& table_b, std::span<const std::size_t> rows_b, const CfSeries& sb,
                         const FrequencySample& freqs, double upstream, Matrix& grad_a, Matrix& grad_b) {
    const std::size_t T = freqs.count();
    Vector g_re(T), g_im(T);
    const double scale = upstream / static_cast<double>(T);
    for (std::size_t f = 0; f < T; ++f) {
        const double dr = sa.re[f] - sb.re[f];
        const double di = sa.im[f] - sb.im[f];
        const double c = scale / std::sqrt(dr * dr + di * di + kCfdSmoothing * kCfdSmoothing);
        g_re[f] = c * dr;
        g_im[f] = c * di;
    }
    detail::cf_series_backward(table_a, rows_a, freqs, g_re, g_im, grad_a);
    for (std::size_t f = 0; f < T; ++f) {
        g_re[f] = -g_re[f];
        g_im[f] = -g_im[f];
    }
    detail::cf_series_backward(table_b, rows_b, freqs, g_re, g_im, grad_b);
}

/// Gradient of cfd_distance(za, zb) with respect to both sets.
inline void cfd_backward(const Matrix& za, const Matrix& zb, const FrequencySample& freqs, double upstream,
                         Matrix& grad_a, Matrix& grad_b) {
    const PhaseTable ta = phase_table(za, freqs);
    const PhaseTable tb = phase_table(zb, freqs);
    const auto ra = all_rows(za.rows());
    const auto rb = all_rows(zb.rows());
    cfd_backward(ta, ra, cf_series(ta, ra), tb, rb, cf_series(tb, rb), freqs, upstream, grad_a, grad_b);
}

namespace detail {

inline double gaussian_kernel(std::span<const double> x, std::span<const double> y, double inv_two_bw2) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return std::exp(-s * inv_two_bw2);
}

inline double mean_kernel(const Matrix& a, const Matrix& b, double inv_two_bw2) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j) s += gaussian_kernel(a.row(i), b.row(j), inv_two_bw2);
    return s / (static_cast<double>(a.rows()) * static_cast<double>(b.rows()));
}

}  // namespace detail

/// Biased (V-statistic) squared MMD with kernel exp(-||x-y||²/(2·bw²)).
inline double mmd_squared(const Matrix& za, const Matrix& zb, double bandwidth) {
    detail::require_nonempty(za, "mmd");
    detail::require_nonempty(zb, "mmd");
    if (!(bandwidth > 0.0)) throw NumericalError("mmd: bandwidth must be positive");
    if (za.cols() != zb.cols()) throw DimensionError("mmd: dimension mismatch");
    const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
    return detail::mean_kernel(za, za, inv) + detail::mean_kernel(zb, zb, inv) -
           2.0 * detail::mean_kernel(za, zb, inv);
}

inline double mmd_distance(const Matrix& za, const Matrix& zb, double bandwidth) {
    return std::sqrt(std::max(0.0, mmd_squared(za, zb, bandwidth)));
}

/// Adds upstream · d(mmd_distance)/d(za), /d(zb).
inline void mmd_backward(const Matrix& za, const Matrix& zb, double bandwidth, double upstream, Matrix& grad_a,
                         Matrix& grad_b) {
    const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
    const double sq = std::max(0.0, mmd_squared(za, zb, bandwidth));
    // d sqrt(s)/ds, smoothed at s = 0.
    const double outer = upstream * 0.5 / std::sqrt(sq + kCfdSmoothing * kCfdSmoothing);
    const double inv_bw2 = 1.0 / (bandwidth * bandwidth);

    // d k(x,y)/dx = -k · (x - y) / bw²
    auto pair_term = [&](const Matrix& x, const Matrix& y, double weight, Matrix& gx, Matrix* gy) {
        for (std::size_t i = 0; i < x.rows(); ++i) {
            for (std::size_t j = 0; j < y.rows(); ++j) {
                const double k = detail::gaussian_kernel(x.row(i), y.row(j), inv);
                const double c = -weight * k * inv_bw2;
                auto xi = x.row(i);
                auto yj = y.row(j);
                auto g = gx.row(i);
                for (std::size_t d = 0; d < g.size(); ++d) g[d] += c * (xi[d] - yj[d]);
                if (gy) {
                    auto h = gy->row(j);
                    for (std::size_t d = 0; d < h.size(); ++d) h[d] -= c * (xi[d] - yj[d]);
                }
            }
        }
    };
    const auto na = static_cast<double>(za.rows());
    const auto nb = static_cast<double>(zb.rows());
    // Self terms: both arguments move, so each ordered pair contributes twice.
    pair_term(za, za, 2.0 * outer / (na * na), grad_a, nullptr);
    pair_term(zb, zb, 2.0 * outer / (nb * nb), grad_b, nullptr);
    pair_term(za, zb, -2.0 * outer / (na * nb), grad_a, &grad_b);
}

}  // namespace pidlrsc
