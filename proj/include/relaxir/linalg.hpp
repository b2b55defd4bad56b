#pragma once

// Dense binary64 containers and the handful of kernels built on them.
// Every reduction runs in a fixed index order so that results are
// bit-reproducible across runs and thread counts.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relaxir/errors.hpp"

namespace relaxir {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

namespace detail {

inline void require_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw NonFiniteValue(std::string(what) + " holds a non-finite entry");
        }
    }
}

} // namespace detail

/// Real vector with finite entries.
class DenseVector {
  public:
    explicit DenseVector(std::vector<double> values) : data_(std::move(values)) {
        if (data_.empty()) throw ContractViolation("DenseVector must have positive length");
        detail::require_finite(data_, "DenseVector");
    }
    DenseVector(std::initializer_list<double> values) : DenseVector(std::vector<double>(values)) {}
    DenseVector(std::size_t len, double fill) : DenseVector(std::vector<double>(len, fill)) {}

    static DenseVector ones(std::size_t len) { return DenseVector(len, 1.0); }

    std::size_t size() const noexcept { return data_.size(); }
    double operator[](std::size_t i) const noexcept { return data_[i]; }
    std::span<const double> values() const noexcept { return data_; }
    const std::vector<double>& vec() const noexcept { return data_; }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    /// Entries [offset, offset + len).
    DenseVector slice(std::size_t offset, std::size_t len) const {
        if (offset + len > size()) throw ContractViolation("DenseVector::slice out of range");
        return DenseVector(std::vector<double>(data_.begin() + static_cast<std::ptrdiff_t>(offset),
                                               data_.begin() + static_cast<std::ptrdiff_t>(offset + len)));
    }

    friend bool operator==(const DenseVector&, const DenseVector&) = default;

  private:
    std::vector<double> data_;
};

/// Real rows x cols matrix, column-major, finite entries.
class DenseMatrix {
  public:
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> column_major)
        : rows_(rows), cols_(cols), data_(std::move(column_major)) {
        if (rows == 0 || cols == 0) throw ContractViolation("DenseMatrix must have positive dimensions");
        if (data_.size() != rows * cols) throw ContractViolation("DenseMatrix data length != rows * cols");
        detail::require_finite(data_, "DenseMatrix");
    }

    static DenseMatrix zeros(std::size_t rows, std::size_t cols) {
        return DenseMatrix(rows, cols, std::vector<double>(rows * cols, 0.0));
    }

    static DenseMatrix identity(std::size_t n) {
        std::vector<double> d(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) d[i + i * n] = 1.0;
        return DenseMatrix(n, n, std::move(d));
    }

    /// Row-major literal, handy for small fixed matrices.
    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        const std::size_t r = rows.size();
        const std::size_t c = r == 0 ? 0 : rows.begin()->size();
        std::vector<double> d(r * c);
        std::size_t i = 0;
        for (const auto& row : rows) {
            if (row.size() != c) throw ContractViolation("ragged row in DenseMatrix::from_rows");
            std::size_t j = 0;
            for (double v : row) d[i + j++ * r] = v;
            ++i;
        }
        return DenseMatrix(r, c, std::move(d));
    }

    /// Builds entry (i, j) from f(i, j), 0-based, in column-major order.
    static DenseMatrix generate(std::size_t rows, std::size_t cols,
                                const std::function<double(std::size_t, std::size_t)>& f) {
        std::vector<double> d(rows * cols);
        for (std::size_t j = 0; j < cols; ++j)
            for (std::size_t i = 0; i < rows; ++i) d[i + j * rows] = f(i, j);
        return DenseMatrix(rows, cols, std::move(d));
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i + j * rows_]; }
    std::span<const double> values() const noexcept { return data_; }
    const std::vector<double>& vec() const noexcept { return data_; }

    DenseMatrix transpose() const {
        return generate(cols_, rows_, [this](std::size_t i, std::size_t j) { return (*this)(j, i); });
    }

    DenseMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
        if (r0 + nr > rows_ || c0 + nc > cols_) throw ContractViolation("DenseMatrix::block out of range");
        return generate(nr, nc, [&](std::size_t i, std::size_t j) { return (*this)(r0 + i, c0 + j); });
    }

    DenseMatrix scaled(double c) const {
        std::vector<double> d = data_;
        for (double& v : d) v *= c;
        return DenseMatrix(rows_, cols_, std::move(d));
    }

    /// Copy with entry (i, j) replaced.
    DenseMatrix with_entry(std::size_t i, std::size_t j, double v) const {
        if (i >= rows_ || j >= cols_) throw ContractViolation("DenseMatrix::with_entry out of range");
        std::vector<double> d = data_;
        d[i + j * rows_] = v;
        return DenseMatrix(rows_, cols_, std::move(d));
    }

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

  private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

/// Ax, each row accumulated over j = 0..cols-1 in order.
inline DenseVector mat_vec(const DenseMatrix& a, const DenseVector& x) {
    if (a.cols() != x.size()) throw ContractViolation("mat_vec: A.cols != x.len");
    std::vector<double> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return DenseVector(std::move(y));
}

/// b - Ax with the same summation order as mat_vec.
inline DenseVector residual(const DenseMatrix& a, const DenseVector& b, const DenseVector& x) {
    if (a.rows() != b.size()) throw ContractViolation("residual: A.rows != b.len");
    const DenseVector ax = mat_vec(a, x);
    std::vector<double> r(b.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - ax[i];
    return DenseVector(std::move(r));
}

/// AB, entry (i, j) accumulated over k in order.
inline DenseMatrix mat_mul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw ContractViolation("mat_mul: inner dimensions differ");
    return DenseMatrix::generate(a.rows(), b.cols(), [&](std::size_t i, std::size_t j) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
        return s;
    });
}

inline double vector_norm2(std::span<const double> x) {
    double amax = 0.0;
    for (double v : x) amax = std::max(amax, std::abs(v));
    if (amax == 0.0) return 0.0;
    static const double big = std::sqrt(std::numeric_limits<double>::max());
    if (amax > big) {
        double s = 0.0;
        for (double v : x) {
            const double t = v / amax;
            s += t * t;
        }
        return amax * std::sqrt(s);
    }
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

inline double vector_norm2(const DenseVector& x) { return vector_norm2(x.values()); }

/// x - y, elementwise.
inline DenseVector difference(const DenseVector& x, const DenseVector& y) {
    if (x.size() != y.size()) throw ContractViolation("difference: length mismatch");
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = x[i] - y[i];
    return DenseVector(std::move(d));
}

struct SvdResult {
    std::vector<double> singular_values; // nonincreasing
    int sweep_count = 0;
};

inline constexpr std::size_t kSvdMaxOrder = 512;
inline constexpr int kSvdMaxSweeps = 60;

/// One-sided (Hestenes) Jacobi SVD, singular values only.
///
/// Columns of a working copy are rotated pairwise until every off-diagonal
/// Gram entry satisfies |g_pq| <= 100 eps sqrt(g_pp g_qq). The singular
/// values are then the column norms. Wide inputs are transposed first.
inline SvdResult jacobi_svd(const DenseMatrix& a) {
    const DenseMatrix& src = a;
    const bool wide = a.rows() < a.cols();
    const std::size_t m = wide ? a.cols() : a.rows();
    const std::size_t n = wide ? a.rows() : a.cols();
    if (n > kSvdMaxOrder) throw ContractViolation("jacobi_svd: min(rows, cols) exceeds 512");

    std::vector<double> g(m * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i) g[i + j * m] = wide ? src(j, i) : src(i, j);

    const double tol = 100.0 * kEps;
    // Columns at rounding-noise level (norm <= eps ||A||_F) cannot be
    // orthogonalized further and count as converged.
    const double noise = kEps * vector_norm2(std::span<const double>(g));
    const double negligible = noise * noise;
    SvdResult out;
    bool converged = false;
    for (int sweep = 1; sweep <= kSvdMaxSweeps && !converged; ++sweep) {
        converged = true;
        out.sweep_count = sweep;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            double* cp = g.data() + p * m;
            for (std::size_t q = p + 1; q < n; ++q) {
                double* cq = g.data() + q * m;
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    alpha += cp[i] * cp[i];
                    beta += cq[i] * cq[i];
                    gamma += cp[i] * cq[i];
                }
                if (alpha <= negligible || beta <= negligible) continue;
                if (std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
                converged = false;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double xp = cp[i];
                    const double xq = cq[i];
                    cp[i] = c * xp - s * xq;
                    cq[i] = s * xp + c * xq;
                }
            }
        }
    }
    if (!converged) throw ConvergenceFailure("jacobi_svd: no convergence within 60 sweeps");

    out.singular_values.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += g[i + j * m] * g[i + j * m];
        out.singular_values[j] = std::sqrt(s);
    }
    std::sort(out.singular_values.begin(), out.singular_values.end(), std::greater<>{});
    return out;
}

inline double matrix_norm2(const DenseMatrix& a) { return jacobi_svd(a).singular_values.front(); }

/// sigma_max / sigma_min; +infinity when sigma_min is zero.
inline double cond2(const DenseMatrix& a) {
    if (!a.square()) throw ContractViolation("cond2: matrix must be square");
    const SvdResult svd = jacobi_svd(a);
    const double smin = svd.singular_values.back();
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return svd.singular_values.front() / smin;
}

} // namespace relaxir
