#pragma once

// Factor-once / solve-many direct solvers: Gaussian elimination with partial
// pivoting and a 2x2 block LU built on top of it.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "relaxir/errors.hpp"
#include "relaxir/linalg.hpp"

namespace relaxir {

/// Anything that maps a right-hand side to an approximate solution.
template <typename S>
concept LinearSolver = requires(const S& s, const DenseVector& r) {
    { s.solve(r) } -> std::convertible_to<DenseVector>;
};

/// PA = LU. L is unit lower triangular (stored strictly below the diagonal
/// of lu_packed), U is on and above it. perm[i] is the original row that
/// ended up in position i.
struct PluFactorization {
    std::size_t n = 0;
    std::vector<std::size_t> perm;
    DenseMatrix lu_packed = DenseMatrix::zeros(1, 1);
    double growth_factor = 1.0;

    double l(std::size_t i, std::size_t j) const { return i == j ? 1.0 : (i > j ? lu_packed(i, j) : 0.0); }
    double u(std::size_t i, std::size_t j) const { return i <= j ? lu_packed(i, j) : 0.0; }

    DenseMatrix lower() const {
        return DenseMatrix::generate(n, n, [this](std::size_t i, std::size_t j) { return l(i, j); });
    }
    DenseMatrix upper() const {
        return DenseMatrix::generate(n, n, [this](std::size_t i, std::size_t j) { return u(i, j); });
    }
    /// P as an explicit matrix, (PA)_i = A_{perm[i]}.
    DenseMatrix permutation() const {
        return DenseMatrix::generate(n, n, [this](std::size_t i, std::size_t j) { return perm[i] == j ? 1.0 : 0.0; });
    }
};

/// Right-looking GEPP. The pivot is the first row (smallest index) holding
/// the largest magnitude in the current column. growth_factor is the
/// largest magnitude seen in any reduced matrix over the largest input
/// magnitude.
inline PluFactorization gepp_factor(const DenseMatrix& a) {
    if (!a.square()) throw ContractViolation("gepp_factor: matrix must be square");
    const std::size_t n = a.rows();
    std::vector<double> w = a.vec();
    auto at = [&](std::size_t i, std::size_t j) -> double& { return w[i + j * n]; };

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});

    double input_max = 0.0;
    for (double v : w) input_max = std::max(input_max, std::abs(v));
    double seen_max = input_max;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double pmax = std::abs(at(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(at(i, k)) > pmax) {
                pmax = std::abs(at(i, k));
                p = i;
            }
        }
        if (pmax == 0.0) {
            throw SingularMatrixError("gepp_factor: zero pivot column at step " + std::to_string(k + 1));
        }
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
            std::swap(perm[k], perm[p]);
        }
        const double pivot = at(k, k);
        for (std::size_t i = k + 1; i < n; ++i) at(i, k) /= pivot;
        for (std::size_t j = k + 1; j < n; ++j) {
            const double ukj = at(k, j);
            for (std::size_t i = k + 1; i < n; ++i) {
                at(i, j) -= at(i, k) * ukj;
                seen_max = std::max(seen_max, std::abs(at(i, j)));
            }
        }
    }

    PluFactorization f;
    f.n = n;
    f.perm = std::move(perm);
    f.lu_packed = DenseMatrix(n, n, std::move(w));
    f.growth_factor = seen_max / input_max;
    return f;
}

/// Solves Lc = Pb then Ux = c. Each component subtracts its terms in the
/// order a column-oriented triangular solve would apply them (ascending j
/// for L, descending j for U).
inline DenseVector gepp_solve(const PluFactorization& f, const DenseVector& b) {
    if (b.size() != f.n) throw ContractViolation("gepp_solve: b.len != n");
    const std::size_t n = f.n;
    const DenseMatrix& lu = f.lu_packed;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double c = b[f.perm[i]];
        for (std::size_t j = 0; j < i; ++j) c -= lu(i, j) * x[j];
        x[i] = c;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t j = n; j-- > ii + 1;) s -= lu(ii, j) * x[j];
        const double d = lu(ii, ii);
        if (d == 0.0) throw SingularMatrixError("gepp_solve: zero diagonal in U at row " + std::to_string(ii + 1));
        x[ii] = s / d;
    }
    return DenseVector(std::move(x));
}

/// A = [I 0; L21 I] [U11 U12; 0 U22] with U11 = A11, U12 = A12 and U22 the
/// Schur complement. Both diagonal blocks keep their own GEPP factors for
/// the solve phase.
struct BlockLuFactorization {
    std::size_t n = 0;
    std::size_t m = 0;
    DenseMatrix u11 = DenseMatrix::zeros(1, 1);
    DenseMatrix u12 = DenseMatrix::zeros(1, 1);
    DenseMatrix l21 = DenseMatrix::zeros(1, 1);
    DenseMatrix u22 = DenseMatrix::zeros(1, 1);
    PluFactorization u11_plu;
    PluFactorization u22_plu;

    DenseMatrix lower() const {
        return DenseMatrix::generate(n, n, [this](std::size_t i, std::size_t j) {
            if (i == j) return 1.0;
            if (i >= m && j < m) return l21(i - m, j);
            return 0.0;
        });
    }
    DenseMatrix upper() const {
        return DenseMatrix::generate(n, n, [this](std::size_t i, std::size_t j) {
            if (i < m) return j < m ? u11(i, j) : u12(i, j - m);
            return j < m ? 0.0 : u22(i - m, j - m);
        });
    }
};

namespace detail {

inline PluFactorization factor_block(const DenseMatrix& a, const char* name) {
    try {
        return gepp_factor(a);
    } catch (const SingularMatrixError& e) {
        throw SingularMatrixError(std::string("singular block ") + name + ": " + e.what());
    }
}

} // namespace detail

inline BlockLuFactorization block_lu_factor(const DenseMatrix& a, std::size_t m) {
    if (!a.square()) throw ContractViolation("block_lu_factor: matrix must be square");
    const std::size_t n = a.rows();
    if (m < 1 || m >= n) throw ContractViolation("block_lu_factor: split index must satisfy 1 <= m < n");
    const std::size_t r = n - m;

    BlockLuFactorization f;
    f.n = n;
    f.m = m;
    f.u11 = a.block(0, 0, m, m);
    f.u12 = a.block(0, m, m, r);
    const DenseMatrix a21 = a.block(m, 0, r, m);
    const DenseMatrix a22 = a.block(m, m, r, r);

    // L21 A11 = A21  <=>  A11^T (row i of L21)^T = (row i of A21)^T.
    const PluFactorization a11t = detail::factor_block(f.u11.transpose(), "A11");
    std::vector<double> l21(r * m);
    for (std::size_t i = 0; i < r; ++i) {
        std::vector<double> row(m);
        for (std::size_t j = 0; j < m; ++j) row[j] = a21(i, j);
        const DenseVector y = gepp_solve(a11t, DenseVector(std::move(row)));
        for (std::size_t j = 0; j < m; ++j) l21[i + j * r] = y[j];
    }
    f.l21 = DenseMatrix(r, m, std::move(l21));

    const DenseMatrix product = mat_mul(f.l21, f.u12);
    f.u22 = DenseMatrix::generate(r, r, [&](std::size_t i, std::size_t j) { return a22(i, j) - product(i, j); });

    f.u11_plu = detail::factor_block(f.u11, "A11");
    f.u22_plu = detail::factor_block(f.u22, "U22");
    return f;
}

/// y1 = b1, y2 = b2 - L21 y1; U22 x2 = y2; U11 x1 = y1 - U12 x2.
inline DenseVector block_lu_solve(const BlockLuFactorization& f, const DenseVector& b) {
    if (b.size() != f.n) throw ContractViolation("block_lu_solve: b.len != n");
    const std::size_t m = f.m;
    const std::size_t r = f.n - m;
    const DenseVector y1 = b.slice(0, m);

    const DenseVector l21y1 = mat_vec(f.l21, y1);
    std::vector<double> y2(r);
    for (std::size_t i = 0; i < r; ++i) y2[i] = b[m + i] - l21y1[i];
    const DenseVector x2 = gepp_solve(f.u22_plu, DenseVector(std::move(y2)));

    const DenseVector u12x2 = mat_vec(f.u12, x2);
    std::vector<double> rhs1(m);
    for (std::size_t i = 0; i < m; ++i) rhs1[i] = y1[i] - u12x2[i];
    const DenseVector x1 = gepp_solve(f.u11_plu, DenseVector(std::move(rhs1)));

    std::vector<double> x(f.n);
    std::copy(x1.begin(), x1.end(), x.begin());
    std::copy(x2.begin(), x2.end(), x.begin() + static_cast<std::ptrdiff_t>(m));
    return DenseVector(std::move(x));
}

/// Which basic solver to build, with the split index for block LU.
struct SolverKind {
    enum class Method { Gepp, BlockLu };
    Method method = Method::Gepp;
    std::size_t split = 0;

    static SolverKind gepp() { return {Method::Gepp, 0}; }
    static SolverKind block_lu(std::size_t m) { return {Method::BlockLu, m}; }

    std::string label() const { return method == Method::Gepp ? "gepp" : "blu" + std::to_string(split); }
    friend bool operator==(const SolverKind&, const SolverKind&) = default;
};

/// An immutable factorization plus the solve that goes with it.
class SolverHandle {
  public:
    static SolverHandle factor(const DenseMatrix& a, SolverKind kind) {
        if (kind.method == SolverKind::Method::Gepp) return SolverHandle(kind, gepp_factor(a));
        return SolverHandle(kind, block_lu_factor(a, kind.split));
    }

    DenseVector solve(const DenseVector& r) const {
        return std::visit(
            [&](const auto& f) -> DenseVector {
                if constexpr (std::is_same_v<std::decay_t<decltype(f)>, PluFactorization>) {
                    return gepp_solve(f, r);
                } else {
                    return block_lu_solve(f, r);
                }
            },
            factorization_);
    }

    const SolverKind& kind() const noexcept { return kind_; }
    const PluFactorization* plu() const noexcept { return std::get_if<PluFactorization>(&factorization_); }
    const BlockLuFactorization* block_lu() const noexcept { return std::get_if<BlockLuFactorization>(&factorization_); }

  private:
    using Factorization = std::variant<PluFactorization, BlockLuFactorization>;
    SolverHandle(SolverKind kind, Factorization f) : kind_(kind), factorization_(std::move(f)) {}

    SolverKind kind_;
    Factorization factorization_;
};

inline SolverHandle solver_factor(const DenseMatrix& a, SolverKind kind) { return SolverHandle::factor(a, kind); }
inline DenseVector solver_solve(const SolverHandle& h, const DenseVector& r) { return h.solve(r); }

} // namespace relaxir
