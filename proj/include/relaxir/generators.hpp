#pragma once

// Test-matrix families and a portable seeded random stream.

#include <cfenv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relaxir/errors.hpp"
#include "relaxir/linalg.hpp"

namespace relaxir {

static_assert(std::numeric_limits<double>::is_iec559, "IEEE binary64 double required");

/// Throws unless the FPU rounds to nearest, which every reproducibility
/// claim here depends on.
inline void assert_round_to_nearest() {
    if (std::fegetround() != FE_TONEAREST) throw Error("floating-point rounding mode is not round-to-nearest");
}

/// SplitMix64 with Box-Muller normals. The state is the whole story:
/// equal seeds give equal streams on every IEEE platform.
class Rng64 {
  public:
    explicit Rng64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in (0, 1): 53 random bits, with 0 remapped to 2^-53.
    double next_uniform() {
        constexpr double scale = 0x1.0p-53;
        const std::uint64_t bits = next_u64() >> 11;
        return bits == 0 ? scale : static_cast<double>(bits) * scale;
    }

    /// Standard normal. Each Box-Muller pair is consumed in order, cosine branch first.
    double next_normal() {
        if (spare_) {
            const double z = *spare_;
            spare_.reset();
            return z;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(theta);
        return radius * std::cos(theta);
    }

    std::uint64_t state() const noexcept { return state_; }

  private:
    std::uint64_t state_;
    std::optional<double> spare_;
};

/// A, b = A x* with x* = (1, ..., 1).
struct ProblemInstance {
    DenseMatrix a;
    DenseVector b;
    DenseVector x_star;
    std::string label;
    std::optional<double> kappa; // filled by whoever needs it

    static ProblemInstance from_matrix(DenseMatrix a, std::string label) {
        DenseVector x_star = DenseVector::ones(a.cols());
        DenseVector b = mat_vec(a, x_star);
        return ProblemInstance{std::move(a), std::move(b), std::move(x_star), std::move(label), std::nullopt};
    }
};

/// Unit diagonal, -1 strictly below it, last column all ones. Elimination
/// with partial pivoting doubles the last column at every step.
inline DenseMatrix wilkinson(std::size_t n) {
    if (n < 1) throw ContractViolation("wilkinson: n must be >= 1");
    return DenseMatrix::generate(n, n, [n](std::size_t i, std::size_t j) {
        if (j == n - 1 || i == j) return 1.0;
        return i > j ? -1.0 : 0.0;
    });
}

inline DenseMatrix hilbert(std::size_t m) {
    if (m < 1) throw ContractViolation("hilbert: order must be >= 1");
    return DenseMatrix::generate(m, m, [](std::size_t i, std::size_t j) { return 1.0 / static_cast<double>(i + j + 1); });
}

/// Symmetric tridiagonal from normal draws (diagonal first, then the
/// off-diagonal), after which entry (m-1, m) in 1-based indexing is
/// overwritten with t.
inline ProblemInstance spiked_tridiagonal(std::size_t n, std::size_t m, double t, std::uint64_t seed) {
    if (m < 3 || m > n) throw ContractViolation("spiked_tridiagonal: need 3 <= m <= n");
    if (!(t >= 0.0) || !std::isfinite(t)) throw ContractViolation("spiked_tridiagonal: t must be finite and >= 0");
    Rng64 rng(seed);
    std::vector<double> u(n), v(n - 1);
    for (double& x : u) x = rng.next_normal();
    for (double& x : v) x = rng.next_normal();

    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i + i * n] = u[i];
    for (std::size_t i = 0; i + 1 < n; ++i) {
        d[(i + 1) + i * n] = v[i];
        d[i + (i + 1) * n] = v[i];
    }
    d[(m - 2) + (m - 1) * n] = t;
    return ProblemInstance::from_matrix(DenseMatrix(n, n, std::move(d)), "tridiag");
}

/// n x n uniform(0, 1) matrix, drawn column by column, whose leading m x m
/// block is replaced by hilbert(m).
inline ProblemInstance hilbert_block(std::size_t n, std::size_t m, std::uint64_t seed) {
    if (m < 1 || m >= n) throw ContractViolation("hilbert_block: need 1 <= m < n");
    Rng64 rng(seed);
    std::vector<double> d(n * n);
    for (double& x : d) x = rng.next_uniform();
    const DenseMatrix h = hilbert(m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < m; ++i) d[i + j * n] = h(i, j);
    return ProblemInstance::from_matrix(DenseMatrix(n, n, std::move(d)), "blockhilb");
}

inline ProblemInstance wilkinson_instance(std::size_t n) {
    return ProblemInstance::from_matrix(wilkinson(n), "wilkinson");
}

} // namespace relaxir
