#pragma once

// Stability statistics of a computed solution x~ of Ax = b:
//   alpha  forward error      ||x~ - x*|| / (kappa(A) ||x*||)
//   beta   normwise backward  ||b - Ax~|| / (||A|| ||x~||)
//   gamma  componentwise      max_i |b - Ax~|_i / (|A||x~|)_i

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "relaxir/errors.hpp"
#include "relaxir/linalg.hpp"

namespace relaxir {

struct StabilityReport {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0; // may be +infinity
    double kappa = 1.0;
};

inline double forward_error(const DenseVector& x_tilde, const DenseVector& x_star, double kappa) {
    if (x_tilde.size() != x_star.size()) throw ContractViolation("forward_error: length mismatch");
    const double ref = vector_norm2(x_star);
    if (ref == 0.0) throw ContractViolation("forward_error: x* must be nonzero");
    if (!(kappa >= 1.0)) throw ContractViolation("forward_error: kappa must be >= 1");
    return vector_norm2(difference(x_tilde, x_star)) / (kappa * ref);
}

/// norm_a defaults to matrix_norm2(A); pass it when evaluating many iterates.
inline double backward_error(const DenseMatrix& a, const DenseVector& b, const DenseVector& x_tilde,
                             std::optional<double> norm_a = std::nullopt) {
    const double xn = vector_norm2(x_tilde);
    if (xn == 0.0) throw ContractViolation("backward_error: x~ must be nonzero");
    const double an = norm_a ? *norm_a : matrix_norm2(a);
    return vector_norm2(residual(a, b, x_tilde)) / (an * xn);
}

/// 0/0 components contribute 0; a nonzero residual over a zero
/// denominator makes the result +infinity.
inline double componentwise_error(const DenseMatrix& a, const DenseVector& b, const DenseVector& x_tilde) {
    if (a.cols() != x_tilde.size()) throw ContractViolation("componentwise_error: A.cols != x~.len");
    const DenseVector r = residual(a, b, x_tilde);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double den = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) den += std::abs(a(i, j)) * std::abs(x_tilde[j]);
        const double num = std::abs(r[i]);
        if (den == 0.0) {
            if (num != 0.0) return std::numeric_limits<double>::infinity();
            continue;
        }
        worst = std::max(worst, num / den);
    }
    return worst;
}

inline StabilityReport stability_report(const DenseMatrix& a, const DenseVector& b, const DenseVector& x_tilde,
                                        const DenseVector& x_star, double kappa, double norm_a) {
    return StabilityReport{forward_error(x_tilde, x_star, kappa), backward_error(a, b, x_tilde, norm_a),
                           componentwise_error(a, b, x_tilde), kappa};
}

} // namespace relaxir
