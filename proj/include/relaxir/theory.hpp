#pragma once

// Forward-error predictions for relaxed refinement over a solver of
// quality q (||S(b) - x*|| <= q ||x*||) and a residual computed with
// backward error L(n) eps (||b|| + ||A|| ||x~||).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "relaxir/errors.hpp"
#include "relaxir/generators.hpp"
#include "relaxir/linalg.hpp"
#include "relaxir/solvers.hpp"

namespace relaxir {

struct TheoryParams {
    double omega = 1.0;
    double q = 0.0;     // solver quality
    double l_n = 1.0;   // residual backward-error growth L(n)
    double eps = kEps;
    double kappa = 1.0;
};

/// Default L(n): the accumulation length of a fixed-order inner product.
inline double default_residual_growth(std::size_t n) { return static_cast<double>(n); }

enum class Assumption {
    MachinePrecision,     ///< eps <= 0.01
    ResidualConditioning, ///< L(n) eps kappa <= 0.01
    Contraction,          ///< |1 - omega| + omega q <= 0.6
    SolverQuality,        ///< q <= 0.1
    RelaxationWindow,     ///< 0 < omega < 2
};

inline const char* to_string(Assumption a) {
    switch (a) {
    case Assumption::MachinePrecision: return "machine-precision";
    case Assumption::ResidualConditioning: return "residual-conditioning";
    case Assumption::Contraction: return "contraction";
    case Assumption::SolverQuality: return "solver-quality";
    case Assumption::RelaxationWindow: return "relaxation-window";
    }
    return "unknown";
}

struct Violation {
    Assumption which;
    double value;  // left-hand side that broke the limit
    double limit;
};

struct AssumptionReport {
    std::vector<Violation> violations;
    bool valid() const noexcept { return violations.empty(); }
};

inline AssumptionReport check_assumptions(const TheoryParams& p) {
    if (!(p.eps > 0.0) || !(p.kappa >= 1.0) || !(p.q >= 0.0)) {
        throw ContractViolation("check_assumptions: need eps > 0, kappa >= 1, q >= 0");
    }
    AssumptionReport r;
    auto need = [&](Assumption which, double value, double limit) {
        if (!(value <= limit)) r.violations.push_back({which, value, limit});
    };
    need(Assumption::MachinePrecision, p.eps, 0.01);
    need(Assumption::ResidualConditioning, p.l_n * p.eps * p.kappa, 0.01);
    need(Assumption::Contraction, std::abs(1.0 - p.omega) + p.omega * p.q, 0.6);
    need(Assumption::SolverQuality, p.q, 0.1);
    if (!(p.omega > 0.0 && p.omega < 2.0)) r.violations.push_back({Assumption::RelaxationWindow, p.omega, 2.0});
    return r;
}

struct QSequence {
    std::vector<double> q; // q_0 .. q_kmax
    bool advisory_only = false; // assumptions violated: the numbers bound nothing
};

/// q_{k+1} = (|1 - omega| + q omega) q_k + 2.31 omega L(n) eps kappa + 1.64 eps, q_0 = q.
inline QSequence lemma1_recurrence(const TheoryParams& p, std::size_t k_max) {
    QSequence s;
    s.advisory_only = !check_assumptions(p).valid();
    const double rate = std::abs(1.0 - p.omega) + p.q * p.omega;
    const double floor_term = 2.31 * p.omega * p.l_n * p.eps * p.kappa + 1.64 * p.eps;
    s.q.reserve(k_max + 1);
    s.q.push_back(p.q);
    for (std::size_t k = 0; k < k_max; ++k) s.q.push_back(rate * s.q.back() + floor_term);
    return s;
}

/// Limit of the recurrence; nullopt when its rate is not below one.
inline std::optional<double> lemma1_fixed_point(const TheoryParams& p) {
    const double rate = std::abs(1.0 - p.omega) + p.q * p.omega;
    if (!(rate < 1.0)) return std::nullopt;
    return (2.31 * p.omega * p.l_n * p.eps * p.kappa + 1.64 * p.eps) / (1.0 - rate);
}

/// 0.6^k + (4.62 L(n) + 1.64) eps kappa / 0.4, the omega-free majorant of q_{k+1}.
inline double contraction_majorant(const TheoryParams& p, std::size_t k) {
    return std::pow(0.6, static_cast<double>(k)) + (4.62 * p.l_n + 1.64) / 0.4 * p.eps * p.kappa;
}

/// Asymptotic forward-error level, as a multiple of ||x*||.
inline double theorem1_bound(const TheoryParams& p) { return (11.6 * p.l_n + 4.2) * p.eps * p.kappa; }

/// Largest observed ||S(A x*) - x*|| / ||x*|| over random sign vectors x*.
template <LinearSolver Solver>
double estimate_q(const DenseMatrix& a, const Solver& solver, int trials, Rng64& rng) {
    if (trials < 1) throw ContractViolation("estimate_q: trials must be >= 1");
    if (!a.square()) throw ContractViolation("estimate_q: matrix must be square");
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> signs(a.cols());
        for (double& s : signs) s = (rng.next_u64() >> 63) != 0 ? 1.0 : -1.0;
        const DenseVector x_star(std::move(signs));
        const DenseVector x = solver.solve(mat_vec(a, x_star));
        worst = std::max(worst, vector_norm2(difference(x, x_star)) / vector_norm2(x_star));
    }
    return worst;
}

/// First k whose relative error falls at or below the bound, if any.
inline std::optional<std::size_t> first_k_within(const std::vector<DenseVector>& iterates, const DenseVector& x_star,
                                                 double bound) {
    const double ref = vector_norm2(x_star);
    for (std::size_t k = 0; k < iterates.size(); ++k) {
        if (vector_norm2(difference(iterates[k], x_star)) / ref <= bound) return k;
    }
    return std::nullopt;
}

} // namespace relaxir
