#pragma once

// Iterative refinement with relaxation, everything in working precision:
//
//   x_0 = S(b)
//   r_k = b - A x_k
//   p_k = S(r_k)
//   x_{k+1} = x_k + omega p_k
//
// S is any LinearSolver; in practice a SolverHandle whose factorization is
// reused for every correction.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "relaxir/errors.hpp"
#include "relaxir/linalg.hpp"
#include "relaxir/metrics.hpp"
#include "relaxir/solvers.hpp"

namespace relaxir {

enum class StopMode {
    FixedIterations, ///< always run max_iters corrections
    Stagnation,      ///< stop once ||omega p_k|| fails to shrink stagnation_window times in a row
};

struct RefineConfig {
    double omega = 1.0;
    int max_iters = 10;
    StopMode stop_mode = StopMode::FixedIterations;
    int stagnation_window = 2;
};

/// Iterates beyond this norm are treated as divergence and end the run.
inline constexpr double kDivergenceNorm = 1e100;

/// Known exact solution plus the quantities the metrics normalise by.
struct ReferenceSolution {
    DenseVector x_star;
    double kappa = 1.0;
    double norm_a = 1.0;
};

struct RefinementTrace {
    std::vector<DenseVector> iterates;     // x_0 .. x_K
    std::vector<double> correction_norms;  // ||omega p_k||, k = 0 .. K-1
    std::vector<double> residual_norms;    // ||b - A x_k||, k = 0 .. K
    std::vector<StabilityReport> metrics;  // per iterate, only with a reference
    std::vector<std::int64_t> step_ns;     // wall clock per iterate
    bool diverged = false;

    std::size_t iterations() const noexcept { return correction_norms.size(); }
};

template <LinearSolver Solver>
RefinementTrace refine(const DenseMatrix& a, const DenseVector& b, const Solver& solver, const RefineConfig& cfg,
                       const std::optional<ReferenceSolution>& ref = std::nullopt) {
    if (!a.square() || a.rows() != b.size()) throw ContractViolation("refine: dimensions do not conform");
    if (ref && ref->x_star.size() != b.size()) throw ContractViolation("refine: x* length mismatch");
    if (cfg.max_iters < 0) throw ContractViolation("refine: max_iters must be >= 0");
    if (!std::isfinite(cfg.omega) || cfg.omega == 0.0) throw ContractViolation("refine: omega must be finite and nonzero");

    using clock = std::chrono::steady_clock;
    RefinementTrace trace;
    const std::size_t n = b.size();

    auto record = [&](DenseVector x, const DenseVector& r, clock::time_point started) {
        trace.residual_norms.push_back(vector_norm2(r));
        if (ref) trace.metrics.push_back(stability_report(a, b, x, ref->x_star, ref->kappa, ref->norm_a));
        trace.iterates.push_back(std::move(x));
        trace.step_ns.push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - started).count());
    };

    auto t0 = clock::now();
    DenseVector x0 = solver.solve(b);
    DenseVector r = residual(a, b, x0);
    record(std::move(x0), r, t0);

    int stalls = 0;
    for (int k = 0; k < cfg.max_iters; ++k) {
        const auto started = clock::now();
        const DenseVector& x = trace.iterates.back();
        std::vector<double> next(n);
        double step_norm = 0.0;
        try {
            const DenseVector p = solver.solve(r);
            std::vector<double> step(n);
            for (std::size_t i = 0; i < n; ++i) step[i] = cfg.omega * p[i];
            for (std::size_t i = 0; i < n; ++i) next[i] = x[i] + step[i];
            step_norm = vector_norm2(step);
        } catch (const NonFiniteValue&) {
            trace.diverged = true;
            break;
        }
        bool finite = std::isfinite(step_norm);
        for (double v : next) finite = finite && std::isfinite(v);
        if (!finite || vector_norm2(next) > kDivergenceNorm) {
            trace.diverged = true;
            break;
        }
        DenseVector xn(std::move(next));
        try {
            r = residual(a, b, xn);
        } catch (const NonFiniteValue&) {
            trace.diverged = true;
            break;
        }
        trace.correction_norms.push_back(step_norm);
        record(std::move(xn), r, started);

        if (cfg.stop_mode == StopMode::Stagnation && trace.correction_norms.size() >= 2) {
            const std::size_t last = trace.correction_norms.size() - 1;
            stalls = trace.correction_norms[last] >= trace.correction_norms[last - 1] ? stalls + 1 : 0;
            if (stalls >= cfg.stagnation_window) break;
        }
    }
    return trace;
}

enum class ConvergenceKind { Contractive, Stationary, Divergent };

struct ConvergenceClass {
    ConvergenceKind kind;
    double rate; // |1 - omega|, the exact-arithmetic error contraction per step
};

/// In exact arithmetic x_{k+1} - x* = (1 - omega)(x_k - x*), so refinement
/// converges from any start iff 0 < omega < 2; omega = 1 lands on x* in one step.
inline ConvergenceClass classify_convergence(double omega) {
    if (!std::isfinite(omega)) throw ContractViolation("classify_convergence: omega must be finite");
    const double rate = std::abs(1.0 - omega);
    if (omega == 1.0) return {ConvergenceKind::Stationary, 0.0};
    if (omega > 0.0 && omega < 2.0) return {ConvergenceKind::Contractive, rate};
    return {ConvergenceKind::Divergent, rate};
}

} // namespace relaxir
