// Refine the 100x100 Wilkinson system over GEPP for a few relaxation
// parameters and print the forward error per step.

#include <cstdio>

#include "relaxir/relaxir.hpp"

int main() {
    using namespace relaxir;

    const ProblemInstance inst = wilkinson_instance(100);
    const double kappa = cond2(inst.a);
    const SolverHandle solver = solver_factor(inst.a, SolverKind::gepp());
    std::printf("kappa = %.4f, growth factor = %.3E\n", kappa, solver.plu()->growth_factor);

    const ReferenceSolution ref{inst.x_star, kappa, matrix_norm2(inst.a)};
    for (double omega : {0.5, 0.9, 1.0}) {
        const RefinementTrace trace = refine(inst.a, inst.b, solver, RefineConfig{omega, 6}, ref);
        std::printf("omega = %.1f:", omega);
        for (const StabilityReport& m : trace.metrics) std::printf(" %.2E", m.alpha);
        std::printf("\n");
    }
    return 0;
}
