#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "relaxir/experiment.hpp"
#include "relaxir/theory.hpp"

using namespace relaxir;

namespace {

bool has(const AssumptionReport& r, Assumption a) {
    return std::any_of(r.violations.begin(), r.violations.end(), [a](const Violation& v) { return v.which == a; });
}

TheoryParams params(double omega, double q, double l_n, double eps, double kappa) {
    TheoryParams p;
    p.omega = omega;
    p.q = q;
    p.l_n = l_n;
    p.eps = eps;
    p.kappa = kappa;
    return p;
}

} // namespace

TEST(CheckAssumptions, Examples) {
    EXPECT_TRUE(check_assumptions(params(1.0, 0.01, 100, 2.2e-16, 44.8)).valid());

    const AssumptionReport r = check_assumptions(params(1.7, 0.0, 100, 2.2e-16, 44.8));
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_EQ(r.violations[0].which, Assumption::Contraction);
    EXPECT_NEAR(r.violations[0].value, 0.7, 1e-15);

    // L eps kappa = 100 * 2e-16 * 1e12 = 0.02
    const AssumptionReport c = check_assumptions(params(1.0, 0.01, 100, 2e-16, 1e12));
    EXPECT_TRUE(has(c, Assumption::ResidualConditioning));
    EXPECT_FALSE(has(c, Assumption::Contraction));
}

TEST(CheckAssumptions, ReportsEveryViolation) {
    const AssumptionReport r = check_assumptions(params(2.5, 0.5, 1e20, 0.02, 1.0));
    for (Assumption a : {Assumption::MachinePrecision, Assumption::ResidualConditioning, Assumption::Contraction,
                         Assumption::SolverQuality, Assumption::RelaxationWindow}) {
        EXPECT_TRUE(has(r, a)) << to_string(a);
    }
    EXPECT_THROW(check_assumptions(params(1.0, 0.0, 1, 2e-16, 0.5)), ContractViolation);
}

TEST(Lemma1Recurrence, CollapsesWithoutRounding) {
    const QSequence s = lemma1_recurrence(params(1.0, 0.1, 100, 0x1.0p-1074, 1.0), 3);
    // eps at the subnormal limit keeps the floor term negligible: q_{k+1} = 0.1 q_k.
    EXPECT_NEAR(s.q[1], 0.01, 1e-17);
    EXPECT_NEAR(s.q[2], 0.001, 1e-18);

    TheoryParams zero = params(0.5, 0.0, 100, 1e-300, 1.0);
    const QSequence z = lemma1_recurrence(zero, 5);
    EXPECT_EQ(z.q[0], 0.0);
    for (double q : z.q) EXPECT_LE(q, 1e-290);
}

TEST(Lemma1Recurrence, FixedPointAfter200Steps) {
    const TheoryParams p = params(1.0, 0.01, 100, 2.2e-16, 44.8);
    const QSequence s = lemma1_recurrence(p, 200);
    const auto fp = lemma1_fixed_point(p);
    ASSERT_TRUE(fp.has_value());
    // Direct arithmetic: (2.31*100*2.2e-16*44.8 + 1.64*2.2e-16) / 0.99
    EXPECT_NEAR(*fp, 2.3000977777777777e-12, 1e-24);
    EXPECT_NEAR(s.q.back() / *fp, 1.0, 1e-6);
    EXPECT_FALSE(s.advisory_only);
    EXPECT_FALSE(lemma1_fixed_point(params(2.5, 0.0, 1, 1e-16, 1)).has_value());
}

TEST(Lemma1Recurrence, FlaggedAdvisoryWhenAssumptionsFail) {
    EXPECT_TRUE(lemma1_recurrence(params(1.9, 0.0, 10, 1e-16, 10), 5).advisory_only);
}

TEST(Lemma1Recurrence, MonotoneInEveryParameter) {
    Rng64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const TheoryParams base = params(0.1 + 1.8 * rng.next_uniform(), 0.1 * rng.next_uniform(),
                                         1 + 100 * rng.next_uniform(), 1e-16 * (1 + rng.next_uniform()),
                                         1 + 1e6 * rng.next_uniform());
        const auto q0 = lemma1_recurrence(base, 15).q;
        const double f = 1.0 + rng.next_uniform();
        for (int which = 0; which < 4; ++which) {
            TheoryParams up = base;
            if (which == 0) up.q *= f;
            if (which == 1) up.eps *= f;
            if (which == 2) up.kappa *= f;
            if (which == 3) up.l_n *= f;
            const auto q1 = lemma1_recurrence(up, 15).q;
            for (std::size_t k = 0; k < q0.size(); ++k) ASSERT_GE(q1[k], q0[k]) << "param " << which << " k=" << k;
        }
    }
}

TEST(Lemma1Recurrence, ValidParametersStayBelowTenthAndUnderMajorant) {
    Rng64 rng(8);
    int valid = 0;
    while (valid < 200) {
        const TheoryParams p = params(0.4 + 1.2 * rng.next_uniform(), 0.1 * rng.next_uniform(), 1 + 100 * rng.next_uniform(),
                                      kEps, 1 + 1e10 * rng.next_uniform());
        if (!check_assumptions(p).valid()) continue;
        ++valid;
        const auto q = lemma1_recurrence(p, 50).q;
        for (std::size_t k = 0; k < q.size(); ++k) {
            ASSERT_LE(q[k], 0.1);
            if (k >= 1) ASSERT_LE(q[k], contraction_majorant(p, k - 1) * (1 + 1e-12));
        }
    }
}

TEST(Theorem1Bound, Examples) {
    EXPECT_NEAR(theorem1_bound(params(1.0, 0, 0, 2.2e-16, 44.8)), 4.2 * 2.2e-16 * 44.8, 1e-30);
    // (11.6*100 + 4.2) * 2.2e-16 * 44.8
    EXPECT_NEAR(theorem1_bound(params(1.0, 0, 100, 2.2e-16, 44.8)), 1.14743552e-11, 1e-20);
    const TheoryParams p = params(1.0, 0, 37, kEps, 123.0);
    TheoryParams p2 = p;
    p2.kappa *= 2;
    EXPECT_EQ(theorem1_bound(p2), 2 * theorem1_bound(p));
}

TEST(EstimateQ, ExactOracleAndIdentity) {
    Rng64 rng(1);
    const DenseMatrix a = oracle::random_integer_matrix(5, 0, rng);
    ASSERT_LE(cond2(a), 1e4);
    EXPECT_LE(estimate_q(a, oracle::ExactSolver(a), 5, rng), 1e-12);

    const DenseMatrix id = DenseMatrix::identity(7);
    EXPECT_EQ(estimate_q(id, solver_factor(id, SolverKind::gepp()), 10, rng), 0.0);
    EXPECT_THROW(estimate_q(id, solver_factor(id, SolverKind::gepp()), 0, rng), ContractViolation);
}

TEST(EstimateQ, WilkinsonGeppIsPoor) {
    const DenseMatrix w = wilkinson(100);
    Rng64 rng(0);
    const double q = estimate_q(w, solver_factor(w, SolverKind::gepp()), 10, rng);
    EXPECT_GE(q, 1e-6);
}

TEST(FirstKWithin, FindsFirstIterateUnderBound) {
    const DenseVector x_star = DenseVector::ones(2);
    const std::vector<DenseVector> its{DenseVector{2, 1}, DenseVector{1.1, 1}, DenseVector{1, 1}};
    EXPECT_EQ(first_k_within(its, x_star, 0.1), std::optional<std::size_t>(1));
    EXPECT_EQ(first_k_within(its, x_star, 0.0), std::optional<std::size_t>(2));
    EXPECT_FALSE(first_k_within({DenseVector{3, 3}}, x_star, 0.5).has_value());
}
