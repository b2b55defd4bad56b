#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <string>

#include "relaxir/experiment.hpp"

using namespace relaxir;

namespace {

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

} // namespace

TEST(RunExperiment, WilkinsonOneStepAtOmegaOne) {
    ExperimentSpec spec;
    spec.omegas = {1.0};
    spec.iters = 1;
    const auto rows = run_experiment(spec);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1].k, 1);
    EXPECT_LE(rows[1].alpha, 1e-15);
    EXPECT_EQ(rows[0].preset, "wilkinson");
    EXPECT_EQ(rows[0].solver, "gepp");
    EXPECT_NEAR(rows[0].kappa, 44.8, 0.1);
}

TEST(RunExperiment, WilkinsonTenfoldDecayAtPointNine) {
    ExperimentSpec spec;
    spec.omegas = {0.9};
    const auto rows = run_experiment(spec);
    ASSERT_EQ(rows.size(), 11u);
    int checked = 0;
    for (std::size_t k = 0; k + 1 < rows.size() && rows[k].alpha >= 1e-13; ++k, ++checked) {
        EXPECT_NEAR(rows[k + 1].alpha / rows[k].alpha, 0.1, 0.02) << "k=" << k;
    }
    EXPECT_GE(checked, 8);
}

TEST(RunExperiment, ZeroIterationsGivesIdenticalRows) {
    for (Family f : {Family::Wilkinson, Family::Tridiag, Family::BlockHilb}) {
        ExperimentSpec spec;
        spec.preset.family = f;
        spec.solver = f == Family::BlockHilb ? SolverKind::block_lu(8) : SolverKind::gepp();
        spec.iters = 0;
        const auto rows = run_experiment(spec);
        ASSERT_EQ(rows.size(), spec.omegas.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            EXPECT_EQ(rows[i].k, 0);
            EXPECT_EQ(rows[i].omega, spec.omegas[i]);
            EXPECT_TRUE(same_bits(rows[i].alpha, rows[0].alpha));
            EXPECT_TRUE(same_bits(rows[i].beta, rows[0].beta));
            EXPECT_TRUE(same_bits(rows[i].gamma, rows[0].gamma));
        }
    }
}

TEST(RunExperiment, FirstRowSharedAcrossOmegas) {
    ExperimentSpec spec;
    spec.preset.family = Family::Tridiag;
    const auto rows = run_experiment(spec);
    ASSERT_EQ(rows.size(), spec.omegas.size() * 11);
    for (std::size_t c = 0; c < spec.omegas.size(); ++c) {
        const ResultRow& r = rows[c * 11];
        EXPECT_EQ(r.k, 0);
        EXPECT_EQ(r.alpha, rows[0].alpha);
        EXPECT_EQ(r.gamma, rows[0].gamma);
        for (int k = 0; k <= 10; ++k) EXPECT_EQ(rows[c * 11 + k].k, k);
    }
}

TEST(RunExperiment, ThreadCountDoesNotChangeOutput) {
    ExperimentSpec spec;
    spec.preset.family = Family::BlockHilb;
    spec.solver = SolverKind::block_lu(8);
    const std::string single = to_csv(run_experiment(spec));
    spec.threads = 4;
    EXPECT_EQ(to_csv(run_experiment(spec)), single);
    spec.threads = 64;
    EXPECT_EQ(to_csv(run_experiment(spec)), single);
}

TEST(RunExperiment, RejectsInvalidSpecs) {
    ExperimentSpec spec;
    spec.omegas.clear();
    EXPECT_THROW(run_experiment(spec), ContractViolation);
    spec = ExperimentSpec{};
    spec.iters = -1;
    EXPECT_THROW(run_experiment(spec), ContractViolation);
    spec = ExperimentSpec{};
    spec.solver = SolverKind::block_lu(100);
    EXPECT_THROW(run_experiment(spec), ContractViolation);
}

TEST(RunExperiment, SingularMatrixIsANumericalFailure) {
    ExperimentProblem prob{DenseMatrix::from_rows({{1, 2}, {2, 4}}), DenseVector{1, 2}, std::nullopt, "singular"};
    EXPECT_THROW(run_problem(prob, ExperimentSpec{}), SingularMatrixError);
}

TEST(RunExperiment, UnknownSolutionLeavesAlphaUnset) {
    ExperimentProblem prob{DenseMatrix::from_rows({{4, 1}, {1, 3}}), DenseVector{1, 2}, std::nullopt, "m"};
    ExperimentSpec spec;
    spec.omegas = {1.0};
    spec.iters = 2;
    const auto rows = run_problem(prob, spec);
    for (const auto& r : rows) {
        EXPECT_TRUE(std::isnan(r.alpha));
        EXPECT_TRUE(std::isfinite(r.beta));
    }
    EXPECT_NE(to_csv(rows).find(",nan,"), std::string::npos);
}

TEST(PresetSpec, Defaults) {
    PresetSpec w{Family::Wilkinson};
    EXPECT_EQ(w.order(), 100u);
    PresetSpec t{Family::Tridiag};
    EXPECT_EQ(t.order(), 10u);
    EXPECT_EQ(t.split(), 5u);
    EXPECT_EQ(t.spike(), 1e10);
    PresetSpec h{Family::BlockHilb};
    EXPECT_EQ(h.order(), 16u);
    EXPECT_EQ(h.split(), 8u);
    EXPECT_EQ(parse_family("tridiag"), Family::Tridiag);
    EXPECT_FALSE(parse_family("hilbert").has_value());
}

TEST(Csv, OneRowGivesTwoLines) {
    ResultRow r{"wilkinson", "gepp", 0.5, 3, 0.25, 1e-17, 2e-16, 44.8, 0};
    const std::string csv = to_csv({r});
    EXPECT_EQ(count_lines(csv), 2u);
    EXPECT_EQ(csv, "preset,solver,omega,k,alpha,beta,gamma,kappa,runtime_ns\n"
                   "wilkinson,gepp,0.5,3,0.25,1e-17,2e-16,44.8,0\n");
    EXPECT_EQ(csv.find('\r'), std::string::npos);
}

TEST(Csv, InfiniteGammaIsWrittenAsInf) {
    ResultRow r{"p", "gepp", 1.0, 0, 0.0, 0.0, std::numeric_limits<double>::infinity(), 1.0, 0};
    EXPECT_NE(to_csv({r}).find(",inf,"), std::string::npos);
    const auto back = parse_csv(to_csv({r}));
    EXPECT_TRUE(std::isinf(back[0].gamma));
}

TEST(Csv, RoundTripIsBitExact) {
    Rng64 rng(17);
    std::vector<ResultRow> rows;
    for (int i = 0; i < 500; ++i) {
        auto wild = [&] {
            const int e = static_cast<int>(rng.next_u64() % 2000) - 1000;
            return std::ldexp(rng.next_uniform(), e / 2);
        };
        ResultRow r;
        r.preset = i % 2 ? "tridiag" : "blockhilb";
        r.solver = i % 3 ? "gepp" : "blu8";
        r.omega = rng.next_uniform() * 2;
        r.k = static_cast<int>(rng.next_u64() % 100);
        r.alpha = wild();
        r.beta = wild();
        r.gamma = i % 7 == 0 ? 0.0 : wild();
        r.kappa = 1 + wild();
        r.runtime_ns = static_cast<std::int64_t>(rng.next_u64() >> 2);
        rows.push_back(r);
    }
    const auto back = parse_csv(to_csv(rows));
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(back[i], rows[i]);
        EXPECT_TRUE(same_bits(back[i].alpha, rows[i].alpha));
        EXPECT_TRUE(same_bits(back[i].omega, rows[i].omega));
    }
}

TEST(Csv, ParseErrorsCarryLineNumbers) {
    try {
        parse_csv(std::string(kCsvHeader) + "\np,gepp,1,0,1,1,1,1,0\np,gepp,1,x,1,1,1,1,0\n");
        ADD_FAILURE();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(parse_csv("bad header\n"), ParseError);
    EXPECT_THROW(parse_csv(""), ParseError);
    EXPECT_THROW(parse_csv(std::string(kCsvHeader) + "\na,b,c\n"), ParseError);
}

TEST(Table, OmegaColumnsByIterationRows) {
    std::vector<ResultRow> rows;
    for (double w : {0.5, 1.0})
        for (int k = 0; k <= 2; ++k) rows.push_back({"p", "gepp", w, k, 0.0151 / (k + 1) * w, 0, 0, 1, 0});
    rows.pop_back(); // omega=1 stops at k=1
    const std::string table = to_table(rows, Metric::Alpha);
    std::istringstream in(table);
    std::string header, r0, r1, r2;
    std::getline(in, header);
    std::getline(in, r0);
    std::getline(in, r1);
    std::getline(in, r2);
    EXPECT_EQ(header, "omega/k         0.5          1");
    EXPECT_EQ(r0, "0          7.55E-03   1.51E-02");
    EXPECT_EQ(r2, "2          2.52E-03          -");
    EXPECT_EQ(count_lines(table), 4u);
    EXPECT_THROW(render({}, Format::Csv, Metric::Alpha), ContractViolation);
    EXPECT_EQ(render(rows, Format::Csv, Metric::Gamma), to_csv(rows));
}
