// refine-ir: relaxed iterative refinement experiments from the command line.
//
//   refine-ir table  --preset wilkinson --solver gepp --metric alpha
//   refine-ir run    --matrix A.mtx --rhs ones --solver blu --split 4 --omega 0.9
//   refine-ir theory --omega 1 --q 0.01 --ln 100 --kappa 44.8
//
// Exit status: 0 success, 1 bad input, 2 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relaxir/relaxir.hpp"

namespace {

using namespace relaxir;

constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;

struct Output {
    std::string metric = "alpha";
    std::string format = "table";
    std::string out;
};

struct TableArgs {
    std::string preset;
    std::optional<std::size_t> n, m;
    std::optional<double> t;
    std::string solver = "gepp";
    std::optional<std::size_t> split;
    std::vector<double> omegas = {0.3, 0.5, 0.7, 0.9, 1.0, 1.2};
    int iters = 10;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    bool timing = false;
    Output output;
};

struct RunArgs {
    std::string matrix;
    std::string rhs = "ones";
    std::string solver = "gepp";
    std::optional<std::size_t> split;
    double omega = 1.0;
    int iters = 10;
    Output output;
};

struct TheoryArgs {
    double omega = 1.0;
    double q = 0.0;
    double ln = 1.0;
    double kappa = 1.0;
    double eps = kEps;
    std::size_t kmax = 10;
};

void add_output_options(CLI::App* cmd, Output& o) {
    cmd->add_option("--metric", o.metric, "metric shown by the table format")
        ->check(CLI::IsMember({"alpha", "beta", "gamma"}))
        ->capture_default_str();
    cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "table"}))->capture_default_str();
    cmd->add_option("--out", o.out, "write to FILE instead of standard output");
}

SolverKind solver_kind(const std::string& name, std::optional<std::size_t> split, std::size_t default_split) {
    if (name == "gepp") {
        if (split) throw ContractViolation("--split only applies to --solver blu");
        return SolverKind::gepp();
    }
    return SolverKind::block_lu(split.value_or(default_split));
}

void emit(const std::vector<ResultRow>& rows, const Output& o) {
    const std::string text = render(rows, o.format == "csv" ? Format::Csv : Format::Table, *parse_metric(o.metric));
    if (o.out.empty()) {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw IoError("cannot open '" + o.out + "' for writing");
    f << text;
    f.flush();
    if (!f) throw IoError("write to '" + o.out + "' failed");
}

void run_table(const TableArgs& args) {
    ExperimentSpec spec;
    spec.preset.family = *parse_family(args.preset);
    spec.preset.n = args.n;
    spec.preset.m = args.m;
    spec.preset.t = args.t;
    spec.solver = solver_kind(args.solver, args.split, spec.preset.split());
    spec.omegas = args.omegas;
    spec.iters = args.iters;
    spec.seed = args.seed;
    spec.threads = args.threads;
    spec.timing = args.timing;
    emit(run_experiment(spec), args.output);
}

void run_matrix(const RunArgs& args) {
    DenseMatrix a = load_matrix(args.matrix);
    if (!a.square()) {
        throw ContractViolation("matrix must be square, got " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
    std::optional<DenseVector> x_star;
    std::optional<DenseVector> b;
    if (args.rhs == "ones") {
        x_star = DenseVector::ones(a.cols());
        b = mat_vec(a, *x_star);
    } else {
        const DenseMatrix rhs = load_matrix(args.rhs);
        if (rhs.cols() != 1 || rhs.rows() != a.rows()) {
            throw ContractViolation("right-hand side must be a " + std::to_string(a.rows()) + "x1 matrix");
        }
        b = DenseVector(rhs.vec());
    }
    ExperimentSpec spec;
    spec.solver = solver_kind(args.solver, args.split, a.rows() / 2);
    spec.omegas = {args.omega};
    spec.iters = args.iters;
    const ExperimentProblem prob{std::move(a), std::move(*b), std::move(x_star),
                                 std::filesystem::path(args.matrix).stem().string()};
    emit(run_problem(prob, spec), args.output);
}

void run_theory(const TheoryArgs& args) {
    TheoryParams p;
    p.omega = args.omega;
    p.q = args.q;
    p.l_n = args.ln;
    p.eps = args.eps;
    p.kappa = args.kappa;

    const AssumptionReport report = check_assumptions(p);
    std::cout << "assumptions: " << (report.valid() ? "valid" : "violated") << '\n';
    for (const Violation& v : report.violations) {
        std::cout << "  " << to_string(v.which) << ": " << format_shortest(v.value) << " exceeds "
                  << format_shortest(v.limit) << '\n';
    }
    const QSequence seq = lemma1_recurrence(p, args.kmax);
    std::cout << "q_k" << (seq.advisory_only ? " (advisory: assumptions violated)" : "") << '\n';
    char buf[64];
    for (std::size_t k = 0; k < seq.q.size(); ++k) {
        std::snprintf(buf, sizeof buf, "  %-4zu %.6E\n", k, seq.q[k]);
        std::cout << buf;
    }
    if (const auto fp = lemma1_fixed_point(p)) {
        std::snprintf(buf, sizeof buf, "fixed_point: %.6E\n", *fp);
        std::cout << buf;
    }
    std::snprintf(buf, sizeof buf, "theorem1_bound: %.6E\n", theorem1_bound(p));
    std::cout << buf << std::flush;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relaxed iterative refinement experiments"};
    app.require_subcommand(1);

    TableArgs table;
    auto* table_cmd = app.add_subcommand("table", "refine a preset problem for a list of relaxation parameters");
    table_cmd->add_option("--preset", table.preset, "problem family")
        ->required()
        ->check(CLI::IsMember({"wilkinson", "tridiag", "blockhilb"}));
    table_cmd->add_option("--n", table.n, "matrix order")->check(CLI::PositiveNumber);
    table_cmd->add_option("--m", table.m, "spike row (tridiag) or leading block order (blockhilb)")
        ->check(CLI::PositiveNumber);
    table_cmd->add_option("--t", table.t, "spike value (tridiag)")->check(CLI::NonNegativeNumber);
    table_cmd->add_option("--solver", table.solver, "base solver")
        ->check(CLI::IsMember({"gepp", "blu"}))
        ->capture_default_str();
    table_cmd->add_option("--split", table.split, "block LU split index")->check(CLI::PositiveNumber);
    table_cmd->add_option("--omegas", table.omegas, "comma-separated relaxation parameters")
        ->delimiter(',')
        ->capture_default_str();
    table_cmd->add_option("--iters", table.iters, "refinement steps")->check(CLI::NonNegativeNumber)->capture_default_str();
    table_cmd->add_option("--seed", table.seed, "random seed")->capture_default_str();
    table_cmd->add_option("--threads", table.threads, "worker threads for omega cells")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    table_cmd->add_flag("--timing", table.timing, "record wall-clock time per step in runtime_ns");
    add_output_options(table_cmd, table.output);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "refine a system read from a Matrix Market file");
    run_cmd->add_option("--matrix", run.matrix, "dense Matrix Market file")->required();
    run_cmd->add_option("--rhs", run.rhs, "'ones' (b = A*1) or an n x 1 Matrix Market file")->capture_default_str();
    run_cmd->add_option("--solver", run.solver, "base solver")
        ->check(CLI::IsMember({"gepp", "blu"}))
        ->capture_default_str();
    run_cmd->add_option("--split", run.split, "block LU split index (default n/2)")->check(CLI::PositiveNumber);
    run_cmd->add_option("--omega", run.omega, "relaxation parameter")->capture_default_str();
    run_cmd->add_option("--iters", run.iters, "refinement steps")->check(CLI::NonNegativeNumber)->capture_default_str();
    add_output_options(run_cmd, run.output);

    TheoryArgs theory;
    auto* theory_cmd = app.add_subcommand("theory", "evaluate the predicted error sequence and asymptotic bound");
    theory_cmd->add_option("--omega", theory.omega, "relaxation parameter")->required();
    theory_cmd->add_option("--q", theory.q, "solver quality")->required();
    theory_cmd->add_option("--ln", theory.ln, "residual growth L(n)")->required();
    theory_cmd->add_option("--kappa", theory.kappa, "condition number")->required();
    theory_cmd->add_option("--eps", theory.eps, "unit roundoff")->capture_default_str();
    theory_cmd->add_option("--kmax", theory.kmax, "last k printed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitInput;
    }

    try {
        assert_round_to_nearest();
        if (*table_cmd) run_table(table);
        if (*run_cmd) run_matrix(run);
        if (*theory_cmd) run_theory(theory);
    } catch (const ContractViolation& e) {
        std::cerr << "refine-ir: invalid input: " << e.what() << '\n';
        return kExitInput;
    } catch (const ParseError& e) {
        std::cerr << "refine-ir: parse error: " << e.what() << '\n';
        return kExitInput;
    } catch (const IoError& e) {
        std::cerr << "refine-ir: i/o error: " << e.what() << '\n';
        return kExitInput;
    } catch (const SingularMatrixError& e) {
        std::cerr << "refine-ir: singular matrix: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ConvergenceFailure& e) {
        std::cerr << "refine-ir: SVD did not converge: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const NumericalFailure& e) {
        std::cerr << "refine-ir: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const Error& e) {
        std::cerr << "refine-ir: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
