#pragma once

// Experiment harness: build a problem, factor once, refine for every
// relaxation parameter, and turn the traces into rows of stability metrics.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <thread>
#include <vector>

#include "relaxir/errors.hpp"
#include "relaxir/generators.hpp"
#include "relaxir/linalg.hpp"
#include "relaxir/metrics.hpp"
#include "relaxir/refine.hpp"
#include "relaxir/solvers.hpp"
#include "relaxir/text.hpp"

namespace relaxir {

enum class Family { Wilkinson, Tridiag, BlockHilb };

inline const char* to_string(Family f) {
    switch (f) {
    case Family::Wilkinson: return "wilkinson";
    case Family::Tridiag: return "tridiag";
    case Family::BlockHilb: return "blockhilb";
    }
    return "unknown";
}

inline std::optional<Family> parse_family(std::string_view s) {
    if (s == "wilkinson") return Family::Wilkinson;
    if (s == "tridiag") return Family::Tridiag;
    if (s == "blockhilb") return Family::BlockHilb;
    return std::nullopt;
}

/// A preset family with its size knobs. Unset knobs take the family default:
/// wilkinson n = 100; tridiag n = 10, m = 5, t = 1e10; blockhilb n = 16, m = 8.
struct PresetSpec {
    Family family = Family::Wilkinson;
    std::optional<std::size_t> n;
    std::optional<std::size_t> m;
    std::optional<double> t;

    std::size_t order() const {
        if (n) return *n;
        switch (family) {
        case Family::Wilkinson: return 100;
        case Family::Tridiag: return 10;
        case Family::BlockHilb: return m ? 2 * *m : 16;
        }
        return 0;
    }
    std::size_t split() const {
        if (m) return *m;
        switch (family) {
        case Family::Wilkinson: return order() / 2;
        case Family::Tridiag: return 5;
        case Family::BlockHilb: return order() / 2;
        }
        return 0;
    }
    double spike() const { return t.value_or(1e10); }
};

inline ProblemInstance build_preset(const PresetSpec& p, std::uint64_t seed) {
    switch (p.family) {
    case Family::Wilkinson: return wilkinson_instance(p.order());
    case Family::Tridiag: return spiked_tridiagonal(p.order(), p.split(), p.spike(), seed);
    case Family::BlockHilb: return hilbert_block(p.order(), p.split(), seed);
    }
    throw ContractViolation("unknown preset family");
}

/// A system to experiment on; x_star is absent for user-supplied right-hand sides.
struct ExperimentProblem {
    DenseMatrix a;
    DenseVector b;
    std::optional<DenseVector> x_star;
    std::string label;

    static ExperimentProblem from(const ProblemInstance& inst) { return {inst.a, inst.b, inst.x_star, inst.label}; }
};

struct ExperimentSpec {
    PresetSpec preset;
    SolverKind solver = SolverKind::gepp();
    std::vector<double> omegas = {0.3, 0.5, 0.7, 0.9, 1.0, 1.2};
    int iters = 10;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    bool timing = false; // runtime_ns stays 0 unless set, keeping output byte-reproducible
};

struct ResultRow {
    std::string preset;
    std::string solver;
    double omega = 1.0;
    int k = 0;
    double alpha = std::numeric_limits<double>::quiet_NaN(); // NaN when x* is unknown
    double beta = 0.0;
    double gamma = 0.0;
    double kappa = 1.0;
    std::int64_t runtime_ns = 0;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// Rows ordered by omega (as given) then k.
inline std::vector<ResultRow> run_problem(const ExperimentProblem& prob, const ExperimentSpec& spec) {
    if (spec.omegas.empty()) throw ContractViolation("experiment needs at least one omega");
    if (spec.iters < 0) throw ContractViolation("experiment iters must be >= 0");
    if (!prob.a.square()) throw ContractViolation("experiment matrix must be square");
    if (prob.b.size() != prob.a.rows()) throw ContractViolation("right-hand side length does not match the matrix");

    const SvdResult svd = jacobi_svd(prob.a);
    const double norm_a = svd.singular_values.front();
    const double smin = svd.singular_values.back();
    const double kappa = smin == 0.0 ? std::numeric_limits<double>::infinity() : norm_a / smin;
    const SolverHandle handle = solver_factor(prob.a, spec.solver);
    const std::string solver_label = spec.solver.label();

    auto cell = [&](double omega) {
        RefineConfig cfg;
        cfg.omega = omega;
        cfg.max_iters = spec.iters;
        const RefinementTrace trace = refine(prob.a, prob.b, handle, cfg);
        std::vector<ResultRow> rows;
        for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
            const DenseVector& x = trace.iterates[k];
            ResultRow row;
            row.preset = prob.label;
            row.solver = solver_label;
            row.omega = omega;
            row.k = static_cast<int>(k);
            if (prob.x_star) row.alpha = forward_error(x, *prob.x_star, kappa);
            row.beta = backward_error(prob.a, prob.b, x, norm_a);
            row.gamma = componentwise_error(prob.a, prob.b, x);
            row.kappa = kappa;
            row.runtime_ns = spec.timing ? trace.step_ns[k] : 0;
            rows.push_back(std::move(row));
        }
        return rows;
    };

    const std::size_t cells = spec.omegas.size();
    std::vector<std::vector<ResultRow>> results(cells);
    std::vector<std::exception_ptr> errors(cells);
    const unsigned workers = std::max(1u, std::min<unsigned>(spec.threads, static_cast<unsigned>(cells)));
    if (workers == 1) {
        for (std::size_t c = 0; c < cells; ++c) results[c] = cell(spec.omegas[c]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t c = next++; c < cells; c = next++) {
                    try {
                        results[c] = cell(spec.omegas[c]);
                    } catch (...) {
                        errors[c] = std::current_exception();
                    }
                }
            });
        }
        pool.clear(); // joins
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    std::vector<ResultRow> rows;
    for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
    return rows;
}

inline std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
    return run_problem(ExperimentProblem::from(build_preset(spec.preset, spec.seed)), spec);
}

// ---------------------------------------------------------------------------
// Output

enum class Metric { Alpha, Beta, Gamma };
enum class Format { Csv, Table };

inline std::optional<Metric> parse_metric(std::string_view s) {
    if (s == "alpha") return Metric::Alpha;
    if (s == "beta") return Metric::Beta;
    if (s == "gamma") return Metric::Gamma;
    return std::nullopt;
}

inline double metric_of(const ResultRow& r, Metric m) {
    switch (m) {
    case Metric::Alpha: return r.alpha;
    case Metric::Beta: return r.beta;
    case Metric::Gamma: return r.gamma;
    }
    return 0.0;
}

inline constexpr std::string_view kCsvHeader = "preset,solver,omega,k,alpha,beta,gamma,kappa,runtime_ns";

inline std::string to_csv(const std::vector<ResultRow>& rows) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const ResultRow& r : rows) {
        out += r.preset + ',' + r.solver + ',' + format_shortest(r.omega) + ',' + std::to_string(r.k) + ',' +
               format_shortest(r.alpha) + ',' + format_shortest(r.beta) + ',' + format_shortest(r.gamma) + ',' +
               format_shortest(r.kappa) + ',' + std::to_string(r.runtime_ns) + '\n';
    }
    return out;
}

inline std::vector<ResultRow> parse_csv(std::string_view text) {
    std::vector<ResultRow> rows;
    std::size_t lineno = 0;
    bool header = true;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++lineno;
        if (header) {
            if (line != kCsvHeader) throw ParseError(lineno, "unexpected CSV header");
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string_view> cells;
        for (std::size_t pos = 0;;) {
            const std::size_t comma = line.find(',', pos);
            cells.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
        if (cells.size() != 9) throw ParseError(lineno, "expected 9 CSV fields, found " + std::to_string(cells.size()));
        auto real = [&](std::string_view s) {
            const auto v = parse_double(s);
            if (!v) throw ParseError(lineno, "malformed number '" + std::string(s) + "'");
            return *v;
        };
        auto integer = [&](std::string_view s) -> std::int64_t {
            std::int64_t v = 0;
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
                throw ParseError(lineno, "malformed integer '" + std::string(s) + "'");
            return v;
        };
        ResultRow r;
        r.preset = std::string(cells[0]);
        r.solver = std::string(cells[1]);
        r.omega = real(cells[2]);
        r.k = static_cast<int>(integer(cells[3]));
        r.alpha = real(cells[4]);
        r.beta = real(cells[5]);
        r.gamma = real(cells[6]);
        r.kappa = real(cells[7]);
        r.runtime_ns = integer(cells[8]);
        rows.push_back(std::move(r));
    }
    if (header) throw ParseError(1, "empty CSV");
    return rows;
}

/// omega columns by k rows, %.2E cells; "-" where a run stopped early.
inline std::string to_table(const std::vector<ResultRow>& rows, Metric metric) {
    std::vector<double> omegas;
    int kmax = -1;
    for (const ResultRow& r : rows) {
        if (std::find(omegas.begin(), omegas.end(), r.omega) == omegas.end()) omegas.push_back(r.omega);
        kmax = std::max(kmax, r.k);
    }
    constexpr int width = 11;
    char buf[64];
    std::string out;
    std::snprintf(buf, sizeof buf, "%-8s", "omega/k");
    out += buf;
    for (double w : omegas) {
        std::snprintf(buf, sizeof buf, "%*g", width, w);
        out += buf;
    }
    out += '\n';
    for (int k = 0; k <= kmax; ++k) {
        std::snprintf(buf, sizeof buf, "%-8d", k);
        out += buf;
        for (double w : omegas) {
            auto it = std::find_if(rows.begin(), rows.end(), [&](const ResultRow& r) { return r.omega == w && r.k == k; });
            if (it == rows.end()) {
                std::snprintf(buf, sizeof buf, "%*s", width, "-");
            } else {
                std::snprintf(buf, sizeof buf, "%*.2E", width, metric_of(*it, metric));
            }
            out += buf;
        }
        out += '\n';
    }
    return out;
}

inline std::string render(const std::vector<ResultRow>& rows, Format format, Metric metric) {
    if (rows.empty()) throw ContractViolation("nothing to emit");
    return format == Format::Csv ? to_csv(rows) : to_table(rows, metric);
}

} // namespace relaxir
