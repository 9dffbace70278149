#pragma once

// Command implementations behind the `opmean` executable.
//
//   opmean mean       --input FILE [--mean NAME] [--alpha A]
//   opmean divergence --input FILE [--mean NAME]
//   opmean bary       --input FILE [--mean NAME] [--tol T] [--max-iters N]
//   opmean geodesic   --input FILE [--family F] [--metric M] [--samples N]
//   opmean check      --input FILE [--mean NAME] [--suite S]
//
// Exit codes: 0 success, 2 validation, 3 unsupported mean for the operation,
// 4 non-convergence, 5 check-suite failure. OPMEAN_SEED seeds the randomized
// checks (default 42).

#include "opmean/barycenter.hpp"
#include "opmean/divergence.hpp"
#include "opmean/geodesics.hpp"
#include "opmean/io.hpp"
#include "opmean/matcore.hpp"
#include "opmean/means.hpp"
#include "opmean/random.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace opmean::cli {

using io::Json;

enum ExitCode : int {
    kOk = 0,
    kValidation = 2,
    kUnsupportedMean = 3,
    kNotConverged = 4,
    kCheckFailed = 5,
};

struct CommandResult {
    int exit_code = kOk;
    Json record;
    std::vector<std::string> diagnostics;  ///< written to stderr
};

namespace detail {

inline CommandResult validation_failure(const std::string& message)
{
    return {kValidation, Json(), {message}};
}

inline const MeanDescriptor& resolve_mean(const io::MatrixSetFile& file, const std::optional<std::string>& flag)
{
    const std::optional<std::string> name = flag ? flag : file.mean;
    if (!name) {
        throw io::ValidationError("mean: required (pass --mean or set \"mean\" in the input file)");
    }
    try {
        return mean_by_name(*name);
    } catch (const UnknownMean& e) {
        throw io::ValidationError(std::string("mean: ") + e.what());
    }
}

inline void require_count(const io::MatrixSetFile& file, std::size_t n)
{
    if (file.matrices.size() != n) {
        throw io::ValidationError("matrices: expected exactly " + std::to_string(n) + " matrices, got " +
                                  std::to_string(file.matrices.size()));
    }
}

inline Json base_record(const char* op, const io::MatrixSetFile& file)
{
    Json rec;
    rec["op"] = op;
    rec["inputs"] = Json::object();
    rec["inputs"]["count"] = file.matrices.size();
    rec["inputs"]["dim"] = file.matrices.front().dim();
    return rec;
}

inline Json weights_json(const WeightVector& w)
{
    Json arr = Json::array();
    for (double x : w.values()) {
        arr.push_back(x);
    }
    return arr;
}

} // namespace detail

inline CommandResult cmd_mean(const io::MatrixSetFile& file, const std::optional<std::string>& mean_flag,
                              const std::optional<double>& alpha_flag)
{
    detail::require_count(file, 2);
    const MeanDescriptor& sigma = detail::resolve_mean(file, mean_flag);
    const std::optional<double> alpha = alpha_flag ? alpha_flag : file.alpha;

    Json rec = detail::base_record("mean", file);
    rec["inputs"]["mean"] = sigma.name();
    const PDMatrix& a = file.matrices[0];
    const PDMatrix& b = file.matrices[1];
    if (alpha) {
        if (!(*alpha >= 0.0 && *alpha <= 1.0)) {
            throw io::ValidationError("alpha: must lie in [0, 1], got " + std::to_string(*alpha));
        }
        WeightedKind kind;
        if (sigma.name() == "arithmetic") {
            kind = WeightedKind::arithmetic;
        } else if (sigma.name() == "geometric") {
            kind = WeightedKind::geometric;
        } else if (sigma.name() == "harmonic") {
            kind = WeightedKind::harmonic;
        } else {
            throw io::ValidationError("alpha: only valid for arithmetic, geometric or harmonic, not " +
                                      sigma.name());
        }
        rec["inputs"]["alpha"] = *alpha;
        rec["result"] = io::encode_matrix(weighted_two_means(kind, a, b, *alpha), file.complex_encoding);
    } else {
        rec["result"] = io::encode_matrix(mean_apply(sigma, a, b), file.complex_encoding);
    }
    return {kOk, rec, file.warnings};
}

inline CommandResult cmd_divergence(const io::MatrixSetFile& file, const std::optional<std::string>& mean_flag)
{
    detail::require_count(file, 2);
    const MeanDescriptor& sigma = detail::resolve_mean(file, mean_flag);
    Json rec = detail::base_record("divergence", file);
    rec["inputs"]["mean"] = sigma.name();
    rec["result"] = io::encode_divergence(phi(sigma, file.matrices[0], file.matrices[1]));
    return {kOk, rec, file.warnings};
}

struct BaryOptions {
    std::optional<double> tol;
    std::optional<int> max_iters;
};

inline Json report_json(const SolveReport& r)
{
    Json rep;
    rep["iterations"] = r.iterations;
    rep["final_grad_norm"] = r.final_grad_norm;
    rep["grad_threshold"] = r.grad_threshold;
    rep["converged"] = r.converged;
    rep["status"] = to_string(r.status);
    return rep;
}

inline CommandResult cmd_bary(const io::MatrixSetFile& file, const std::optional<std::string>& mean_flag,
                              const BaryOptions& opts = {})
{
    const MeanDescriptor& sigma = detail::resolve_mean(file, mean_flag);
    const WeightVector w = file.weights_or_uniform();
    Json rec = detail::base_record("bary", file);
    rec["inputs"]["mean"] = sigma.name();
    rec["inputs"]["weights"] = detail::weights_json(w);
    if (!sigma.surjective()) {
        CommandResult res{kUnsupportedMean, rec, file.warnings};
        res.diagnostics.push_back("mean: " + sigma.name() +
                                  " is not supported by bary (its representing function is not onto (0, inf))");
        res.record["result"] = nullptr;
        return res;
    }
    SolverConfig cfg;
    if (opts.tol) {
        if (!(*opts.tol > 0.0)) {
            throw io::ValidationError("tol: must be positive");
        }
        cfg.grad_tol = *opts.tol;
    }
    if (opts.max_iters) {
        if (*opts.max_iters < 0) {
            throw io::ValidationError("max-iters: must be non-negative");
        }
        cfg.max_iters = *opts.max_iters;
    }
    rec["inputs"]["tol"] = cfg.grad_tol;
    rec["inputs"]["max_iters"] = cfg.max_iters;

    const BarycenterProblem problem(sigma, file.matrices, w);
    CommandResult res{kOk, rec, file.warnings};
    SolveReport report = [&] {
        try {
            return solve_barycenter(problem, cfg);
        } catch (const LineSearchStalled& e) {
            res.diagnostics.emplace_back(e.what());
            return e.report();
        }
    }();
    res.record["result"] = io::encode_matrix(report.X, file.complex_encoding);
    res.record["report"] = report_json(report);
    if (is_geometric(sigma)) {
        const PDMatrix closed = geometric_closed_form(file.matrices, w);
        res.record["report"]["closed_form_residual"] =
            frobenius_norm(CMatrix(report.X.matrix() - closed.matrix()));
    }
    if (!report.converged) {
        res.exit_code = kNotConverged;
        res.diagnostics.push_back("bary: solver did not converge (" + std::string(to_string(report.status)) + ")");
    }
    return res;
}

struct GeodesicOptions {
    std::string family = "harmonic";
    std::string metric = "inverse";
    int samples = 5;
};

inline PathFamily parse_family(const std::string& s)
{
    if (s == "arithmetic") {
        return PathFamily::arithmetic;
    }
    if (s == "geometric") {
        return PathFamily::geometric;
    }
    if (s == "harmonic") {
        return PathFamily::harmonic;
    }
    throw io::ValidationError("family: unknown path family '" + s + "' (expected arithmetic, geometric or harmonic)");
}

inline LengthMetric parse_length_metric(const std::string& s)
{
    if (s == "inverse" || s == "inverse_metric") {
        return LengthMetric::inverse;
    }
    if (s == "euclidean") {
        return LengthMetric::euclidean;
    }
    if (s == "riemann_trace" || s == "riemann") {
        return LengthMetric::riemann_trace;
    }
    throw io::ValidationError("metric: unknown length metric '" + s +
                              "' (expected inverse, euclidean or riemann_trace)");
}

inline CommandResult cmd_geodesic(const io::MatrixSetFile& file, const GeodesicOptions& opts = {})
{
    detail::require_count(file, 2);
    const PathFamily family = parse_family(opts.family);
    const LengthMetric metric = parse_length_metric(opts.metric);
    if (opts.samples < 1) {
        throw io::ValidationError("samples: must be at least 1");
    }
    const PDPath path(file.matrices[0], file.matrices[1], family);
    std::vector<double> ts;
    for (int k = 1; k <= opts.samples; ++k) {
        ts.push_back(static_cast<double>(k) / (opts.samples + 1));
    }
    Json rec = detail::base_record("geodesic", file);
    rec["inputs"]["family"] = to_string(family);
    rec["inputs"]["metric"] = to_string(metric);
    rec["inputs"]["samples"] = opts.samples;
    Json result;
    result["length"] = arc_length(path, 16, metric);
    result["distance"] = geodesic_distance(file.matrices[0], file.matrices[1], metric);
    result["ts"] = Json(ts);
    result["speeds"] = Json(speed_profile(path, ts, metric));
    rec["result"] = std::move(result);
    return {kOk, rec, file.warnings};
}

// Invariant check suites -------------------------------------------------------

struct CheckOutcome {
    std::string name;
    std::string status;  ///< "pass", "fail" or "not-applicable"
    double residual = 0.0;
    double tolerance = 0.0;
    std::string note;
};

namespace detail {

class CheckLog {
public:
    void measure(std::string name, double residual, double tolerance, std::string note = {})
    {
        const bool ok = std::isfinite(residual) && residual <= tolerance;
        outcomes_.push_back({std::move(name), ok ? "pass" : "fail", residual, tolerance, std::move(note)});
    }

    void skip(std::string name, std::string why)
    {
        outcomes_.push_back({std::move(name), "not-applicable", 0.0, 0.0, std::move(why)});
    }

    /// Runs fn; library errors count as failures of the named check.
    void guarded(const std::string& name, const std::function<void()>& fn)
    {
        try {
            fn();
        } catch (const std::exception& e) {
            outcomes_.push_back({name, "fail", kInf, 0.0, e.what()});
        }
    }

    [[nodiscard]] const std::vector<CheckOutcome>& outcomes() const noexcept { return outcomes_; }

private:
    std::vector<CheckOutcome> outcomes_;
};

/// Ordered pairs (i, j), i != j, among the first four matrices; (0, 0) for a single matrix.
inline std::vector<std::pair<std::size_t, std::size_t>> check_pairs(std::size_t m)
{
    std::vector<std::pair<std::size_t, std::size_t>> out;
    const std::size_t k = std::min<std::size_t>(m, 4);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (i != j) {
                out.emplace_back(i, j);
            }
        }
    }
    if (out.empty()) {
        out.emplace_back(0, 0);
    }
    return out;
}

/// |a - b| / max(1, |b|) for divergence values; +inf when exactly one is infinite.
inline double divergence_gap(const DivergenceValue& a, const DivergenceValue& b)
{
    if (a.finite() != b.finite()) {
        return kInf;
    }
    if (!a.finite()) {
        return 0.0;
    }
    return std::abs(a.value() - b.value()) / std::max(1.0, std::abs(b.value()));
}

inline void divergence_suite(CheckLog& log, const MeanDescriptor& sigma, const std::vector<PDMatrix>& mats,
                             random::Engine& rng)
{
    const auto pairs = check_pairs(mats.size());

    log.guarded("divergence.nonnegativity", [&] {
        double worst = 0.0;
        for (const auto& a : mats) {
            worst = std::max(worst, phi(sigma, a, a).as_double());
        }
        for (const auto& [i, j] : pairs) {
            const DivergenceValue v = phi(sigma, mats[i], mats[j]);
            if (v.finite()) {
                worst = std::max(worst, -v.value());
            }
        }
        log.measure("divergence.nonnegativity", worst, 1e-12, "max of phi(A,A) and -phi(A,B)");
    });

    log.guarded("divergence.definiteness", [&] {
        double violations = 0.0;
        for (const auto& [i, j] : pairs) {
            if (relative_difference(mats[i], mats[j]) > 1e-8 && !(phi(sigma, mats[i], mats[j]).as_double() > 0.0)) {
                violations += 1.0;
            }
        }
        log.measure("divergence.definiteness", violations, 0.0, "pairs A != B with phi(A,B) = 0");
    });

    log.guarded("divergence.gradient_at_diagonal", [&] {
        double worst = 0.0;
        for (const auto& a : mats) {
            const double g = frobenius_norm(grad_Q(sigma, {a}, WeightVector({1.0}), a));
            worst = std::max(worst, g / std::max(1.0, frobenius_norm(inverse(a).hermitian())));
        }
        log.measure("divergence.gradient_at_diagonal", worst, 1e-8);
    });

    log.guarded("divergence.second_derivative", [&] {
        double worst = 0.0;
        const double t = 1e-4;
        for (const auto& a : mats) {
            const HermitianMatrix y = random::unit_hermitian(a.dim(), rng);
            const HermitianMatrix scaled = (0.1 * a.min_eigenvalue()) * y;
            const PDMatrix plus(HermitianMatrix(CMatrix(a.matrix() + t * scaled.matrix())));
            const PDMatrix minus(HermitianMatrix(CMatrix(a.matrix() - t * scaled.matrix())));
            const double fd = (phi(sigma, a, plus).value() + phi(sigma, a, minus).value()) / (t * t);
            const HermitianMatrix z = congruence(inv_sqrt(a).matrix(), scaled);
            const double exact = 2.0 * trace_inner(z, z);
            worst = std::max(worst, std::abs(fd - exact) / exact);
        }
        log.measure("divergence.second_derivative", worst, 1e-4, "relative error against 2 tr(A^-1/2 Y A^-1/2)^2");
    });

    log.guarded("divergence.inversion_identity", [&] {
        double worst = 0.0;
        for (const auto& [i, j] : pairs) {
            const DivergenceValue lhs = phi(sigma, inverse(mats[i]), inverse(mats[j]));
            worst = std::max(worst, divergence_gap(lhs, phi(sigma, mats[j], mats[i])));
        }
        log.measure("divergence.inversion_identity", worst, 1e-8);
    });

    log.guarded("divergence.congruence_invariance", [&] {
        double worst = 0.0;
        for (const auto& [i, j] : pairs) {
            const CMatrix t = random::invertible(mats[i].dim(), rng);
            const DivergenceValue lhs = phi(sigma, congruence(t, mats[i]), congruence(t, mats[j]));
            worst = std::max(worst, divergence_gap(lhs, phi(sigma, mats[i], mats[j])));
        }
        log.measure("divergence.congruence_invariance", worst, 1e-8);
    });

    if (is_geometric(sigma)) {
        log.guarded("divergence.symmetry", [&] {
            double worst = 0.0;
            for (const auto& [i, j] : pairs) {
                worst = std::max(worst, divergence_gap(phi(sigma, mats[i], mats[j]), phi(sigma, mats[j], mats[i])));
            }
            log.measure("divergence.symmetry", worst, 1e-9);
        });
    } else {
        log.skip("divergence.symmetry", "not-applicable (asymmetric mean)");
    }

    log.guarded("divergence.in_betweenness", [&] {
        double worst = -kInf;
        for (const auto& [i, j] : pairs) {
            const DivergenceValue outer = phi(sigma, mats[i], mats[j]);
            for (const auto& tau : builtin_means()) {
                const DivergenceValue inner = phi(sigma, mats[i], mean_apply(tau, mats[i], mats[j]));
                if (!outer.finite()) {
                    continue;
                }
                worst = std::max(worst, inner.as_double() - outer.value());
            }
        }
        log.measure("divergence.in_betweenness", std::max(worst, 0.0), 1e-12,
                    "max of phi(A, A tau B) - phi(A, B) over registered tau");
    });
}

inline void barycenter_suite(CheckLog& log, const MeanDescriptor& sigma, const std::vector<PDMatrix>& mats,
                             const WeightVector& w, random::Engine& rng)
{
    const char* names[] = {"barycenter.converged",      "barycenter.critical_point",
                           "barycenter.harmonic_lower_bound", "barycenter.idempotency",
                           "barycenter.homogeneity",   "barycenter.permutation",
                           "barycenter.congruence",    "barycenter.closed_form",
                           "barycenter.two_matrix_mean"};
    if (!sigma.surjective()) {
        for (const char* n : names) {
            log.skip(n, "not-applicable (mean is not surjective)");
        }
        return;
    }
    SolverConfig cfg;
    cfg.init = InitStrategy::arithmetic;
    auto solve = [&](const std::vector<PDMatrix>& as, const WeightVector& ws) {
        return solve_barycenter(BarycenterProblem(sigma, as, ws), cfg);
    };

    std::optional<SolveReport> base;
    log.guarded("barycenter.converged", [&] {
        base = solve(mats, w);
        log.measure("barycenter.converged", base->converged ? 0.0 : 1.0, 0.0,
                    "iterations: " + std::to_string(base->iterations));
    });
    if (!base) {
        return;
    }
    const PDMatrix& x = base->X;
    const BarycenterProblem problem(sigma, mats, w);

    log.guarded("barycenter.critical_point", [&] {
        log.measure("barycenter.critical_point", critical_point_residual(problem, x), base->grad_threshold);
    });

    log.guarded("barycenter.harmonic_lower_bound", [&] {
        const HermitianMatrix gap = x.hermitian() - weighted_harmonic_mean(mats, w).hermitian();
        log.measure("barycenter.harmonic_lower_bound", std::max(0.0, -eigensystem(gap).eigenvalues(0)), 1e-9,
                    "negative part of lambda_min(bc - H)");
    });

    log.guarded("barycenter.idempotency", [&] {
        const std::vector<PDMatrix> same(mats.size(), mats.front());
        log.measure("barycenter.idempotency", relative_difference(solve(same, w).X, mats.front()), 1e-7);
    });

    log.guarded("barycenter.homogeneity", [&] {
        std::vector<PDMatrix> scaled;
        for (const auto& a : mats) {
            scaled.emplace_back(HermitianMatrix(CMatrix(2.0 * a.matrix())));
        }
        log.measure("barycenter.homogeneity",
                    relative_difference(solve(scaled, w).X, HermitianMatrix(CMatrix(2.0 * x.matrix()))), 1e-7);
    });

    log.guarded("barycenter.permutation", [&] {
        const std::vector<PDMatrix> rev(mats.rbegin(), mats.rend());
        std::vector<double> wr(w.values().rbegin(), w.values().rend());
        log.measure("barycenter.permutation", relative_difference(solve(rev, WeightVector(wr)).X, x), 1e-7);
    });

    log.guarded("barycenter.congruence", [&] {
        const CMatrix t = random::invertible(x.dim(), rng);
        std::vector<PDMatrix> moved;
        for (const auto& a : mats) {
            moved.push_back(congruence(t, a));
        }
        log.measure("barycenter.congruence", relative_difference(solve(moved, w).X, congruence(t, x.hermitian())),
                    1e-7);
    });

    if (is_geometric(sigma)) {
        log.guarded("barycenter.closed_form", [&] {
            log.measure("barycenter.closed_form", relative_difference(x, geometric_closed_form(mats, w)), 1e-7);
        });
    } else {
        log.skip("barycenter.closed_form", "not-applicable (closed form exists for geometric only)");
    }

    if (mats.size() == 2 && std::abs(w[0] - w[1]) <= 1e-12) {
        log.guarded("barycenter.two_matrix_mean", [&] {
            log.measure("barycenter.two_matrix_mean", relative_difference(x, mean_apply(sigma, mats[0], mats[1])),
                        1e-7);
        });
    } else {
        log.skip("barycenter.two_matrix_mean", "not-applicable (needs two matrices with equal weights)");
    }
}

inline void geodesic_suite(CheckLog& log, const std::vector<PDMatrix>& mats)
{
    const PDMatrix& a = mats.front();
    const PDMatrix& b = mats.size() > 1 ? mats[1] : mats.front();
    const double delta = geodesic_distance_inverse_metric(a, b);
    const double scale = std::max(1.0, delta);

    log.guarded("geodesic.harmonic_length", [&] {
        const double len = arc_length_inverse_metric(PDPath(a, b, PathFamily::harmonic));
        log.measure("geodesic.harmonic_length", std::abs(len - delta) / scale, 1e-5);
    });

    log.guarded("geodesic.constant_speed", [&] {
        const auto speeds = speed_profile(PDPath(a, b, PathFamily::harmonic), {0.1, 0.3, 0.5, 0.7, 0.9});
        double worst = 0.0;
        for (double s : speeds) {
            worst = std::max(worst, std::abs(s - delta) / scale);
        }
        log.measure("geodesic.constant_speed", worst, 1e-5);
    });

    log.guarded("geodesic.lower_bound", [&] {
        double worst = 0.0;
        for (PathFamily f : {PathFamily::arithmetic, PathFamily::geometric}) {
            const double len = arc_length_inverse_metric(PDPath(a, b, f));
            worst = std::max(worst, (delta - len) / scale);
        }
        log.measure("geodesic.lower_bound", std::max(0.0, worst), 1e-5, "max of delta - length over competitors");
    });

    log.guarded("geodesic.harmonic_identity", [&] {
        double worst = 0.0;
        for (double t : {0.25, 0.5, 0.75}) {
            worst = std::max(worst, relative_difference(harmonic_geodesic_point(a, b, t),
                                                        weighted_two_means(WeightedKind::harmonic, a, b, t)));
        }
        log.measure("geodesic.harmonic_identity", worst, 1e-10);
    });

    for (CenterMetric m : {CenterMetric::euclidean, CenterMetric::riemann_trace, CenterMetric::s_divergence,
                           CenterMetric::inverse_metric}) {
        const std::string name = std::string("geodesic.stationarity.") + to_string(m);
        log.guarded(name, [&] { log.measure(name, center_stationarity_check(m, a, b), 1e-5); });
    }
}

} // namespace detail

inline CommandResult cmd_check(const io::MatrixSetFile& file, const std::optional<std::string>& mean_flag,
                               const std::string& suite, std::uint64_t seed)
{
    if (suite != "divergence" && suite != "barycenter" && suite != "geodesic" && suite != "all") {
        throw io::ValidationError("suite: unknown suite '" + suite +
                                  "' (expected divergence, barycenter, geodesic or all)");
    }
    const bool needs_mean = suite != "geodesic";
    const MeanDescriptor* sigma = needs_mean ? &detail::resolve_mean(file, mean_flag) : nullptr;

    random::Engine rng(seed);
    detail::CheckLog log;
    if (suite == "divergence" || suite == "all") {
        detail::divergence_suite(log, *sigma, file.matrices, rng);
    }
    if (suite == "barycenter" || suite == "all") {
        detail::barycenter_suite(log, *sigma, file.matrices, file.weights_or_uniform(), rng);
    }
    if (suite == "geodesic" || suite == "all") {
        detail::geodesic_suite(log, file.matrices);
    }

    Json rec = detail::base_record("check", file);
    if (sigma != nullptr) {
        rec["inputs"]["mean"] = sigma->name();
    }
    rec["inputs"]["suite"] = suite;
    rec["inputs"]["seed"] = seed;
    Json checks = Json::array();
    CommandResult res{kOk, Json(), file.warnings};
    for (const auto& o : log.outcomes()) {
        Json c;
        c["name"] = o.name;
        c["status"] = o.status;
        if (o.status != "not-applicable") {
            c["residual"] = o.residual;
            c["tolerance"] = o.tolerance;
        }
        if (!o.note.empty()) {
            c["note"] = o.note;
        }
        checks.push_back(std::move(c));
        if (o.status == "fail" && res.exit_code == kOk) {
            res.exit_code = kCheckFailed;
            res.diagnostics.push_back("check failed: " + o.name);
        }
    }
    rec["result"] = std::move(checks);
    res.record = std::move(rec);
    return res;
}

/// Seed for randomized checks: OPMEAN_SEED when set and numeric, else 42.
inline std::uint64_t seed_from_env()
{
    if (const char* s = std::getenv("OPMEAN_SEED")) {
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
        }
    }
    return 42;
}

/// Parses argv, runs one command, writes the record to out and diagnostics to err.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Symmetric Kubo-Ando means, their divergences and weighted barycenters"};
    app.require_subcommand(1);

    std::string input;
    std::optional<std::string> mean;
    std::optional<double> alpha;
    BaryOptions bary_opts;
    GeodesicOptions geo_opts;
    std::string suite = "all";

    auto add_input = [&](CLI::App* sub) { sub->add_option("--input", input, "Matrix set JSON file")->required(); };

    CLI::App* mean_cmd = app.add_subcommand("mean", "A sigma B, or the alpha-weighted mean");
    add_input(mean_cmd);
    mean_cmd->add_option("--mean", mean, "arithmetic | harmonic | geometric | logarithmic");
    mean_cmd->add_option("--alpha", alpha, "Weight on the second matrix (arithmetic, geometric, harmonic)");

    CLI::App* div_cmd = app.add_subcommand("divergence", "phi_sigma(A, B)");
    add_input(div_cmd);
    div_cmd->add_option("--mean", mean, "arithmetic | harmonic | geometric | logarithmic");

    CLI::App* bary_cmd = app.add_subcommand("bary", "Weighted barycenter of the matrix set");
    add_input(bary_cmd);
    bary_cmd->add_option("--mean", mean, "geometric | logarithmic");
    bary_cmd->add_option("--tol", bary_opts.tol, "Gradient tolerance (scaled by sum w_j ||A_j^-1||_F)");
    bary_cmd->add_option("--max-iters", bary_opts.max_iters, "Iteration limit");

    CLI::App* geo_cmd = app.add_subcommand("geodesic", "Arc length, distance and speed profile of a path");
    add_input(geo_cmd);
    geo_cmd->add_option("--family", geo_opts.family, "arithmetic | geometric | harmonic");
    geo_cmd->add_option("--metric", geo_opts.metric, "inverse | euclidean | riemann_trace");
    geo_cmd->add_option("--samples", geo_opts.samples, "Number of speed samples in (0, 1)");

    CLI::App* check_cmd = app.add_subcommand("check", "Run invariant suites on the matrix set");
    add_input(check_cmd);
    check_cmd->add_option("--mean", mean, "arithmetic | harmonic | geometric | logarithmic");
    check_cmd->add_option("--suite", suite, "divergence | barycenter | geodesic | all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    }

    CommandResult res;
    try {
        const io::MatrixSetFile file = io::load_matrix_set(input);
        if (mean_cmd->parsed()) {
            res = cmd_mean(file, mean, alpha);
        } else if (div_cmd->parsed()) {
            res = cmd_divergence(file, mean);
        } else if (bary_cmd->parsed()) {
            res = cmd_bary(file, mean, bary_opts);
        } else if (geo_cmd->parsed()) {
            res = cmd_geodesic(file, geo_opts);
        } else {
            res = cmd_check(file, mean, suite, seed_from_env());
        }
    } catch (const io::ValidationError& e) {
        res = detail::validation_failure(e.what());
    } catch (const Error& e) {
        res = detail::validation_failure(e.what());
    }

    for (const auto& d : res.diagnostics) {
        err << (res.exit_code == kOk ? "warning: " : "error: ") << d << "\n";
    }
    if (!res.record.is_null()) {
        out << io::dump_record(res.record);
    }
    return res.exit_code;
}

} // namespace opmean::cli
