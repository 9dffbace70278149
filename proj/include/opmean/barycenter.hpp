#pragma once

// Weighted multivariate barycenters bc(sigma, {A_j}, w) = argmin_X sum_j w_j phi_sigma(A_j, X)
// for symmetric means whose representing function maps (0, inf) onto (0, inf).
//
// The solver is a gradient method on the positive definite cone: the search
// direction is the Riemannian gradient X G X of the affine-invariant metric
// (G the trace-inner-product gradient), the trial step length is the
// Barzilai-Borwein estimate, and Armijo backtracking enforces monotone decrease.
// Trial points that fail the positive definiteness test are rejected by
// shrinking the step.

#include "opmean/divergence.hpp"
#include "opmean/errors.hpp"
#include "opmean/matcore.hpp"
#include "opmean/means.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace opmean {

class BarycenterProblem {
public:
    BarycenterProblem(MeanDescriptor sigma, std::vector<PDMatrix> mats, WeightVector w)
        : loss_(checked(std::move(sigma)), std::move(mats), std::move(w))
    {
    }

    [[nodiscard]] const MeanDescriptor& mean() const noexcept { return loss_.mean(); }
    [[nodiscard]] const std::vector<PDMatrix>& matrices() const noexcept { return loss_.matrices(); }
    [[nodiscard]] const WeightVector& weights() const noexcept { return loss_.weights(); }
    [[nodiscard]] const WeightedLoss& loss() const noexcept { return loss_; }
    [[nodiscard]] std::size_t size() const noexcept { return loss_.matrices().size(); }

private:
    static MeanDescriptor checked(MeanDescriptor sigma)
    {
        if (!sigma.surjective()) {
            throw NotSurjective("barycenter: the representing function of " + sigma.name() +
                                " does not map onto (0, inf)");
        }
        return sigma;
    }

    WeightedLoss loss_;
};

enum class InitStrategy { arithmetic, closed_form_when_geometric, user };

struct SolverConfig {
    double grad_tol = 1e-10;  ///< multiplied by sum_j w_j ||A_j^{-1}||_F
    int max_iters = 500;
    double armijo_c = 1e-4;
    double backtrack_factor = 0.5;
    InitStrategy init = InitStrategy::closed_form_when_geometric;
    std::optional<PDMatrix> user_init;

    void validate() const
    {
        if (!(armijo_c > 0.0 && armijo_c < 1.0)) {
            throw Error("SolverConfig: armijo_c must lie in (0, 1)");
        }
        if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
            throw Error("SolverConfig: backtrack_factor must lie in (0, 1)");
        }
        if (!(grad_tol > 0.0)) {
            throw Error("SolverConfig: grad_tol must be positive");
        }
        if (max_iters < 0) {
            throw Error("SolverConfig: max_iters must be non-negative");
        }
        if (init == InitStrategy::user && !user_init) {
            throw Error("SolverConfig: init = user requires user_init");
        }
    }
};

enum class SolveStatus { converged, max_iters_exceeded, line_search_stalled };

inline const char* to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::converged:
        return "converged";
    case SolveStatus::max_iters_exceeded:
        return "max_iters_exceeded";
    case SolveStatus::line_search_stalled:
        return "line_search_stalled";
    }
    return "unknown";
}

struct SolveReport {
    PDMatrix X;
    int iterations = 0;
    double final_grad_norm = 0.0;
    double grad_threshold = 0.0;  ///< grad_tol times the stopping scale
    bool converged = false;
    SolveStatus status = SolveStatus::converged;
    std::vector<double> loss_trace;
};

/// Step underflow in the line search. Carries the last iterate.
class LineSearchStalled : public Error {
public:
    LineSearchStalled(const std::string& what, SolveReport report)
        : Error(what), report_(std::move(report))
    {
    }

    [[nodiscard]] const SolveReport& report() const noexcept { return report_; }

private:
    SolveReport report_;
};

/// sum_j w_j A_j.
inline PDMatrix weighted_arithmetic_mean(const std::vector<PDMatrix>& mats, const WeightVector& w)
{
    return PDMatrix(weighted_sum(mats, w));
}

/// (sum_j w_j A_j^{-1})^{-1}.
inline PDMatrix weighted_harmonic_mean(const std::vector<PDMatrix>& mats, const WeightVector& w)
{
    std::vector<PDMatrix> inverses;
    inverses.reserve(mats.size());
    for (const auto& a : mats) {
        inverses.push_back(inverse(a));
    }
    return inverse(PDMatrix(weighted_sum(inverses, w)));
}

/// Closed-form barycenter for the geometric mean: (sum w_j A_j^{-1})^{-1} # (sum w_j A_j).
inline PDMatrix geometric_closed_form(const std::vector<PDMatrix>& mats, const WeightVector& w)
{
    if (mats.empty()) {
        throw DimensionMismatch("geometric_closed_form: empty matrix list");
    }
    if (mats.size() != w.size()) {
        throw WeightError("geometric_closed_form: weight count does not match matrix count");
    }
    for (const auto& a : mats) {
        detail::require_same_dim(a.dim(), mats.front().dim(), "geometric_closed_form");
    }
    return weighted_two_means(WeightedKind::geometric, weighted_harmonic_mean(mats, w),
                              weighted_arithmetic_mean(mats, w), 0.5);
}

/// (A !_alpha B) # (A nabla_alpha B), the geometric-mean barycenter of {A, B} with weights {1-alpha, alpha}.
inline PDMatrix two_point_geometric_weighted(const PDMatrix& a, const PDMatrix& b, double alpha)
{
    const PDMatrix h = weighted_two_means(WeightedKind::harmonic, a, b, alpha);
    const PDMatrix m = weighted_two_means(WeightedKind::arithmetic, a, b, alpha);
    return weighted_two_means(WeightedKind::geometric, h, m, 0.5);
}

/// Representing function of the mean (A !_alpha B) # (A nabla_alpha B).
inline double two_point_geometric_representing(double x, double alpha)
{
    return std::sqrt(x * (1.0 - alpha + alpha * x) / ((1.0 - alpha) * x + alpha));
}

/// Frobenius norm of the critical-point residual sum_j w_j A_j^{-1/2}(I - f^{-1}(A_j^{-1/2} X A_j^{-1/2})^{-1})A_j^{-1/2}.
inline double critical_point_residual(const BarycenterProblem& p, const PDMatrix& x)
{
    return frobenius_norm(p.loss().gradient(x));
}

/// X >= (sum_j w_j A_j^{-1})^{-1} in the Loewner order, with tolerance 1e-9.
inline bool harmonic_lower_bound_check(const BarycenterProblem& p, const PDMatrix& x)
{
    return loewner_geq(x, weighted_harmonic_mean(p.matrices(), p.weights()), 1e-9);
}

inline SolveReport solve_barycenter(const BarycenterProblem& p, const SolverConfig& cfg = {})
{
    cfg.validate();
    const WeightedLoss& loss = p.loss();
    const double threshold = cfg.grad_tol * loss.inverse_scale();

    if (p.size() == 1) {
        return {p.matrices().front(), 0, 0.0, threshold, true, SolveStatus::converged, {0.0}};
    }

    PDMatrix x = [&] {
        switch (cfg.init) {
        case InitStrategy::user:
            detail::require_same_dim(cfg.user_init->dim(), loss.dim(), "solve_barycenter");
            return *cfg.user_init;
        case InitStrategy::closed_form_when_geometric:
            if (is_geometric(p.mean())) {
                return geometric_closed_form(p.matrices(), p.weights());
            }
            [[fallthrough]];
        case InitStrategy::arithmetic:
            break;
        }
        return weighted_arithmetic_mean(p.matrices(), p.weights());
    }();

    DivergenceValue q0 = loss.value(x);
    if (!q0.finite()) {
        throw DomainError("solve_barycenter: loss is not finite at the initial point");
    }
    double q = q0.value();
    HermitianMatrix g = loss.gradient(x);
    double gnorm = frobenius_norm(g);

    SolveReport report{x, 0, gnorm, threshold, false, SolveStatus::max_iters_exceeded, {q}};

    double step = 1.0;
    for (int k = 0; k < cfg.max_iters; ++k) {
        if (gnorm <= threshold) {
            break;
        }
        const HermitianMatrix dir = congruence(x.matrix(), g);  // X G X
        const double slope = trace_inner(g, dir);
        const double slack = 1e-14 * std::abs(q);

        double s = step;
        std::optional<PDMatrix> next;
        double q_next = 0.0;
        while (true) {
            if (s < 1e-30 * step || s < 1e-300) {
                report.X = x;
                report.iterations = k;
                report.final_grad_norm = gnorm;
                report.status = SolveStatus::line_search_stalled;
                throw LineSearchStalled("solve_barycenter: line search step underflow at iteration " +
                                            std::to_string(k) + " (gradient norm " +
                                            std::to_string(gnorm) + ")",
                                        report);
            }
            try {
                PDMatrix trial(HermitianMatrix(CMatrix(x.matrix() - s * dir.matrix())));
                const DivergenceValue qt = loss.value(trial);
                if (qt.finite() && qt.value() <= q - cfg.armijo_c * s * slope + slack) {
                    next.emplace(std::move(trial));
                    q_next = qt.value();
                    break;
                }
            } catch (const NotPositiveDefinite&) {
                // outside the cone; shrink
            }
            s *= cfg.backtrack_factor;
        }

        const HermitianMatrix g_next = loss.gradient(*next);
        // Barzilai-Borwein length in the affine-invariant metric at the new point.
        const HermitianMatrix ds(CMatrix(next->matrix() - x.matrix()));
        const HermitianMatrix dg = g_next - g;
        const PDMatrix x_inv = inverse(*next);
        const double curvature = trace_inner(ds, dg);
        const double sq = trace_inner(congruence(x_inv.matrix(), ds), ds);
        step = curvature > 0.0 ? std::clamp(sq / curvature, 1e-12, 1e12) : std::min(2.0 * s, 1e12);

        x = std::move(*next);
        q = q_next;
        g = g_next;
        gnorm = frobenius_norm(g);
        report.loss_trace.push_back(q);
        report.iterations = k + 1;
    }

    report.X = x;
    report.final_grad_norm = gnorm;
    report.converged = gnorm <= threshold;
    report.status = report.converged ? SolveStatus::converged : SolveStatus::max_iters_exceeded;
    return report;
}

/// Convenience overload building the problem in place.
inline SolveReport solve_barycenter(const MeanDescriptor& sigma, const std::vector<PDMatrix>& mats,
                                    const WeightVector& w, const SolverConfig& cfg = {})
{
    return solve_barycenter(BarycenterProblem(sigma, mats, w), cfg);
}

} // namespace opmean
