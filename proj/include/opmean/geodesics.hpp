#pragma once

// Paths on the positive definite cone and their lengths under
//   ds = ||X^{-1} dX X^{-1}||_F            (inverse metric)
//   ds = ||dX||_F                          (Euclidean)
//   ds = ||X^{-1/2} dX X^{-1/2}||_F        (Riemannian trace metric)
//
// Under the inverse metric the weighted harmonic means t -> A !_t B form the
// constant-speed geodesic, and the distance is ||B^{-1} - A^{-1}||_F.

#include "opmean/divergence.hpp"
#include "opmean/errors.hpp"
#include "opmean/matcore.hpp"
#include "opmean/means.hpp"
#include "opmean/random.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace opmean {

enum class PathFamily { arithmetic, geometric, harmonic };

inline const char* to_string(PathFamily f)
{
    switch (f) {
    case PathFamily::arithmetic:
        return "arithmetic";
    case PathFamily::geometric:
        return "geometric";
    case PathFamily::harmonic:
        return "harmonic";
    }
    return "unknown";
}

using PathSampler = std::function<PDMatrix(double)>;

/// Smooth path t in [0, 1] -> X(t) with X(0) = A and X(1) = B.
class PDPath {
public:
    /// Weighted-mean path: (1-t)A + tB, A #_t B or A !_t B.
    PDPath(PDMatrix a, PDMatrix b, PathFamily family)
        : a_(std::move(a)), b_(std::move(b)), family_(family)
    {
        detail::require_same_dim(a_.dim(), b_.dim(), "PDPath");
        WeightedKind kind = WeightedKind::arithmetic;
        if (family == PathFamily::geometric) {
            kind = WeightedKind::geometric;
        } else if (family == PathFamily::harmonic) {
            kind = WeightedKind::harmonic;
        }
        sampler_ = [a = a_, b = b_, kind](double t) { return weighted_two_means(kind, a, b, t); };
    }

    /// User-supplied path; the sampler must be defined on [0, 1].
    PDPath(PDMatrix a, PDMatrix b, PathSampler sampler)
        : a_(std::move(a)), b_(std::move(b)), sampler_(std::move(sampler))
    {
        detail::require_same_dim(a_.dim(), b_.dim(), "PDPath");
    }

    [[nodiscard]] const PDMatrix& start() const noexcept { return a_; }
    [[nodiscard]] const PDMatrix& end() const noexcept { return b_; }
    [[nodiscard]] std::optional<PathFamily> family() const noexcept { return family_; }

    [[nodiscard]] PDMatrix at(double t) const { return sampler_(t); }

private:
    PDMatrix a_;
    PDMatrix b_;
    std::optional<PathFamily> family_;
    PathSampler sampler_;
};

/// A^{1/2} [(1-t) I + t C]^{-1} A^{1/2} with C = A^{1/2} B^{-1} A^{1/2}.
inline PDMatrix harmonic_geodesic_point(const PDMatrix& a, const PDMatrix& b, double t)
{
    detail::require_same_dim(a.dim(), b.dim(), "harmonic_geodesic_point");
    const PDMatrix root = sqrt(a);
    const PDMatrix c = congruence(root.matrix(), inverse(b));
    const Index n = a.dim();
    const CMatrix inner = (1.0 - t) * CMatrix::Identity(n, n) + t * c.matrix();
    return congruence(root.matrix(), inverse(PDMatrix(inner)));
}

/// P(t) gamma(t) P(t)* with P(t) = I + eps sin(pi t) Y and gamma the harmonic geodesic;
/// shares both endpoints with the geodesic.
inline PDPath perturbed_harmonic_path(const PDMatrix& a, const PDMatrix& b, const HermitianMatrix& y,
                                      double eps = 0.05)
{
    detail::require_same_dim(a.dim(), y.dim(), "perturbed_harmonic_path");
    PathSampler s = [a, b, y, eps](double t) {
        const Index n = a.dim();
        const CMatrix p = CMatrix::Identity(n, n) + eps * std::sin(std::numbers::pi * t) * y.matrix();
        return congruence(p, weighted_two_means(WeightedKind::harmonic, a, b, t));
    };
    return PDPath(a, b, std::move(s));
}

enum class LengthMetric { inverse, euclidean, riemann_trace };

inline const char* to_string(LengthMetric m)
{
    switch (m) {
    case LengthMetric::inverse:
        return "inverse";
    case LengthMetric::euclidean:
        return "euclidean";
    case LengthMetric::riemann_trace:
        return "riemann_trace";
    }
    return "unknown";
}

inline constexpr double kPathDerivativeStep = 1e-6;

/// X'(t) by central differences; second-order one-sided differences within h of an endpoint.
inline HermitianMatrix path_derivative(const PDPath& path, double t, double h = kPathDerivativeStep)
{
    CMatrix d;
    if (t - h < 0.0) {
        d = (-3.0 * path.at(t).matrix() + 4.0 * path.at(t + h).matrix() - path.at(t + 2 * h).matrix()) /
            (2 * h);
    } else if (t + h > 1.0) {
        d = (3.0 * path.at(t).matrix() - 4.0 * path.at(t - h).matrix() + path.at(t - 2 * h).matrix()) /
            (2 * h);
    } else {
        d = (path.at(t + h).matrix() - path.at(t - h).matrix()) / (2 * h);
    }
    return HermitianMatrix(d);
}

/// Metric speed of the path at t.
inline double path_speed(const PDPath& path, double t, LengthMetric metric = LengthMetric::inverse)
{
    const HermitianMatrix dx = path_derivative(path, t);
    switch (metric) {
    case LengthMetric::euclidean:
        return frobenius_norm(dx);
    case LengthMetric::riemann_trace:
        return frobenius_norm(congruence(inv_sqrt(path.at(t)).matrix(), dx));
    case LengthMetric::inverse:
        break;
    }
    return frobenius_norm(congruence(inverse(path.at(t)).matrix(), dx));
}

inline std::vector<double> speed_profile(const PDPath& path, const std::vector<double>& ts,
                                         LengthMetric metric = LengthMetric::inverse)
{
    std::vector<double> out;
    out.reserve(ts.size());
    for (double t : ts) {
        out.push_back(path_speed(path, t, metric));
    }
    return out;
}

/// Composite Simpson approximation of int_0^1 speed(t) dt, doubling the panel
/// count until successive values differ by less than 1e-7 max(1, L).
inline double arc_length(const PDPath& path, int n_panels = 16, LengthMetric metric = LengthMetric::inverse)
{
    constexpr int kMaxPanels = 1 << 16;
    if (n_panels < 8) {
        throw Error("arc_length: n_panels must be at least 8");
    }
    if (n_panels % 2 != 0) {
        ++n_panels;
    }
    std::vector<double> values(static_cast<std::size_t>(n_panels) + 1);
    for (int i = 0; i <= n_panels; ++i) {
        values[static_cast<std::size_t>(i)] = path_speed(path, static_cast<double>(i) / n_panels, metric);
    }
    auto simpson = [](const std::vector<double>& v) {
        const std::size_t n = v.size() - 1;
        double s = v.front() + v.back();
        for (std::size_t i = 1; i < n; ++i) {
            s += (i % 2 == 1 ? 4.0 : 2.0) * v[i];
        }
        return s / (3.0 * static_cast<double>(n));
    };
    double previous = simpson(values);
    while (true) {
        const int n = 2 * n_panels;
        if (n > kMaxPanels) {
            throw QuadratureStalled("arc_length: no convergence with " + std::to_string(kMaxPanels) +
                                    " panels");
        }
        std::vector<double> refined(static_cast<std::size_t>(n) + 1);
        for (int i = 0; i <= n; ++i) {
            refined[static_cast<std::size_t>(i)] =
                i % 2 == 0 ? values[static_cast<std::size_t>(i / 2)]
                           : path_speed(path, static_cast<double>(i) / n, metric);
        }
        const double current = simpson(refined);
        if (std::abs(current - previous) < 1e-7 * std::max(1.0, std::abs(current))) {
            return current;
        }
        previous = current;
        values = std::move(refined);
        n_panels = n;
    }
}

inline double arc_length_inverse_metric(const PDPath& path, int n_panels = 16)
{
    return arc_length(path, n_panels, LengthMetric::inverse);
}

/// ||B^{-1} - A^{-1}||_F.
inline double geodesic_distance_inverse_metric(const PDMatrix& a, const PDMatrix& b)
{
    detail::require_same_dim(a.dim(), b.dim(), "geodesic_distance_inverse_metric");
    return frobenius_norm(CMatrix(inverse(b).matrix() - inverse(a).matrix()));
}

/// Geodesic distance for each length metric.
inline double geodesic_distance(const PDMatrix& a, const PDMatrix& b, LengthMetric metric)
{
    switch (metric) {
    case LengthMetric::euclidean:
        detail::require_same_dim(a.dim(), b.dim(), "geodesic_distance");
        return frobenius_norm(CMatrix(b.matrix() - a.matrix()));
    case LengthMetric::riemann_trace:
        return d_riemann(a, b);
    case LengthMetric::inverse:
        break;
    }
    return geodesic_distance_inverse_metric(a, b);
}

// Divergence centers of two matrices ------------------------------------------

enum class CenterMetric { euclidean, riemann_trace, s_divergence, inverse_metric };

inline const char* to_string(CenterMetric m)
{
    switch (m) {
    case CenterMetric::euclidean:
        return "euclidean";
    case CenterMetric::riemann_trace:
        return "riemann_trace";
    case CenterMetric::s_divergence:
        return "s_divergence";
    case CenterMetric::inverse_metric:
        return "inverse_metric";
    }
    return "unknown";
}

/// d^2(X, Y) for the given metric.
inline double squared_distance(CenterMetric metric, const PDMatrix& x, const PDMatrix& y)
{
    switch (metric) {
    case CenterMetric::euclidean: {
        detail::require_same_dim(x.dim(), y.dim(), "squared_distance");
        return CMatrix(x.matrix() - y.matrix()).squaredNorm();
    }
    case CenterMetric::riemann_trace: {
        const double d = d_riemann(x, y);
        return d * d;
    }
    case CenterMetric::s_divergence:
        return d_sdiv_squared(x, y);
    case CenterMetric::inverse_metric: {
        const double d = geodesic_distance_inverse_metric(x, y);
        return d * d;
    }
    }
    return 0.0;
}

/// The claimed minimizer of X -> (d^2(A,X) + d^2(B,X))/2: A nabla B, A # B, A # B, A ! B.
inline PDMatrix metric_center(CenterMetric metric, const PDMatrix& a, const PDMatrix& b)
{
    switch (metric) {
    case CenterMetric::euclidean:
        return weighted_two_means(WeightedKind::arithmetic, a, b, 0.5);
    case CenterMetric::riemann_trace:
    case CenterMetric::s_divergence:
        return weighted_two_means(WeightedKind::geometric, a, b, 0.5);
    case CenterMetric::inverse_metric:
        break;
    }
    return weighted_two_means(WeightedKind::harmonic, a, b, 0.5);
}

/// Max over 20 seeded random unit Hermitian directions Y of the central
/// difference of X -> (d^2(A,X) + d^2(B,X))/2 at the metric's center. Small
/// values certify stationarity.
inline double center_stationarity_check(CenterMetric metric, const PDMatrix& a, const PDMatrix& b,
                                        std::uint64_t seed = 42)
{
    detail::require_same_dim(a.dim(), b.dim(), "center_stationarity_check");
    const PDMatrix m = metric_center(metric, a, b);
    const double h = 1e-5 * m.min_eigenvalue();
    auto loss = [&](const CMatrix& x) {
        const PDMatrix px(x);
        return 0.5 * (squared_distance(metric, a, px) + squared_distance(metric, b, px));
    };
    random::Engine rng(seed);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const HermitianMatrix y = random::unit_hermitian(a.dim(), rng);
        const double d = (loss(m.matrix() + h * y.matrix()) - loss(m.matrix() - h * y.matrix())) / (2 * h);
        worst = std::max(worst, std::abs(d));
    }
    return worst;
}

} // namespace opmean
