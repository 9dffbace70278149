#pragma once

// Symmetric Kubo-Ando means A sigma B = A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}.
//
// A MeanDescriptor bundles the representing function f with its inverse, the
// convex potential g(x) = int_1^x (1 - 1/f^{-1}(t)) dt, its derivative g', and
// the range of f. Any of f^{-1}, g, g' may be given in closed form; missing
// pieces are synthesized numerically (bracketed root finding for f^{-1},
// adaptive Gauss-Kronrod quadrature for g).

#include "opmean/errors.hpp"
#include "opmean/matcore.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace opmean {

using ScalarFunction = std::function<double(double)>;

namespace detail {

/// Unique x > 0 with f(x) = t for strictly increasing f, found by expanding a
/// geometric bracket from x = 1 and refining with TOMS 748. Returns 0 when the
/// root lies below the smallest representable bracket.
inline double numeric_inverse(const ScalarFunction& f, double t)
{
    if (t == 1.0) {
        return 1.0;
    }
    double lo = 1.0;
    double hi = 1.0;
    if (t > 1.0) {
        hi = 2.0;
        double fhi = f(hi);
        while (fhi < t) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e300) {
                throw RangeError("invert_f: no preimage found for " + std::to_string(t));
            }
            fhi = f(hi);
        }
        if (fhi == t) {
            return hi;
        }
    } else {
        lo = 0.5;
        double flo = f(lo);
        while (flo > t) {
            hi = lo;
            lo *= 0.5;
            if (lo < 1e-300) {
                return 0.0;
            }
            flo = f(lo);
        }
        if (flo == t) {
            return lo;
        }
    }
    auto residual = [&f, t](double x) { return f(x) - t; };
    std::uintmax_t max_iter = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        residual, lo, hi, residual(lo), residual(hi), boost::math::tools::eps_tolerance<double>(52), max_iter);
    return 0.5 * (a + b);
}

/// int_a^b h by adaptive Gauss-Kronrod (31 points), a <= b.
inline double gauss_kronrod(const ScalarFunction& h, double a, double b)
{
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(h, a, b, 12, 1e-12, &err);
}

/// g(x) = int_1^x (1 - 1/f^{-1}(t)) dt for a strictly increasing f with f(1) = 1.
///
/// Near x = 1 the integrand is integrated directly in t. Elsewhere the
/// substitution t = f(s) followed by integration by parts gives
///   g(x) = (1 - 1/y) x - int_0^{ln y} f(e^v) e^{-v} dv,   y = f^{-1}(x),
/// which needs one root solve instead of one per node and stays tractable
/// when 1/f^{-1}(t) grows faster than any power of 1/t as t -> 0.
/// Returns +inf when the value (or y) leaves the double range.
inline double numeric_g(const ScalarFunction& f, const ScalarFunction& f_inv, double x)
{
    if (x == 1.0) {
        return 0.0;
    }
    double val = 0.0;
    if (std::abs(std::log(x)) <= std::log(2.0)) {
        const ScalarFunction gp = [&f_inv](double t) {
            const double y = f_inv(t);
            return (y - 1.0) / y;
        };
        val = x > 1.0 ? gauss_kronrod(gp, 1.0, x) : -gauss_kronrod(gp, x, 1.0);
    } else {
        const double y = f_inv(x);
        if (!(y > 0.0) || !std::isfinite(y)) {
            return kInf;
        }
        const double ly = std::log(y);
        const ScalarFunction integrand = [&f](double v) { return f(std::exp(v)) * std::exp(-v); };
        const double tail = ly > 0.0 ? gauss_kronrod(integrand, 0.0, ly) : -gauss_kronrod(integrand, ly, 0.0);
        val = (y - 1.0) / y * x - tail;
    }
    return std::isfinite(val) ? val : kInf;
}

} // namespace detail

class MeanDescriptor {
public:
    /// Optional closed forms; empty members are synthesized numerically.
    struct ClosedForms {
        ScalarFunction f_inv;
        ScalarFunction g;
        ScalarFunction g_prime;
    };

    MeanDescriptor(std::string name, ScalarFunction f, Interval range, ClosedForms closed = {},
                   bool range_estimated = false)
        : name_(std::move(name)),
          f_(std::move(f)),
          closed_(std::move(closed)),
          range_(range),
          range_estimated_(range_estimated)
    {
    }

    /// Registers a mean from its representing function alone. The range of f is
    /// estimated by probing at 1e-/+128 and 1e-/+256: an end is taken as open when
    /// f is still moving by a clear factor between the two probes (this admits slow
    /// 1/ln x decay). range_estimated() reports this.
    static MeanDescriptor from_function(std::string name, ScalarFunction f)
    {
        const double lo_near = f(1e-128);
        const double lo_far = f(1e-256);
        const double hi_near = f(1e128);
        const double hi_far = f(1e256);
        const bool open_lo = lo_far < 1e-12 || lo_far < 0.9 * lo_near;
        const bool open_hi = hi_far > 1e12 || hi_far > 1.1 * hi_near;
        Interval range{open_lo ? 0.0 : lo_far, open_hi ? kInf : hi_far};
        return MeanDescriptor(std::move(name), std::move(f), range, {}, true);
    }

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] Interval range() const noexcept { return range_; }
    [[nodiscard]] bool surjective() const noexcept { return range_.lo == 0.0 && range_.hi == kInf; }
    [[nodiscard]] bool range_estimated() const noexcept { return range_estimated_; }
    [[nodiscard]] bool has_closed_inverse() const noexcept { return static_cast<bool>(closed_.f_inv); }
    [[nodiscard]] bool has_closed_g() const noexcept { return static_cast<bool>(closed_.g); }

    [[nodiscard]] double f(double x) const { return f_(x); }
    [[nodiscard]] const ScalarFunction& representing_function() const noexcept { return f_; }

    [[nodiscard]] double f_inv(double t) const
    {
        require_in_range(t, "invert_f");
        return closed_.f_inv ? closed_.f_inv(t) : detail::numeric_inverse(f_, t);
    }

    /// g'(t) = 1 - 1/f^{-1}(t).
    [[nodiscard]] double g_prime(double t) const
    {
        require_in_range(t, "g_prime");
        if (closed_.g_prime) {
            return closed_.g_prime(t);
        }
        const double y = f_inv(t);
        return (y - 1.0) / y;
    }

    [[nodiscard]] double g(double x) const
    {
        require_in_range(x, "eval_g");
        if (closed_.g) {
            return closed_.g(x);
        }
        return detail::numeric_g(
            f_, [this](double t) { return closed_.f_inv ? closed_.f_inv(t) : detail::numeric_inverse(f_, t); }, x);
    }

    /// Adjoint mean with representing function 1/f(1/x).
    [[nodiscard]] MeanDescriptor adjoint() const
    {
        auto base = std::make_shared<const MeanDescriptor>(*this);
        ClosedForms closed;
        if (closed_.f_inv) {
            closed.f_inv = [base](double t) { return 1.0 / base->f_inv(1.0 / t); };
            closed.g_prime = [base](double t) { return 1.0 - base->f_inv(1.0 / t); };
        }
        const Interval r{range_.hi == kInf ? 0.0 : 1.0 / range_.hi,
                         range_.lo == 0.0 ? kInf : 1.0 / range_.lo};
        return MeanDescriptor(
            "adjoint(" + name_ + ")", [base](double x) { return 1.0 / base->f(1.0 / x); }, r,
            std::move(closed), range_estimated_);
    }

private:
    void require_in_range(double t, const char* where) const
    {
        if (!range_.contains(t)) {
            throw RangeError(std::string(where) + ": " + std::to_string(t) + " outside the range (" +
                             std::to_string(range_.lo) + ", " + std::to_string(range_.hi) + ") of " +
                             name_);
        }
    }

    std::string name_;
    ScalarFunction f_;
    ClosedForms closed_;
    Interval range_;
    bool range_estimated_ = false;
};

// Scalar interface -----------------------------------------------------------

inline double invert_f(const MeanDescriptor& sigma, double t) { return sigma.f_inv(t); }
inline double eval_g(const MeanDescriptor& sigma, double x) { return sigma.g(x); }
inline MeanDescriptor adjoint_mean(const MeanDescriptor& sigma) { return sigma.adjoint(); }

// Built-in means -------------------------------------------------------------

namespace means {

inline MeanDescriptor arithmetic()
{
    return MeanDescriptor(
        "arithmetic", [](double x) { return 0.5 * (1.0 + x); }, {0.5, kInf},
        {.f_inv = [](double t) { return 2.0 * t - 1.0; },
         .g = [](double x) {
             const double u = x - 1.0;
             return u - 0.5 * std::log1p(2.0 * u);
         },
         .g_prime = [](double t) { return 2.0 * (t - 1.0) / (2.0 * t - 1.0); }});
}

inline MeanDescriptor harmonic()
{
    return MeanDescriptor(
        "harmonic", [](double x) { return 2.0 * x / (1.0 + x); }, {0.0, 2.0},
        {.f_inv = [](double t) { return t / (2.0 - t); },
         .g = [](double x) {
             const double u = x - 1.0;
             return 2.0 * (u - std::log1p(u));
         },
         .g_prime = [](double t) { return 2.0 * (t - 1.0) / t; }});
}

inline MeanDescriptor geometric()
{
    return MeanDescriptor(
        "geometric", [](double x) { return std::sqrt(x); }, Interval::positive(),
        {.f_inv = [](double t) { return t * t; },
         .g = [](double x) {
             const double u = x - 1.0;
             return u * u / x;
         },
         .g_prime = [](double t) { return (t - 1.0) * (t + 1.0) / (t * t); }});
}

/// f(x) = (x - 1)/ln x, with a series branch around the removable singularity at 1.
inline double logarithmic_f(double x)
{
    const double u = x - 1.0;
    if (std::abs(u) < 1e-4) {
        return 1.0 + u / 2.0 - u * u / 12.0 + u * u * u / 24.0;
    }
    return u / (std::abs(u) < 0.5 ? std::log1p(u) : std::log(x));
}

inline MeanDescriptor logarithmic()
{
    return MeanDescriptor("logarithmic", logarithmic_f, Interval::positive());
}

} // namespace means

inline const std::vector<MeanDescriptor>& builtin_means()
{
    static const std::vector<MeanDescriptor> registry{means::arithmetic(), means::harmonic(),
                                                      means::geometric(), means::logarithmic()};
    return registry;
}

inline const MeanDescriptor& mean_by_name(const std::string& name)
{
    for (const auto& m : builtin_means()) {
        if (m.name() == name) {
            return m;
        }
    }
    throw UnknownMean("unknown mean '" + name +
                      "' (expected arithmetic, harmonic, geometric or logarithmic)");
}

inline bool is_geometric(const MeanDescriptor& sigma) { return sigma.name() == "geometric"; }

// Matrix means ---------------------------------------------------------------

/// A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2} for an operator monotone f on (0, inf).
template <class F>
PDMatrix apply_representing_function(F&& f, const PDMatrix& a, const PDMatrix& b)
{
    detail::require_same_dim(a.dim(), b.dim(), "mean_apply");
    const PDMatrix inner = conjugate_by_root(a, b, RootSign::minus_half);
    const HermitianMatrix mapped = matfun(inner, std::forward<F>(f));
    return PDMatrix(congruence(sqrt(a).matrix(), mapped));
}

inline PDMatrix mean_apply(const MeanDescriptor& sigma, const PDMatrix& a, const PDMatrix& b)
{
    return apply_representing_function(sigma.representing_function(), a, b);
}

enum class WeightedKind { arithmetic, geometric, harmonic };

/// Weighted two-variable arithmetic, geometric or harmonic mean with weight alpha on B.
inline PDMatrix weighted_two_means(WeightedKind kind, const PDMatrix& a, const PDMatrix& b, double alpha)
{
    detail::require_same_dim(a.dim(), b.dim(), "weighted_two_means");
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw WeightError("weighted_two_means: alpha = " + std::to_string(alpha) + " outside [0, 1]");
    }
    switch (kind) {
    case WeightedKind::arithmetic:
        return PDMatrix(HermitianMatrix(CMatrix((1.0 - alpha) * a.matrix() + alpha * b.matrix())));
    case WeightedKind::geometric:
        return apply_representing_function([alpha](double x) { return std::pow(x, alpha); }, a, b);
    case WeightedKind::harmonic: {
        const CMatrix s = (1.0 - alpha) * inverse(a).matrix() + alpha * inverse(b).matrix();
        return inverse(PDMatrix(s));
    }
    }
    throw WeightError("weighted_two_means: unknown kind");
}

} // namespace opmean
