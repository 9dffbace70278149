#pragma once

// The divergence phi_sigma(A, B) = tr g_sigma(A^{-1/2} B A^{-1/2}), the weighted
// loss Q(X) = sum_j w_j phi_sigma(A_j, X) with its gradient, and the classical
// distances d_R (Riemannian trace metric) and d_S (S-divergence).

#include "opmean/errors.hpp"
#include "opmean/matcore.hpp"
#include "opmean/means.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace opmean {

/// Non-negative divergence value or an explicit +infinity marker.
class DivergenceValue {
public:
    static DivergenceValue finite_value(double v) { return DivergenceValue(v, true); }
    static DivergenceValue infinite() { return DivergenceValue(0.0, false); }

    [[nodiscard]] bool finite() const noexcept { return finite_; }

    /// The finite value; throws DomainError on the infinite marker.
    [[nodiscard]] double value() const
    {
        if (!finite_) {
            throw DomainError("DivergenceValue: value requested from +inf marker");
        }
        return value_;
    }

    /// Finite value, or +inf as a double for ordering purposes.
    [[nodiscard]] double as_double() const noexcept { return finite_ ? value_ : kInf; }

    [[nodiscard]] std::string to_string() const
    {
        if (!finite_) {
            return "inf";
        }
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", value_);
        return buf;
    }

    friend bool operator==(const DivergenceValue& a, const DivergenceValue& b)
    {
        return a.finite_ == b.finite_ && (!a.finite_ || a.value_ == b.value_);
    }
    friend bool operator<(const DivergenceValue& a, const DivergenceValue& b)
    {
        return a.finite_ && (!b.finite_ || a.value_ < b.value_);
    }
    friend bool operator<=(const DivergenceValue& a, const DivergenceValue& b) { return !(b < a); }

private:
    DivergenceValue(double v, bool finite) : value_(v), finite_(finite) {}

    double value_;
    bool finite_;
};

/// Strictly positive weights, normalized to sum to one on construction.
class WeightVector {
public:
    explicit WeightVector(std::vector<double> raw) : w_(std::move(raw))
    {
        if (w_.empty()) {
            throw WeightError("weights: empty weight vector");
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < w_.size(); ++j) {
            if (!(w_[j] > 0.0) || !std::isfinite(w_[j])) {
                throw WeightError("weights[" + std::to_string(j) + "]: must be positive and finite, got " +
                                  std::to_string(w_[j]));
            }
            sum += w_[j];
        }
        renormalized_ = std::abs(sum - 1.0) > 1e-9;
        for (double& x : w_) {
            x /= sum;
        }
    }

    static WeightVector uniform(std::size_t m) { return WeightVector(std::vector<double>(m, 1.0)); }

    [[nodiscard]] std::size_t size() const noexcept { return w_.size(); }
    [[nodiscard]] double operator[](std::size_t j) const { return w_[j]; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return w_; }

    /// True when the raw weights did not sum to one within 1e-9.
    [[nodiscard]] bool renormalized() const noexcept { return renormalized_; }

private:
    std::vector<double> w_;
    bool renormalized_ = false;
};

/// Relative margin applied at finite endpoints of ran(f).
inline constexpr double kRangeMargin = 1e-12;

inline bool spectrum_in_range(const RVector& spectrum, Interval range)
{
    for (Index i = 0; i < spectrum.size(); ++i) {
        const double x = spectrum(i);
        if (range.lo > 0.0 ? !(x > range.lo * (1.0 + kRangeMargin)) : !(x > range.lo)) {
            return false;
        }
        if (range.hi < kInf && !(x < range.hi * (1.0 - kRangeMargin))) {
            return false;
        }
    }
    return true;
}

/// Whether spec(A^{-1/2} B A^{-1/2}) lies inside ran(f_sigma).
inline bool in_domain(const MeanDescriptor& sigma, const PDMatrix& a, const PDMatrix& b)
{
    detail::require_same_dim(a.dim(), b.dim(), "in_domain");
    return spectrum_in_range(conjugate_by_root(a, b, RootSign::minus_half).spectrum(), sigma.range());
}

namespace detail {

/// sum_i g(lambda_i), with the infinite marker outside the range or on overflow.
inline DivergenceValue trace_g(const MeanDescriptor& sigma, const RVector& spectrum)
{
    if (!spectrum_in_range(spectrum, sigma.range())) {
        return DivergenceValue::infinite();
    }
    double sum = 0.0;
    for (Index i = 0; i < spectrum.size(); ++i) {
        sum += sigma.g(spectrum(i));
    }
    if (!std::isfinite(sum)) {
        return DivergenceValue::infinite();
    }
    return DivergenceValue::finite_value(std::max(0.0, sum));
}

inline bool nearly_equal(const PDMatrix& a, const PDMatrix& b)
{
    return frobenius_norm(CMatrix(a.matrix() - b.matrix())) <= 1e-10 * frobenius_norm(a.hermitian());
}

} // namespace detail

/// phi_sigma(A, B) = tr g_sigma(A^{-1/2} B A^{-1/2}); +inf outside the spectral domain.
inline DivergenceValue phi(const MeanDescriptor& sigma, const PDMatrix& a, const PDMatrix& b)
{
    detail::require_same_dim(a.dim(), b.dim(), "phi");
    if (detail::nearly_equal(a, b)) {
        return DivergenceValue::finite_value(0.0);
    }
    return detail::trace_g(sigma, conjugate_by_root(a, b, RootSign::minus_half).spectrum());
}

/// Q(X) = sum_j w_j phi_sigma(A_j, X) and its gradient for a fixed (sigma, {A_j}, w).
///
/// Caches A_j^{-1/2}. The gradient with respect to the trace inner product is
///   sum_j w_j A_j^{-1/2} g'(A_j^{-1/2} X A_j^{-1/2}) A_j^{-1/2},
/// with g'(t) = 1 - 1/f^{-1}(t). Sums run over j in index order.
class WeightedLoss {
public:
    WeightedLoss(MeanDescriptor sigma, std::vector<PDMatrix> mats, WeightVector weights)
        : sigma_(std::move(sigma)), mats_(std::move(mats)), w_(std::move(weights))
    {
        if (mats_.empty()) {
            throw DimensionMismatch("loss: empty matrix list");
        }
        if (mats_.size() != w_.size()) {
            throw WeightError("loss: " + std::to_string(w_.size()) + " weights for " +
                              std::to_string(mats_.size()) + " matrices");
        }
        inv_roots_.reserve(mats_.size());
        for (const auto& a : mats_) {
            detail::require_same_dim(a.dim(), mats_.front().dim(), "loss");
            inv_roots_.push_back(inv_sqrt(a));
        }
    }

    [[nodiscard]] const MeanDescriptor& mean() const noexcept { return sigma_; }
    [[nodiscard]] const std::vector<PDMatrix>& matrices() const noexcept { return mats_; }
    [[nodiscard]] const WeightVector& weights() const noexcept { return w_; }
    [[nodiscard]] Index dim() const noexcept { return mats_.front().dim(); }

    [[nodiscard]] DivergenceValue value(const PDMatrix& x) const
    {
        detail::require_same_dim(x.dim(), dim(), "loss_Q");
        double sum = 0.0;
        for (std::size_t j = 0; j < mats_.size(); ++j) {
            const DivergenceValue term =
                detail::nearly_equal(mats_[j], x)
                    ? DivergenceValue::finite_value(0.0)
                    : detail::trace_g(sigma_, inner(j, x).eigenvalues);
            if (!term.finite()) {
                return DivergenceValue::infinite();
            }
            sum += w_[j] * term.value();
        }
        return DivergenceValue::finite_value(sum);
    }

    [[nodiscard]] HermitianMatrix gradient(const PDMatrix& x) const
    {
        detail::require_same_dim(x.dim(), dim(), "grad_Q");
        CMatrix acc = CMatrix::Zero(dim(), dim());
        for (std::size_t j = 0; j < mats_.size(); ++j) {
            const EigenSystem es = inner(j, x);
            if (!spectrum_in_range(es.eigenvalues, sigma_.range())) {
                throw DomainError("grad_Q: spectrum of A_" + std::to_string(j) +
                                  "^{-1/2} X A_" + std::to_string(j) + "^{-1/2} leaves the range of " +
                                  sigma_.name());
            }
            const HermitianMatrix gp = matfun(es, [this](double t) { return sigma_.g_prime(t); });
            const CMatrix& r = inv_roots_[j].matrix();
            acc += w_[j] * (r * gp.matrix() * r);
        }
        return HermitianMatrix(acc);
    }

    /// sum_j w_j ||A_j^{-1}||_F.
    [[nodiscard]] double inverse_scale() const
    {
        double s = 0.0;
        for (std::size_t j = 0; j < mats_.size(); ++j) {
            s += w_[j] * frobenius_norm(inverse(mats_[j]).hermitian());
        }
        return s;
    }

private:
    [[nodiscard]] EigenSystem inner(std::size_t j, const PDMatrix& x) const
    {
        return eigensystem(congruence(inv_roots_[j].matrix(), x.hermitian()));
    }

    MeanDescriptor sigma_;
    std::vector<PDMatrix> mats_;
    WeightVector w_;
    std::vector<PDMatrix> inv_roots_;
};

inline DivergenceValue loss_Q(const MeanDescriptor& sigma, const std::vector<PDMatrix>& mats,
                              const WeightVector& w, const PDMatrix& x)
{
    return WeightedLoss(sigma, mats, w).value(x);
}

inline HermitianMatrix grad_Q(const MeanDescriptor& sigma, const std::vector<PDMatrix>& mats,
                              const WeightVector& w, const PDMatrix& x)
{
    return WeightedLoss(sigma, mats, w).gradient(x);
}

/// d_R(X, Y) = ||log(X^{-1/2} Y X^{-1/2})||_F.
inline double d_riemann(const PDMatrix& x, const PDMatrix& y)
{
    detail::require_same_dim(x.dim(), y.dim(), "d_riemann");
    const PDMatrix inner = conjugate_by_root(x, y, RootSign::minus_half);
    const RVector& spec = inner.spectrum();
    double s = 0.0;
    for (Index i = 0; i < spec.size(); ++i) {
        const double l = std::log(spec(i));
        s += l * l;
    }
    return std::sqrt(s);
}

/// tr log((X+Y)/2) - 1/2 tr log X - 1/2 tr log Y, without clamping.
inline double d_sdiv_squared(const PDMatrix& x, const PDMatrix& y)
{
    detail::require_same_dim(x.dim(), y.dim(), "d_sdiv");
    auto logdet = [](const RVector& spec) {
        double s = 0.0;
        for (Index i = 0; i < spec.size(); ++i) {
            s += std::log(spec(i));
        }
        return s;
    };
    const PDMatrix mid(HermitianMatrix(CMatrix(0.5 * (x.matrix() + y.matrix()))));
    return logdet(mid.spectrum()) - 0.5 * logdet(x.spectrum()) - 0.5 * logdet(y.spectrum());
}

/// S-divergence. Radicands in [-1e-12, 0) are rounding noise and clamp to zero.
inline double d_sdiv(const PDMatrix& x, const PDMatrix& y)
{
    const double r = d_sdiv_squared(x, y);
    if (r < -1e-12) {
        throw NegativeRadicand("d_sdiv: radicand " + std::to_string(r) + " is negative");
    }
    return std::sqrt(std::max(0.0, r));
}

} // namespace opmean
