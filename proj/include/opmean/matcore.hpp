#pragma once

// Dense Hermitian / positive definite matrix algebra over the complex field.
//
// Every matrix function goes through a full Hermitian eigendecomposition
// (A = U diag(lambda) U*), which is cheap and accurate at the dimensions this
// library targets (dim <= 64). Computed Hermitian results are symmetrized as
// (M + M*)/2 before they are reused.

#include "opmean/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>

namespace opmean {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Relative threshold below which the smallest eigenvalue is treated as non-positive.
inline constexpr double kPositivityTolerance = 1e-12;

/// Open interval (lo, hi); either end may be infinite.
struct Interval {
    double lo = -kInf;
    double hi = kInf;

    [[nodiscard]] bool contains(double x) const noexcept { return lo < x && x < hi; }

    static constexpr Interval real_line() noexcept { return {-kInf, kInf}; }
    static constexpr Interval positive() noexcept { return {0.0, kInf}; }
};

namespace detail {

inline CMatrix symmetrized(const CMatrix& m) { return (m + m.adjoint()) * 0.5; }

inline void require_same_dim(Index a, Index b, const char* where)
{
    if (a != b) {
        throw DimensionMismatch(std::string(where) + ": dimension " + std::to_string(a) +
                                " does not match " + std::to_string(b));
    }
}

} // namespace detail

/// Self-adjoint matrix. Construction symmetrizes the input.
class HermitianMatrix {
public:
    HermitianMatrix() = default;

    explicit HermitianMatrix(const CMatrix& m)
    {
        if (m.rows() != m.cols()) {
            throw DimensionMismatch("HermitianMatrix: matrix is " + std::to_string(m.rows()) + "x" +
                                    std::to_string(m.cols()) + ", expected square");
        }
        m_ = detail::symmetrized(m);
    }

    static HermitianMatrix from_real(const RMatrix& m) { return HermitianMatrix(CMatrix(m.cast<Complex>())); }

    static HermitianMatrix identity(Index n) { return HermitianMatrix(CMatrix(CMatrix::Identity(n, n))); }
    static HermitianMatrix zero(Index n) { return HermitianMatrix(CMatrix(CMatrix::Zero(n, n))); }

    static HermitianMatrix diagonal(const RVector& d)
    {
        return HermitianMatrix(CMatrix(d.cast<Complex>().asDiagonal()));
    }

    [[nodiscard]] Index dim() const noexcept { return m_.rows(); }
    [[nodiscard]] const CMatrix& matrix() const noexcept { return m_; }
    [[nodiscard]] Complex operator()(Index i, Index j) const { return m_(i, j); }

    [[nodiscard]] double trace() const { return m_.trace().real(); }

    friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b)
    {
        detail::require_same_dim(a.dim(), b.dim(), "operator+");
        return HermitianMatrix(CMatrix(a.m_ + b.m_));
    }

    friend HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b)
    {
        detail::require_same_dim(a.dim(), b.dim(), "operator-");
        return HermitianMatrix(CMatrix(a.m_ - b.m_));
    }

    friend HermitianMatrix operator*(double s, const HermitianMatrix& a)
    {
        return HermitianMatrix(CMatrix(a.m_ * s));
    }

    friend HermitianMatrix operator*(const HermitianMatrix& a, double s) { return s * a; }

    HermitianMatrix operator-() const { return HermitianMatrix(CMatrix(-m_)); }

private:
    CMatrix m_;
};

/// Eigenvalues in ascending order together with a unitary matrix of eigenvectors (columns).
struct EigenSystem {
    RVector eigenvalues;
    CMatrix eigenvectors;

    [[nodiscard]] CMatrix reconstruct() const
    {
        return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
    }
};

inline EigenSystem eigensystem(const HermitianMatrix& a)
{
    if (a.dim() == 0) {
        return {};
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(a.matrix());
    if (solver.info() != Eigen::Success) {
        throw DomainError("eigensystem: Hermitian eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Positive definite Hermitian matrix. Carries its eigensystem, computed once on construction.
class PDMatrix {
public:
    explicit PDMatrix(HermitianMatrix h) : h_(checked(std::move(h))), es_(eigensystem(h_))
    {
        const double lmin = es_.eigenvalues(0);
        const double lmax = es_.eigenvalues(es_.eigenvalues.size() - 1);
        if (!(lmin > kPositivityTolerance * std::max(1.0, lmax))) {
            throw NotPositiveDefinite("PDMatrix: smallest eigenvalue " + std::to_string(lmin) +
                                      " is not positive");
        }
    }

    explicit PDMatrix(const CMatrix& m) : PDMatrix(HermitianMatrix(m)) {}
    static PDMatrix from_real(const RMatrix& m) { return PDMatrix(HermitianMatrix::from_real(m)); }

    static PDMatrix identity(Index n) { return PDMatrix(HermitianMatrix::identity(n)); }
    static PDMatrix diagonal(const RVector& d) { return PDMatrix(HermitianMatrix::diagonal(d)); }
    static PDMatrix scalar(double x) { return diagonal(RVector::Constant(1, x)); }

    [[nodiscard]] Index dim() const noexcept { return h_.dim(); }
    [[nodiscard]] const HermitianMatrix& hermitian() const noexcept { return h_; }
    [[nodiscard]] const CMatrix& matrix() const noexcept { return h_.matrix(); }
    [[nodiscard]] const EigenSystem& eigen() const noexcept { return es_; }

    /// Eigenvalue multiset, ascending.
    [[nodiscard]] const RVector& spectrum() const noexcept { return es_.eigenvalues; }
    [[nodiscard]] double min_eigenvalue() const { return es_.eigenvalues(0); }
    [[nodiscard]] double max_eigenvalue() const { return es_.eigenvalues(es_.eigenvalues.size() - 1); }

    operator const HermitianMatrix&() const noexcept { return h_; } // NOLINT(google-explicit-constructor)

private:
    static HermitianMatrix checked(HermitianMatrix h)
    {
        if (h.dim() == 0) {
            throw NotPositiveDefinite("PDMatrix: empty matrix");
        }
        if (!h.matrix().allFinite()) {
            throw NotPositiveDefinite("PDMatrix: non-finite entries");
        }
        return h;
    }

    HermitianMatrix h_;
    EigenSystem es_;
};

/// U diag(h(lambda_i)) U*. No domain checking.
template <class F>
HermitianMatrix matfun(const EigenSystem& es, F&& h)
{
    RVector mapped(es.eigenvalues.size());
    for (Index i = 0; i < mapped.size(); ++i) {
        mapped(i) = h(es.eigenvalues(i));
    }
    return HermitianMatrix(
        CMatrix(es.eigenvectors * mapped.cast<Complex>().asDiagonal() * es.eigenvectors.adjoint()));
}

/// Matrix function with a declared open domain for h; throws DomainError when the
/// spectrum is not contained in it.
template <class F>
HermitianMatrix matfun(const EigenSystem& es, F&& h, Interval domain)
{
    for (Index i = 0; i < es.eigenvalues.size(); ++i) {
        if (!domain.contains(es.eigenvalues(i))) {
            throw DomainError("matfun: eigenvalue " + std::to_string(es.eigenvalues(i)) +
                              " outside the function's domain");
        }
    }
    return matfun(es, std::forward<F>(h));
}

template <class F>
HermitianMatrix matfun(const HermitianMatrix& a, F&& h, Interval domain = Interval::real_line())
{
    return matfun(eigensystem(a), std::forward<F>(h), domain);
}

template <class F>
HermitianMatrix matfun(const PDMatrix& a, F&& h, Interval domain = Interval::positive())
{
    return matfun(a.eigen(), std::forward<F>(h), domain);
}

/// Matrix function whose result is known to be positive definite (h > 0 on the spectrum).
template <class F>
PDMatrix matfun_pd(const PDMatrix& a, F&& h, Interval domain = Interval::positive())
{
    return PDMatrix(matfun(a, std::forward<F>(h), domain));
}

inline PDMatrix sqrt(const PDMatrix& a)
{
    return matfun_pd(a, [](double x) { return std::sqrt(x); });
}

inline PDMatrix inv_sqrt(const PDMatrix& a)
{
    return matfun_pd(a, [](double x) { return 1.0 / std::sqrt(x); });
}

inline PDMatrix inverse(const PDMatrix& a)
{
    return matfun_pd(a, [](double x) { return 1.0 / x; });
}

inline PDMatrix pow(const PDMatrix& a, double p)
{
    return matfun_pd(a, [p](double x) { return std::pow(x, p); });
}

inline HermitianMatrix log(const PDMatrix& a)
{
    return matfun(a, [](double x) { return std::log(x); });
}

/// T A T*, for an arbitrary square T.
inline HermitianMatrix congruence(const CMatrix& t, const HermitianMatrix& a)
{
    detail::require_same_dim(t.rows(), a.dim(), "congruence");
    detail::require_same_dim(t.cols(), a.dim(), "congruence");
    return HermitianMatrix(CMatrix(t * a.matrix() * t.adjoint()));
}

/// T A T* for invertible T; positive definite by congruence.
inline PDMatrix congruence(const CMatrix& t, const PDMatrix& a)
{
    return PDMatrix(congruence(t, a.hermitian()));
}

enum class RootSign { plus_half, minus_half };

/// A^{s} B A^{s} with s = +1/2 or -1/2.
inline PDMatrix conjugate_by_root(const PDMatrix& a, const PDMatrix& b, RootSign sign)
{
    detail::require_same_dim(a.dim(), b.dim(), "conjugate_by_root");
    const PDMatrix root = sign == RootSign::plus_half ? sqrt(a) : inv_sqrt(a);
    return congruence(root.matrix(), b);
}

inline double frobenius_norm(const CMatrix& a) { return a.norm(); }
inline double frobenius_norm(const HermitianMatrix& a) { return a.matrix().norm(); }

/// Re tr(A B), the trace inner product on Hermitian matrices.
inline double trace_inner(const HermitianMatrix& a, const HermitianMatrix& b)
{
    detail::require_same_dim(a.dim(), b.dim(), "trace_inner");
    return (a.matrix().array() * b.matrix().transpose().array()).sum().real();
}

/// Loewner order test: lambda_min(A - B) >= -tol.
inline bool loewner_geq(const HermitianMatrix& a, const HermitianMatrix& b, double tol)
{
    detail::require_same_dim(a.dim(), b.dim(), "loewner_geq");
    const EigenSystem es = eigensystem(a - b);
    return es.eigenvalues.size() == 0 || es.eigenvalues(0) >= -tol;
}

/// ||A - B||_F / ||B||_F (absolute difference when B is zero).
inline double relative_difference(const HermitianMatrix& a, const HermitianMatrix& b)
{
    detail::require_same_dim(a.dim(), b.dim(), "relative_difference");
    const double nb = frobenius_norm(b);
    const double diff = frobenius_norm(CMatrix(a.matrix() - b.matrix()));
    return nb > 0.0 ? diff / nb : diff;
}

/// Weighted sum sum_j w_j A_j, accumulated in index order.
template <class Range, class Weights>
HermitianMatrix weighted_sum(const Range& mats, const Weights& w)
{
    CMatrix acc = CMatrix::Zero(mats.front().dim(), mats.front().dim());
    for (std::size_t j = 0; j < mats.size(); ++j) {
        const HermitianMatrix& h = mats[j];
        acc += w[j] * h.matrix();
    }
    return HermitianMatrix(acc);
}

} // namespace opmean
