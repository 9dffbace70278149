#pragma once

// Seeded generators for randomized property checks.

#include "opmean/matcore.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace opmean::random {

using Engine = std::mt19937_64;

inline CMatrix gaussian(Index rows, Index cols, Engine& rng)
{
    std::normal_distribution<double> n01(0.0, 1.0);
    CMatrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            const double re = n01(rng);
            const double im = n01(rng);
            m(i, j) = Complex(re, im);
        }
    }
    return m;
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix with phase correction.
inline CMatrix unitary(Index n, Engine& rng)
{
    const CMatrix z = gaussian(n, n, rng);
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index i = 0; i < n; ++i) {
        const double mag = std::abs(r(i, i));
        if (mag > 0.0) {
            q.col(i) *= r(i, i) / mag;
        }
    }
    return q;
}

/// U diag(lambda) U* with log-uniform eigenvalues in [scale, scale * cond].
inline PDMatrix pd(Index n, Engine& rng, double cond = 1e3, double scale = 1.0)
{
    std::uniform_real_distribution<double> u(0.0, std::log(cond));
    RVector lambda(n);
    for (Index i = 0; i < n; ++i) {
        lambda(i) = scale * std::exp(u(rng));
    }
    const CMatrix q = unitary(n, rng);
    return PDMatrix(HermitianMatrix(CMatrix(q * lambda.cast<Complex>().asDiagonal() * q.adjoint())));
}

/// Real diagonal positive definite matrix with log-uniform entries in [scale, scale * cond].
inline PDMatrix diagonal_pd(Index n, Engine& rng, double cond = 1e3, double scale = 1.0)
{
    std::uniform_real_distribution<double> u(0.0, std::log(cond));
    RVector lambda(n);
    for (Index i = 0; i < n; ++i) {
        lambda(i) = scale * std::exp(u(rng));
    }
    return PDMatrix::diagonal(lambda);
}

/// U diag(s) V with singular values log-uniform in [0.3, 3].
inline CMatrix invertible(Index n, Engine& rng)
{
    std::uniform_real_distribution<double> u(std::log(0.3), std::log(3.0));
    RVector s(n);
    for (Index i = 0; i < n; ++i) {
        s(i) = std::exp(u(rng));
    }
    return unitary(n, rng) * s.cast<Complex>().asDiagonal() * unitary(n, rng);
}

/// Hermitian matrix with unit Frobenius norm.
inline HermitianMatrix unit_hermitian(Index n, Engine& rng)
{
    const HermitianMatrix h(gaussian(n, n, rng));
    return (1.0 / frobenius_norm(h)) * h;
}

} // namespace opmean::random
