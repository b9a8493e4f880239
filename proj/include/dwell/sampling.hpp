#pragma once

#include <cmath>
#include <random>

#include "dwell/state.hpp"

// Random inputs for property checks. Deterministic for a given engine state.
namespace dwell::sampling {

/// Hermitian matrix with standard-normal real and imaginary parts.
inline ComplexMatrix random_hermitian(Eigen::Index d, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    ComplexMatrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
    return 0.5 * (m + m.adjoint());
}

/// Normalized state with Gaussian amplitudes; with probability 1/3 a random
/// subset of amplitudes is zeroed to reach the low-rank corners.
inline PureState random_pure_state(const BasisPtr& basis, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u;
    const auto d = static_cast<Eigen::Index>(basis->size());
    ComplexVector v(d);
    const bool sparse = u(rng) < 1.0 / 3.0;
    for (Eigen::Index i = 0; i < d; ++i) v(i) = (sparse && u(rng) < 0.5) ? Complex(0.0) : Complex(g(rng), g(rng));
    if (v.norm() == 0.0) v(0) = 1.0;
    v.normalize();
    return {basis, v};
}

/// Random pair-basis density matrix: random diagonal, off-diagonals with random
/// moduli and phases, then mixed with the identity until positive semidefinite.
inline DensityMatrix random_pair_state(const BasisPtr& basis, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u;
    const auto d = static_cast<Eigen::Index>(basis->size());
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) m(i, i) = u(rng);
    m /= m.trace();
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j) {
            m(i, j) = std::polar(u(rng) / static_cast<double>(d), 2.0 * M_PI * u(rng));
            m(j, i) = std::conj(m(i, j));
        }
    const double lo = detail::min_eigenvalue(m);
    if (lo < 0.0) {
        const double shift = -lo * (1.0 + 1e-6);
        m += shift * ComplexMatrix::Identity(d, d);
        m /= m.trace().real();
    }
    return {basis, m};
}

}  // namespace dwell::sampling
