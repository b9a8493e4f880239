#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dwell/operators.hpp"
#include "dwell/state.hpp"

namespace dwell {

/// Eigenvalues ascending, eigenvectors as orthonormal columns.
///
/// Each eigenvector's phase is fixed so that its largest-magnitude component
/// (first one on near-ties) is real and positive.
struct SpectralDecomposition {
    BasisPtr basis;
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;

    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
    [[nodiscard]] PureState eigenstate(std::size_t i) const
    {
        return {basis, eigenvectors.col(static_cast<Eigen::Index>(i))};
    }
};

namespace detail {

inline void fix_phase(ComplexMatrix& vectors)
{
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        auto col = vectors.col(c);
        const double biggest = col.cwiseAbs().maxCoeff();
        Eigen::Index pick = 0;
        while (std::abs(col(pick)) < biggest * (1.0 - 1e-10)) ++pick;
        const Complex z = col(pick);
        col *= std::conj(z) / std::abs(z);
        col(pick) = Complex(col(pick).real(), 0.0);
    }
}

}  // namespace detail

inline SpectralDecomposition eigh(const OperatorMatrix& op)
{
    if (!op.hermitian()) throw std::invalid_argument("eigh: operator is not Hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(op.data());
    if (solver.info() != Eigen::Success) throw NumericalError("eigh: eigensolver did not converge");
    ComplexMatrix vectors = solver.eigenvectors();
    detail::fix_phase(vectors);
    return {op.basis(), solver.eigenvalues(), std::move(vectors)};
}

struct GroundState {
    PureState state;
    double energy = 0.0;
    /// Set when the first gap is at most 1e-9 max(1, |E0|).
    bool degenerate = false;
};

inline GroundState ground_state(const SpectralDecomposition& spec)
{
    const auto& e = spec.eigenvalues;
    const bool degenerate = e.size() > 1 && (e(1) - e(0)) <= 1e-9 * std::max(1.0, std::abs(e(0)));
    return {spec.eigenstate(0), e(0), degenerate};
}

inline GroundState ground_state(const OperatorMatrix& op) { return ground_state(eigh(op)); }

/// exp(-beta H) / Tr exp(-beta H), built from the spectrum with weights shifted by E0.
inline DensityMatrix gibbs_state(const SpectralDecomposition& spec, double beta)
{
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("gibbs_state: beta must be finite and >= 0");
    const auto& e = spec.eigenvalues;
    RealVector w = (-beta * (e.array() - e(0))).exp().matrix();
    w /= w.sum();
    ComplexMatrix rho = spec.eigenvectors * w.cast<Complex>().asDiagonal() * spec.eigenvectors.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return {spec.basis, std::move(rho)};
}

inline DensityMatrix gibbs_state(const OperatorMatrix& op, double beta) { return gibbs_state(eigh(op), beta); }

/// V diag(exp(scale * lambda)) V^+ vec. With scale = -i t this is exp(-i H t) vec.
inline PureState matrix_exp_hermitian_action(const SpectralDecomposition& spec, Complex scale, const PureState& vec)
{
    require_same_basis(*spec.basis, *vec.basis(), "matrix_exp_hermitian_action");
    const ComplexVector phases = (scale * spec.eigenvalues.cast<Complex>().array()).exp().matrix();
    ComplexVector coeff = spec.eigenvectors.adjoint() * vec.amplitudes();
    coeff = phases.cwiseProduct(coeff);
    return {spec.basis, spec.eigenvectors * coeff};
}

inline PureState matrix_exp_hermitian_action(const OperatorMatrix& op, Complex scale, const PureState& vec)
{
    return matrix_exp_hermitian_action(eigh(op), scale, vec);
}

}  // namespace dwell
