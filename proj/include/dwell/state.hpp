#pragma once

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "dwell/basis.hpp"

namespace dwell {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace detail {

inline double max_abs(const ComplexMatrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_error(const ComplexMatrix& m)
{
    return max_abs(m - m.adjoint());
}

/// Smallest eigenvalue of the Hermitian part of m.
inline double min_eigenvalue(const ComplexMatrix& m)
{
    const ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

}  // namespace detail

/// Normalized state vector over a Fock basis.
class PureState {
public:
    PureState(BasisPtr basis, ComplexVector amplitudes) : basis_(std::move(basis)), amplitudes_(std::move(amplitudes))
    {
        if (!basis_) throw std::invalid_argument("PureState: null basis");
        if (static_cast<std::size_t>(amplitudes_.size()) != basis_->size())
            throw std::invalid_argument("PureState: dimension does not match " + basis_->describe());
    }

    [[nodiscard]] const BasisPtr& basis() const { return basis_; }
    [[nodiscard]] const ComplexVector& amplitudes() const { return amplitudes_; }
    [[nodiscard]] double norm() const { return amplitudes_.norm(); }
    [[nodiscard]] Complex operator[](std::size_t i) const { return amplitudes_(static_cast<Eigen::Index>(i)); }

private:
    BasisPtr basis_;
    ComplexVector amplitudes_;
};

/// Hermitian, unit-trace, positive semidefinite matrix over a Fock basis.
/// The constructor enforces all three properties.
class DensityMatrix {
public:
    static constexpr double kHermitianTol = 1e-10;
    static constexpr double kTraceTol = 1e-10;
    static constexpr double kPositivityTol = 1e-8;

    DensityMatrix(BasisPtr basis, ComplexMatrix data) : basis_(std::move(basis)), data_(std::move(data))
    {
        if (!basis_) throw std::invalid_argument("DensityMatrix: null basis");
        const auto d = static_cast<Eigen::Index>(basis_->size());
        if (data_.rows() != d || data_.cols() != d)
            throw std::invalid_argument("DensityMatrix: shape does not match " + basis_->describe());
        if (const double e = detail::hermiticity_error(data_); e > kHermitianTol)
            throw NumericalError("DensityMatrix: not Hermitian (max |rho - rho^+| = " + std::to_string(e) + ")");
        if (const double t = data_.trace().real(); std::abs(t - 1.0) > kTraceTol)
            throw NumericalError("DensityMatrix: trace " + std::to_string(t) + " differs from 1");
        if (const double m = detail::min_eigenvalue(data_); m < -kPositivityTol)
            throw NumericalError("DensityMatrix: negative eigenvalue " + std::to_string(m));
    }

    static DensityMatrix from_pure(const PureState& psi)
    {
        return {psi.basis(), psi.amplitudes() * psi.amplitudes().adjoint()};
    }

    /// I/d on the given basis.
    static DensityMatrix maximally_mixed(const BasisPtr& basis)
    {
        const auto d = static_cast<Eigen::Index>(basis->size());
        return {basis, ComplexMatrix::Identity(d, d) / static_cast<double>(d)};
    }

    [[nodiscard]] const BasisPtr& basis() const { return basis_; }
    [[nodiscard]] const ComplexMatrix& data() const { return data_; }
    [[nodiscard]] std::size_t dim() const { return basis_->size(); }
    [[nodiscard]] Complex operator()(std::size_t i, std::size_t j) const
    {
        return data_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    [[nodiscard]] double purity() const { return (data_ * data_).trace().real(); }

private:
    BasisPtr basis_;
    ComplexMatrix data_;
};

}  // namespace dwell
