#pragma once

#include <cmath>
#include <string>

#include "dwell/basis.hpp"
#include "dwell/state.hpp"

namespace dwell {

enum class Well { A, B };

/// Parameters of H(J, U) = -J K + U O.
struct ModelParams {
    double hopping = 1.0;      ///< J
    double interaction = 1.0;  ///< U

    void validate() const
    {
        if (!std::isfinite(hopping) || !std::isfinite(interaction))
            throw std::invalid_argument("ModelParams: J and U must be finite");
    }
};

/// Dense operator on a Fock basis. The hermitian flag is checked on construction.
class OperatorMatrix {
public:
    static constexpr double kHermitianTol = 1e-12;

    OperatorMatrix(BasisPtr basis, ComplexMatrix data, bool hermitian)
        : basis_(std::move(basis)), data_(std::move(data)), hermitian_(hermitian)
    {
        if (!basis_) throw std::invalid_argument("OperatorMatrix: null basis");
        const auto d = static_cast<Eigen::Index>(basis_->size());
        if (data_.rows() != d || data_.cols() != d)
            throw std::invalid_argument("OperatorMatrix: shape does not match " + basis_->describe());
        if (hermitian_ && detail::hermiticity_error(data_) > kHermitianTol)
            throw std::invalid_argument("OperatorMatrix: flagged Hermitian but is not");
    }

    [[nodiscard]] const BasisPtr& basis() const { return basis_; }
    [[nodiscard]] const ComplexMatrix& data() const { return data_; }
    [[nodiscard]] bool hermitian() const { return hermitian_; }
    [[nodiscard]] std::size_t dim() const { return basis_->size(); }

    [[nodiscard]] OperatorMatrix adjoint() const { return {basis_, data_.adjoint(), hermitian_}; }

    friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b)
    {
        require_same_basis(*a.basis_, *b.basis_, "operator+");
        return {a.basis_, a.data_ + b.data_, a.hermitian_ && b.hermitian_};
    }
    friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b)
    {
        require_same_basis(*a.basis_, *b.basis_, "operator*");
        const ComplexMatrix prod = a.data_ * b.data_;
        return {a.basis_, prod, detail::hermiticity_error(prod) <= kHermitianTol};
    }
    friend OperatorMatrix operator*(double s, const OperatorMatrix& a) { return {a.basis_, s * a.data_, a.hermitian_}; }

private:
    BasisPtr basis_;
    ComplexMatrix data_;
    bool hermitian_;
};

namespace detail {

inline int occupation(const FockState& s, Well w) { return w == Well::A ? s.n_a : s.n_b; }

template <typename Fn>
OperatorMatrix diagonal_op(const BasisPtr& basis, Fn&& entry)
{
    const auto d = static_cast<Eigen::Index>(basis->size());
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) m(i, i) = entry(basis->state(static_cast<std::size_t>(i)));
    return {basis, m, true};
}

}  // namespace detail

/// b_w on a Full basis: <..., n-1, ...| b |..., n, ...> = sqrt(n).
/// Sector bases are rejected because b leaves the fixed-number space.
inline OperatorMatrix annihilator(const BasisPtr& basis, Well well)
{
    if (basis->kind() != BasisKind::Full)
        throw std::invalid_argument("annihilator: image leaves " + basis->describe() + "; use a Full basis");
    const auto d = static_cast<Eigen::Index>(basis->size());
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        FockState s = basis->state(static_cast<std::size_t>(j));
        const int n = detail::occupation(s, well);
        if (n == 0) continue;
        (well == Well::A ? s.n_a : s.n_b) -= 1;
        m(static_cast<Eigen::Index>(*basis->index_of(s)), j) = std::sqrt(static_cast<double>(n));
    }
    return {basis, m, false};
}

inline OperatorMatrix creator(const BasisPtr& basis, Well well) { return annihilator(basis, well).adjoint(); }

inline OperatorMatrix number_op(const BasisPtr& basis, Well well)
{
    return detail::diagonal_op(basis, [well](const FockState& s) { return Complex(detail::occupation(s, well)); });
}

/// K = b_A^+ b_B + b_A b_B^+, assembled from the closed-form tridiagonal elements
/// <n+1, m-1| K |n, m> = sqrt((n+1) m) within each fixed-number block.
inline OperatorMatrix hopping_op(const BasisPtr& basis)
{
    const auto d = static_cast<Eigen::Index>(basis->size());
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const FockState s = basis->state(static_cast<std::size_t>(j));
        if (s.n_b == 0) continue;
        const auto i = static_cast<Eigen::Index>(*basis->index_of({s.n_a + 1, s.n_b - 1}));
        const double v = std::sqrt(static_cast<double>(s.n_a + 1) * s.n_b);
        m(i, j) = v;
        m(j, i) = v;
    }
    return {basis, m, true};
}

/// O = sum_w n_w (n_w - 1) / 2.
inline OperatorMatrix interaction_op(const BasisPtr& basis)
{
    return detail::diagonal_op(basis, [](const FockState& s) {
        return Complex(0.5 * s.n_a * (s.n_a - 1) + 0.5 * s.n_b * (s.n_b - 1));
    });
}

/// H(J, U) = -J K + U O. Real symmetric; tridiagonal on sector bases.
inline OperatorMatrix hamiltonian(const BasisPtr& basis, const ModelParams& params)
{
    params.validate();
    return (-params.hopping) * hopping_op(basis) + params.interaction * interaction_op(basis);
}

namespace detail {

constexpr double kImaginaryResidueTol = 1e-10;

inline double checked_real(Complex z, const char* where)
{
    if (std::abs(z.imag()) > kImaginaryResidueTol)
        throw NumericalError(std::string(where) + ": imaginary residue " + std::to_string(z.imag())
                             + " indicates a corrupted state");
    return z.real();
}

}  // namespace detail

/// Tr[rho op].
inline double expectation(const OperatorMatrix& op, const DensityMatrix& rho)
{
    require_same_basis(*op.basis(), *rho.basis(), "expectation");
    if (!op.hermitian()) throw std::invalid_argument("expectation: operator is not Hermitian");
    return detail::checked_real((rho.data() * op.data()).trace(), "expectation");
}

/// <psi| op |psi>.
inline double expectation(const OperatorMatrix& op, const PureState& psi)
{
    require_same_basis(*op.basis(), *psi.basis(), "expectation");
    if (!op.hermitian()) throw std::invalid_argument("expectation: operator is not Hermitian");
    return detail::checked_real(psi.amplitudes().dot(op.data() * psi.amplitudes()), "expectation");
}

}  // namespace dwell
