#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dwell/basis.hpp"
#include "dwell/state.hpp"

namespace dwell {

struct BlockNegativity {
    int total = 0;  ///< particle number of the sector
    double value = 0.0;
};

struct NegativityReport {
    double value = 0.0;
    std::optional<std::vector<BlockNegativity>> per_block;
};

struct EofBoundReport {
    double F = 0.0;
    double G = 0.0;
    double s = 0.0;
    double bound = 0.0;
};

/// How the symbol N in the negativity-based EoF bound is read.
/// ParticleNumber: N = d - 1, so the upper endpoint N/2 equals the maximal negativity.
/// Dimension: N = d, kept for comparison plots.
enum class BoundReading { ParticleNumber, Dimension };

namespace detail {

/// Sum of |rho_ij| over i < j.
inline double pair_negativity(const ComplexMatrix& rho)
{
    double sum = 0.0;
    for (Eigen::Index j = 1; j < rho.cols(); ++j)
        for (Eigen::Index i = 0; i < j; ++i) sum += std::abs(rho(i, j));
    return sum;
}

inline double xlog2x(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

inline double binary_entropy(double p) { return xlog2x(p) + xlog2x(1.0 - p); }

/// 1 - 4 q clamped at zero; q above 1/4 beyond rounding means an invalid state.
inline double discriminant(double q, const char* where)
{
    constexpr double kSlack = 1e-12;
    if (q > 0.25 + kSlack)
        throw NumericalError(std::string(where) + ": off-diagonal weight " + std::to_string(q)
                             + " exceeds 1/4; not a density matrix");
    return std::sqrt(std::max(0.0, 1.0 - 4.0 * q));
}

inline void require_sector(const FockBasis& basis, const char* where)
{
    if (basis.kind() != BasisKind::Sector)
        throw std::invalid_argument(std::string(where) + ": requires a Sector basis, got " + basis.describe()
                                    + " (use negativity_blocks for Full bases)");
}

/// Block-wise pair negativity of a matrix on a Full basis. Throws if any
/// inter-sector coherence exceeds the tolerance.
inline NegativityReport block_negativity(const FockBasis& basis, const ComplexMatrix& rho,
                                         double coherence_tol = 1e-8)
{
    const auto slices = sector_slices(basis);
    double leak = 0.0;
    for (const auto& a : slices)
        for (const auto& b : slices) {
            if (a.total == b.total) continue;
            leak = std::max(leak, rho.block(static_cast<Eigen::Index>(a.begin), static_cast<Eigen::Index>(b.begin),
                                            static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()))
                                      .cwiseAbs()
                                      .maxCoeff());
        }
    if (leak > coherence_tol)
        throw NumericalError("negativity_blocks: inter-sector coherence " + std::to_string(leak)
                             + " breaks the direct-sum structure");

    NegativityReport report;
    report.per_block.emplace();
    for (const auto& s : slices) {
        const auto n = static_cast<Eigen::Index>(s.size());
        const auto o = static_cast<Eigen::Index>(s.begin);
        const double v = pair_negativity(rho.block(o, o, n, n));
        report.per_block->push_back({s.total, v});
        report.value += v;
    }
    return report;
}

}  // namespace detail

/// Pair-basis negativity: sum of the moduli of the off-diagonal elements.
inline NegativityReport negativity_pair(const DensityMatrix& rho)
{
    detail::require_sector(*rho.basis(), "negativity_pair");
    return {detail::pair_negativity(rho.data()), std::nullopt};
}

/// (||rho^{T_A}||_1 - 1) / 2 evaluated in the full (N+1) x (N+1) product space.
/// Independent of the pair-basis shortcut; used to validate it.
inline double negativity_pt_oracle(const DensityMatrix& rho)
{
    detail::require_sector(*rho.basis(), "negativity_pt_oracle");
    const int n = rho.basis()->particles();
    const Eigen::Index local = n + 1;
    const auto product_index = [local](Eigen::Index a, Eigen::Index b) { return a * local + b; };

    ComplexMatrix pt = ComplexMatrix::Zero(local * local, local * local);
    const auto& states = rho.basis()->states();
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t j = 0; j < states.size(); ++j) {
            // <a b| rho |a' b'>  ->  <a' b| rho^{T_A} |a b'>
            const auto [a, b] = states[i];
            const auto [ap, bp] = states[j];
            pt(product_index(ap, b), product_index(a, bp)) = rho(i, j);
        }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(pt, Eigen::EigenvaluesOnly);
    return (solver.eigenvalues().cwiseAbs().sum() - 1.0) / 2.0;
}

/// Negativity of a state on a Full basis as the sum of its sector-block negativities.
/// The blocks keep their weights inside rho (no renormalization).
inline NegativityReport negativity_blocks(const DensityMatrix& rho)
{
    if (rho.basis()->kind() != BasisKind::Full)
        throw std::invalid_argument("negativity_blocks: requires a Full basis, got " + rho.basis()->describe());
    return detail::block_negativity(*rho.basis(), rho.data());
}

/// Negativity of the U = 0 ground state,
/// 2^-N sum_{k' < k} sqrt(C(N,k) C(N,k')), via log-binomials.
inline double bec_negativity_closed_form(int n)
{
    if (n < 0) throw std::invalid_argument("bec_negativity_closed_form: N must be non-negative");
    std::vector<double> amp(static_cast<std::size_t>(n) + 1);
    const double log_norm = n * std::log(2.0);
    for (int k = 0; k <= n; ++k) {
        const double log_binom = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
        amp[static_cast<std::size_t>(k)] = std::exp(0.5 * (log_binom - log_norm));
    }
    double sum = 0.0;
    for (std::size_t k = 1; k < amp.size(); ++k)
        for (std::size_t kp = 0; kp < k; ++kp) sum += amp[k] * amp[kp];
    return sum;
}

struct GammaSorted {
    /// permutation[new position] = original index.
    std::vector<std::size_t> permutation;
    ComplexMatrix data;
};

/// Simultaneous row/column reordering by Gamma_i^2 = sum_{j != i} |rho_ij|^2, descending.
/// Ties keep their original order.
inline GammaSorted gamma_row_sort(const ComplexMatrix& rho)
{
    const auto d = rho.rows();
    std::vector<double> gamma(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i)
        gamma[static_cast<std::size_t>(i)] = rho.row(i).squaredNorm() - std::norm(rho(i, i));
    std::vector<std::size_t> perm(static_cast<std::size_t>(d));
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return gamma[a] > gamma[b]; });

    ComplexMatrix sorted(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            sorted(i, j) = rho(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]),
                               static_cast<Eigen::Index>(perm[static_cast<std::size_t>(j)]));
    return {std::move(perm), std::move(sorted)};
}

inline GammaSorted gamma_row_sort(const DensityMatrix& rho) { return gamma_row_sort(rho.data()); }

namespace detail {

inline double bound_F(const ComplexMatrix& sorted)
{
    const auto d = sorted.rows();
    double x2 = 0.0;
    for (Eigen::Index j = 1; j < d; ++j) x2 += std::norm(sorted(0, j));
    const double a1 = 0.5 * (1.0 + discriminant(x2, "eof_bound_F"));
    double f = xlog2x(a1);
    for (Eigen::Index j = 1; j < d; ++j) f += xlog2x(std::norm(sorted(0, j)) / a1);
    return f;
}

inline double bound_G(const ComplexMatrix& sorted)
{
    double g = 0.0;
    for (Eigen::Index i = 0; i < sorted.rows(); ++i) {
        const double y2 = sorted.row(i).squaredNorm() - std::norm(sorted(i, i));
        const double root = discriminant(y2, "eof_bound_G");
        g += xlog2x(0.5 * (i == 0 ? 1.0 + root : 1.0 - root));
    }
    return g;
}

}  // namespace detail

/// EoF lower bound from the first row of the Gamma-sorted matrix (ebits).
inline double eof_bound_F(const DensityMatrix& rho) { return detail::bound_F(gamma_row_sort(rho).data); }

/// EoF lower bound from every row of the Gamma-sorted matrix (ebits).
inline double eof_bound_G(const DensityMatrix& rho) { return detail::bound_G(gamma_row_sort(rho).data); }

/// Negativity-based EoF lower bound for a pair-basis state of n particles (ebits).
///
/// With d = n + 1 and gamma = [sqrt(2 neg + 1) + sqrt((d-1)(d - 2 neg - 1))]^2 / d^2:
///   neg <= 3/2 - 2/d :  H2(gamma) + (1 - gamma) log2 N
///   otherwise        :  (2 neg - N)/(N - 1) log2 N + log2(N + 1)
/// where N is n under BoundReading::ParticleNumber and d under BoundReading::Dimension.
inline double eof_bound_s(double negativity, int n, BoundReading reading = BoundReading::ParticleNumber)
{
    if (n < 0) throw std::invalid_argument("eof_bound_s: particle number must be non-negative");
    constexpr double kSlack = 1e-12;
    if (!(negativity >= -kSlack) || negativity > 0.5 * n + kSlack)
        throw std::invalid_argument("eof_bound_s: negativity " + std::to_string(negativity) + " outside [0, "
                                    + std::to_string(0.5 * n) + "]");
    if (n == 0) return 0.0;
    const double neg = std::clamp(negativity, 0.0, 0.5 * n);
    const double d = n + 1.0;
    const double big_n = reading == BoundReading::ParticleNumber ? static_cast<double>(n) : d;

    const double root = std::sqrt(2.0 * neg + 1.0) + std::sqrt(std::max(0.0, (d - 1.0) * (d - 2.0 * neg - 1.0)));
    const double gamma = std::min(1.0, root * root / (d * d));
    if (neg <= 1.5 - 2.0 / (big_n + 1.0)) {
        // log2(1) = 0 drops the second term when N = 1.
        const double tail = big_n > 1.0 ? (1.0 - gamma) * std::log2(big_n) : 0.0;
        return detail::binary_entropy(gamma) + tail;
    }
    return (2.0 * neg - big_n) / (big_n - 1.0) * std::log2(big_n) + std::log2(big_n + 1.0);
}

/// max(F, G, s) for a pair-basis state.
inline EofBoundReport eof_bound(const DensityMatrix& rho, BoundReading reading = BoundReading::ParticleNumber)
{
    detail::require_sector(*rho.basis(), "eof_bound");
    const auto sorted = gamma_row_sort(rho);
    EofBoundReport r;
    r.F = detail::bound_F(sorted.data);
    r.G = detail::bound_G(sorted.data);
    const int n = rho.basis()->particles();
    r.s = eof_bound_s(std::min(detail::pair_negativity(rho.data()), 0.5 * n), n, reading);
    r.bound = std::max({r.F, r.G, r.s});
    return r;
}

/// Exact EoF of a pure pair-basis state: the Shannon entropy of |c_k|^2 (ebits).
inline double pure_state_eof_oracle(const PureState& psi)
{
    detail::require_sector(*psi.basis(), "pure_state_eof_oracle");
    if (std::abs(psi.norm() - 1.0) > 1e-10) throw std::invalid_argument("pure_state_eof_oracle: state is not normalized");
    double s = 0.0;
    for (Eigen::Index k = 0; k < psi.amplitudes().size(); ++k) s += detail::xlog2x(std::norm(psi.amplitudes()(k)));
    return s;
}

}  // namespace dwell
