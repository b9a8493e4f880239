#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dwell/errors.hpp"

namespace dwell {

/// Occupation numbers of the two wells, written |nA, nB>.
struct FockState {
    int n_a = 0;
    int n_b = 0;

    [[nodiscard]] constexpr int total() const { return n_a + n_b; }
    auto operator<=>(const FockState&) const = default;
};

enum class BasisKind { Sector, Full };

/// Ordered two-well Fock basis.
///
/// Sector(N) holds the N+1 states with nA+nB = N, ordered by nA descending.
/// Full(Nmax) concatenates Sector(M) for M = Nmax, Nmax-1, ..., 0, so every
/// fixed-number sector occupies a contiguous block and the vacuum sits last.
/// Instances are immutable and shared through BasisPtr.
class FockBasis {
public:
    [[nodiscard]] BasisKind kind() const { return kind_; }
    /// N for a sector basis, Nmax for a full basis.
    [[nodiscard]] int particles() const { return particles_; }
    [[nodiscard]] std::size_t size() const { return states_.size(); }
    [[nodiscard]] std::span<const FockState> states() const { return states_; }
    [[nodiscard]] const FockState& state(std::size_t i) const { return states_.at(i); }

    [[nodiscard]] std::optional<std::size_t> index_of(const FockState& s) const
    {
        if (s.n_a < 0 || s.n_b < 0) return std::nullopt;
        const int m = s.total();
        if (kind_ == BasisKind::Sector) {
            if (m != particles_) return std::nullopt;
            return static_cast<std::size_t>(particles_ - s.n_a);
        }
        if (m > particles_) return std::nullopt;
        return block_offset(m) + static_cast<std::size_t>(m - s.n_a);
    }

    /// Same descriptor, hence the same ordered state list.
    friend bool operator==(const FockBasis& a, const FockBasis& b)
    {
        return a.kind_ == b.kind_ && a.particles_ == b.particles_;
    }

    [[nodiscard]] std::string describe() const
    {
        return (kind_ == BasisKind::Sector ? "Sector(" : "Full(") + std::to_string(particles_) + ")";
    }

    /// First position of the total-number-m block inside a Full basis.
    [[nodiscard]] std::size_t block_offset(int m) const
    {
        const auto dim = [](int k) { return static_cast<std::size_t>(k + 1) * static_cast<std::size_t>(k + 2) / 2; };
        return dim(particles_) - dim(m);
    }

private:
    friend std::shared_ptr<const FockBasis> sector_basis(int n);
    friend std::shared_ptr<const FockBasis> full_basis(int n_max);

    FockBasis(BasisKind kind, int particles) : kind_(kind), particles_(particles)
    {
        const int top = particles;
        const int bottom = kind == BasisKind::Sector ? particles : 0;
        for (int m = top; m >= bottom; --m)
            for (int a = m; a >= 0; --a) states_.push_back({a, m - a});
    }

    BasisKind kind_;
    int particles_;
    std::vector<FockState> states_;
};

using BasisPtr = std::shared_ptr<const FockBasis>;

inline BasisPtr sector_basis(int n)
{
    if (n < 0) throw std::invalid_argument("sector_basis: particle number must be non-negative");
    return BasisPtr(new FockBasis(BasisKind::Sector, n));
}

inline BasisPtr full_basis(int n_max)
{
    if (n_max < 0) throw std::invalid_argument("full_basis: particle number must be non-negative");
    return BasisPtr(new FockBasis(BasisKind::Full, n_max));
}

struct SectorSlice {
    int total = 0;
    std::size_t begin = 0;
    std::size_t end = 0;

    [[nodiscard]] std::size_t size() const { return end - begin; }
    bool operator==(const SectorSlice&) const = default;
};

/// Contiguous index ranges of the fixed-number blocks of a Full basis, N descending.
inline std::vector<SectorSlice> sector_slices(const FockBasis& basis)
{
    if (basis.kind() != BasisKind::Full)
        throw std::invalid_argument("sector_slices: requires a Full basis, got " + basis.describe());
    std::vector<SectorSlice> out;
    for (int m = basis.particles(); m >= 0; --m) {
        const std::size_t begin = basis.block_offset(m);
        out.push_back({m, begin, begin + static_cast<std::size_t>(m + 1)});
    }
    return out;
}

inline void require_same_basis(const FockBasis& a, const FockBasis& b, const char* where)
{
    if (!(a == b)) throw BasisMismatch(std::string(where) + ": basis mismatch " + a.describe() + " vs " + b.describe());
}

}  // namespace dwell
