#include <gtest/gtest.h>

#include "dwell/basis.hpp"

using namespace dwell;

namespace {

std::vector<FockState> states_of(const BasisPtr& b) { return {b->states().begin(), b->states().end()}; }

}  // namespace

TEST(SectorBasis, SmallCases)
{
    EXPECT_EQ(states_of(sector_basis(0)), (std::vector<FockState>{{0, 0}}));
    EXPECT_EQ(states_of(sector_basis(2)), (std::vector<FockState>{{2, 0}, {1, 1}, {0, 2}}));

    const auto b5 = sector_basis(5);
    ASSERT_EQ(b5->size(), 6u);
    EXPECT_EQ(b5->state(0), (FockState{5, 0}));
    EXPECT_EQ(b5->state(5), (FockState{0, 5}));
    EXPECT_EQ(b5->kind(), BasisKind::Sector);
}

TEST(SectorBasis, RejectsNegative) { EXPECT_THROW(sector_basis(-1), std::invalid_argument); }

TEST(FullBasis, SmallCases)
{
    EXPECT_EQ(states_of(full_basis(1)), (std::vector<FockState>{{1, 0}, {0, 1}, {0, 0}}));
    EXPECT_EQ(states_of(full_basis(2)),
              (std::vector<FockState>{{2, 0}, {1, 1}, {0, 2}, {1, 0}, {0, 1}, {0, 0}}));
    EXPECT_EQ(full_basis(5)->size(), 21u);
}

TEST(FullBasis, SectorSlices)
{
    EXPECT_EQ(sector_slices(*full_basis(1)), (std::vector<SectorSlice>{{1, 0, 2}, {0, 2, 3}}));
    EXPECT_EQ(sector_slices(*full_basis(2)), (std::vector<SectorSlice>{{2, 0, 3}, {1, 3, 5}, {0, 5, 6}}));
    EXPECT_EQ(sector_slices(*full_basis(0)), (std::vector<SectorSlice>{{0, 0, 1}}));
    EXPECT_THROW(sector_slices(*sector_basis(3)), std::invalid_argument);
}

TEST(BasisProperties, SectorSizesAndTotals)
{
    for (int n = 0; n <= 40; ++n) {
        const auto b = sector_basis(n);
        ASSERT_EQ(b->size(), static_cast<std::size_t>(n + 1));
        for (std::size_t i = 0; i < b->size(); ++i) {
            EXPECT_EQ(b->state(i).total(), n);
            if (i > 0) EXPECT_LT(b->state(i).n_a, b->state(i - 1).n_a);
        }
    }
}

TEST(BasisProperties, FullIsConcatenationOfSectors)
{
    for (int nmax = 0; nmax <= 12; ++nmax) {
        std::vector<FockState> concat;
        for (int m = nmax; m >= 0; --m) {
            const auto s = states_of(sector_basis(m));
            concat.insert(concat.end(), s.begin(), s.end());
        }
        const auto full = full_basis(nmax);
        EXPECT_EQ(states_of(full), concat);
        EXPECT_EQ(full->size(), static_cast<std::size_t>((nmax + 1) * (nmax + 2) / 2));
    }
}

TEST(BasisProperties, IndexInvertsPosition)
{
    for (int n = 0; n <= 10; ++n) {
        for (const auto& b : {sector_basis(n), full_basis(n)}) {
            for (std::size_t i = 0; i < b->size(); ++i) EXPECT_EQ(b->index_of(b->state(i)), i);
        }
        EXPECT_FALSE(sector_basis(n)->index_of({n + 1, 0}).has_value());
        EXPECT_FALSE(full_basis(n)->index_of({n, 1}).has_value());
        EXPECT_FALSE(full_basis(n)->index_of({-1, 1}).has_value());
    }
}

TEST(BasisIdentity, DescriptorEquality)
{
    EXPECT_EQ(*sector_basis(3), *sector_basis(3));
    EXPECT_FALSE(*sector_basis(3) == *full_basis(3));
    EXPECT_THROW(require_same_basis(*sector_basis(2), *sector_basis(3), "test"), BasisMismatch);
}
