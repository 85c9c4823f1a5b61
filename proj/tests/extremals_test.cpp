#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "ellvolterra/extremals.hpp"
#include "test_support.hpp"

using namespace ellvolterra;

namespace {

/// Independent count: try every row for every column and keep assignments
/// that obey the Volterra condition on coordinates 0..ell-1.
std::size_t brute_force_count(std::size_t m, std::size_t ell) {
    std::vector<std::pair<std::size_t, std::size_t>> cols;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) cols.emplace_back(i, j);
    std::size_t total = 1;
    for (std::size_t c = 0; c < cols.size(); ++c) total *= m;
    std::size_t count = 0;
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t rest = code;
        bool ok = true;
        for (auto [i, j] : cols) {
            const std::size_t k = rest % m;
            rest /= m;
            if (k < ell && k != i && k != j) {
                ok = false;
                break;
            }
        }
        if (ok) ++count;
    }
    return count;
}

} // namespace

TEST(ExtremalCount, ReproducesM3Line) {
    EXPECT_EQ(extremal_count(3, 3), 8);
    EXPECT_EQ(extremal_count(3, 2), 48);
    EXPECT_EQ(extremal_count(3, 1), 216);
    EXPECT_EQ(extremal_count_unconstrained(3), 729);
}

TEST(ExtremalCount, FrozenBruteForceValues) {
    // from an exhaustive enumeration over all 0/1 column assignments
    EXPECT_EQ(extremal_count(2, 2), 2);
    EXPECT_EQ(extremal_count(2, 1), 4);
    EXPECT_EQ(extremal_count(2, 0), 8);
    EXPECT_EQ(extremal_count(4, 4), 64);
    EXPECT_EQ(extremal_count(4, 3), 1728);
    EXPECT_EQ(extremal_count(4, 2), 23328);
    EXPECT_EQ(extremal_count(4, 1), 186624);
    EXPECT_EQ(extremal_count(4, 0), 1048576);
}

TEST(ExtremalCount, MatchesBruteForce) {
    for (std::size_t m = 2; m <= 4; ++m)
        for (std::size_t ell = 0; ell <= m; ++ell)
            EXPECT_EQ(extremal_count(m, ell), brute_force_count(m, ell)) << m << "," << ell;
}

TEST(ExtremalCount, MonotoneChain) {
    for (std::size_t m = 2; m <= 9; ++m) {
        for (std::size_t ell = m; ell >= 2; --ell) EXPECT_LT(extremal_count(m, ell), extremal_count(m, ell - 1));
        EXPECT_LT(extremal_count(m, 1), extremal_count_unconstrained(m));
    }
}

TEST(ExtremalCount, ExactForLargeM) {
    // 10^55 does not fit in 64 bits
    EXPECT_EQ(extremal_count_unconstrained(10), BigInt("10000000000000000000000000000000000000000000000000000000"));
    EXPECT_EQ(extremal_count(10, 0), extremal_count_unconstrained(10));
}

TEST(ExtremalCount, DomainErrors) {
    EXPECT_THROW(extremal_count(3, 4), DomainError);
    EXPECT_THROW(extremal_count(1, 0), DomainError);
}

TEST(EnumerateExtremals, M2Ell1) {
    const auto all = enumerate_extremals(2, 1);
    EXPECT_EQ(all.size(), 4u);
}

TEST(EnumerateExtremals, M3Ell2HasNoDuplicates) {
    const auto all = enumerate_extremals(3, 2);
    ASSERT_EQ(all.size(), 48u);
    std::set<std::vector<std::uint8_t>> seen;
    for (const auto& e : all) {
        EXPECT_TRUE(seen.insert(e.rows).second);
        const CubicMatrix v = e.matrix();
        for (std::size_t k = 0; k < 2; ++k) EXPECT_TRUE(volterra_condition_holds(v, k));
    }
    // some of the 48 are fully Volterra: the counting convention does not impose positivity
    const auto volterra = std::count_if(all.begin(), all.end(),
                                        [](const ExtremalOperator& e) { return e.detected_ell == 3; });
    EXPECT_GT(volterra, 0);
}

TEST(EnumerateExtremals, M3Ell3AreTheVolterraVertices) {
    const auto all = enumerate_extremals(3, 3);
    ASSERT_EQ(all.size(), 8u);
    for (const auto& e : all) {
        const CubicMatrix v = e.matrix();
        EXPECT_EQ(e.detected_ell, 3u);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                for (std::size_t k = 0; k < 3; ++k) EXPECT_TRUE(v(i, j, k) == 0.0 || v(i, j, k) == 1.0);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = i + 1; j < 3; ++j) EXPECT_EQ(v(i, j, i) + v(i, j, j), 1.0);
    }
}

TEST(EnumerateExtremals, CountIdentityUpToM4) {
    for (std::size_t m = 2; m <= 4; ++m)
        for (std::size_t ell = 0; ell <= m; ++ell) {
            std::size_t n = 0;
            for_each_extremal(m, ell, [&](const std::vector<std::uint8_t>&) { ++n; });
            EXPECT_EQ(BigInt(n), extremal_count(m, ell));
        }
}

TEST(EnumerateExtremals, LexicographicOrder) {
    const auto all = enumerate_extremals(3, 1);
    for (std::size_t i = 1; i < all.size(); ++i) EXPECT_LT(all[i - 1].rows, all[i].rows);
}

TEST(EnumerateExtremals, SizeGuard) { EXPECT_THROW(enumerate_extremals(5, 5), SizeGuardExceeded); }

TEST(EnumerateExtremals, ConvexCombinationsKeepTheVolterraCondition) {
    const auto all = enumerate_extremals(3, 2);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> lam(1e-6, 1.0 - 1e-6);
    for (std::size_t a = 0; a < all.size(); a += 5)
        for (std::size_t b = a + 1; b < all.size(); b += 7) {
            const CubicMatrix c = convex_combine(all[a].matrix(), all[b].matrix(), lam(rng));
            EXPECT_TRUE(volterra_condition_holds(c, 0));
            EXPECT_TRUE(volterra_condition_holds(c, 1));
        }
}

TEST(SplitAtEntry, HalfColumn) {
    CubicArray p = identity_operator(3).array();  // column (1,2) = (1/2, 1/2, 0)
    const CubicMatrix v = validate(p);
    const auto s = split_at_entry(v, 0, 1, 0);
    EXPECT_EQ(s.alpha, 0.5);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(s.v1(0, 1, k), k == 0 ? 1.0 : 0.0);
        EXPECT_EQ(s.v2(0, 1, k), k == 1 ? 1.0 : 0.0);
        EXPECT_EQ(s.v1(1, 0, k), s.v1(0, 1, k));
    }
    EXPECT_EQ(convex_combine(s.v1, s.v2, s.alpha), v);
}

TEST(SplitAtEntry, RoundTripWithinOneUlp) {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 200; ++t) {
        const std::size_t m = 2 + t % 4;
        const std::size_t ell = static_cast<std::size_t>(t) % (m + 1);
        const CubicMatrix v = testgen::random_operator(m, ell, rng);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j)
                for (std::size_t k = 0; k < m; ++k) {
                    const double x = v(i, j, k);
                    if (x <= 0.0 || x >= 1.0) continue;
                    const auto s = split_at_entry(v, i, j, k);
                    const CubicMatrix back = convex_combine(s.v1, s.v2, s.alpha);
                    for (std::size_t a = 0; a < m; ++a)
                        for (std::size_t b = 0; b < m; ++b)
                            for (std::size_t c = 0; c < m; ++c) {
                                const double want = v(a, b, c);
                                const double got = back(a, b, c);
                                ASSERT_LE(std::abs(got - want), std::nextafter(want, 2.0) - want);
                            }
                    // zero pattern of V is the union of the two zero patterns
                    for (std::size_t c = 0; c < m; ++c) EXPECT_EQ(v(i, j, c) == 0.0, s.v1(i, j, c) == 0.0 && s.v2(i, j, c) == 0.0);
                    // the prefix Volterra condition survives in both halves
                    for (std::size_t c = 0; c < ell; ++c) {
                        EXPECT_TRUE(volterra_condition_holds(s.v1, c));
                        EXPECT_TRUE(volterra_condition_holds(s.v2, c));
                    }
                }
    }
}

TEST(SplitAtEntry, ExtremalOperatorsHaveNoFractionalEntry) {
    for (const auto& e : enumerate_extremals(3, 2)) {
        const CubicMatrix v = e.matrix();
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                for (std::size_t k = 0; k < 3; ++k) EXPECT_THROW(split_at_entry(v, i, j, k), EntryNotFractional);
    }
}
