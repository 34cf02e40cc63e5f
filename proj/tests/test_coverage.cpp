#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "support.hpp"

using namespace opsbd;
using opsbd::testing::grid_scenario;

namespace {

CoverageCache cache_for(const Scenario& s, double radius) { return build_cache(s, enumerate_paths(s), radius); }

std::vector<int> brute_dominance(const Scenario& s, const CoverageCache& cache) {
    std::vector<int> d(static_cast<std::size_t>(s.num_cells()), 0);
    for (CellId a = 0; a < s.num_cells(); ++a) {
        for (CellId b = 0; b < s.num_cells(); ++b) {
            if (a == b || s.blocked(b)) continue;
            if (dominated_by(cache.row(a), cache.row(b))) ++d[static_cast<std::size_t>(a)];
        }
    }
    return d;
}

}  // namespace

TEST(Coverage, DiameterChordOnStraightPath) {
    // One row, entrance at column 1, objective at column 22: a 210 m path,
    // 200 m detectable. A detector at column 10 sits on the path.
    std::string row(22, '.');
    row.front() = 'E';
    row.back() = 'O';
    const Scenario s = grid_scenario({row}, 10, {1}, 20);
    const CoverageCache cache = cache_for(s, 20);
    ASSERT_EQ(cache.num_paths(), 1);
    EXPECT_NEAR(cache.path_lengths[0], 200.0, 1e-9);
    EXPECT_NEAR(cache.lambda(s.id({1, 10}), 0), 40.0, 1e-12);
    // Detectable part spans x in [5, 205]; the objective center is at x=215.
    EXPECT_NEAR(cache.lambda(s.id({1, 22}), 0), 10.0, 1e-12);
    EXPECT_NEAR(cache.lambda(s.id({1, 1}), 0), 20.0, 1e-12);
}

TEST(Coverage, LambdaMatchesDirectChordSums) {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        GenParams p = opsbd::testing::desk_params(seed, 12);
        p.blocked_fraction = 0.1;
        const Scenario s = generate_instance(p);
        const PathSet ps = enumerate_paths(s);
        for (double tau : {10.0, 20.0, 40.0}) {
            const CoverageCache cache = build_cache(s, ps, tau);
            for (CellId c = 0; c < s.num_cells(); ++c) {
                for (int k = 0; k < cache.num_paths(); ++k) {
                    const double direct =
                        s.blocked(c) ? 0.0 : chord_length(ps[static_cast<std::size_t>(k)].detectable, cell_center(s, s.ref(c)), tau);
                    ASSERT_NEAR(cache.lambda(c, k), direct, 1e-9);
                    ASSERT_GE(cache.lambda(c, k), 0.0);
                    ASSERT_LE(cache.lambda(c, k), cache.path_lengths[static_cast<std::size_t>(k)] + 1e-9);
                }
            }
        }
    }
}

TEST(Coverage, FarCellsSeeNothing) {
    const Scenario s = grid_scenario({"E.........", "..........", "..........", "..........", "O........."}, 10, {1});
    const CoverageCache cache = cache_for(s, 10);
    // The single path runs down column 1; column 10 is 90 m away.
    for (int row = 1; row <= 5; ++row) EXPECT_EQ(cache.lambda(s.id({row, 10}), 0), 0.0);
}

TEST(Coverage, DominanceMatchesBruteForce) {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const Scenario s = generate_instance(opsbd::testing::tiny_params(seed));
        const CoverageCache cache = cache_for(s, 10);
        const auto brute = brute_dominance(s, cache);
        for (CellId c = 0; c < s.num_cells(); ++c) {
            if (!s.blocked(c)) {
                EXPECT_EQ(cache.delta(c), brute[static_cast<std::size_t>(c)]) << "cell " << c;
            }
        }
    }
}

TEST(Coverage, DominanceDefinitionCases) {
    const std::vector<double> zero{0, 0, 0}, a{1, 2, 3}, b{1, 2, 3}, c{1, 3, 3}, d{2, 1, 3};
    EXPECT_TRUE(dominated_by(zero, a));
    EXPECT_FALSE(dominated_by(a, b));
    EXPECT_FALSE(dominated_by(b, a));
    EXPECT_TRUE(dominated_by(a, c));
    EXPECT_FALSE(dominated_by(c, d));
    EXPECT_FALSE(dominated_by(d, c));
}

TEST(Coverage, ZeroRowsDominatedByEveryPositiveCell) {
    const Scenario s = opsbd::testing::plaza8();
    const CoverageCache cache = cache_for(s, 10);
    int positive = 0;
    for (CellId c = 0; c < s.num_cells(); ++c) {
        const auto row = cache.row(c);
        if (!s.blocked(c) && std::any_of(row.begin(), row.end(), [](double v) { return v > 0; })) ++positive;
    }
    for (CellId c = 0; c < s.num_cells(); ++c) {
        const auto row = cache.row(c);
        if (!s.blocked(c) && std::all_of(row.begin(), row.end(), [](double v) { return v == 0; })) {
            EXPECT_EQ(cache.delta(c), positive);
        }
    }
}

TEST(Coverage, DominanceIsStrictPartialOrder) {
    const Scenario s = generate_instance(opsbd::testing::desk_params(4, 12));
    const CoverageCache cache = cache_for(s, 20);
    std::vector<CellId> cells;
    for (CellId c = 0; c < s.num_cells(); ++c) {
        if (!s.blocked(c)) cells.push_back(c);
    }
    std::mt19937_64 gen(9);
    for (int i = 0; i < 20000; ++i) {
        const CellId x = cells[gen() % cells.size()], y = cells[gen() % cells.size()], z = cells[gen() % cells.size()];
        EXPECT_FALSE(dominated_by(cache.row(x), cache.row(x)));
        if (dominated_by(cache.row(x), cache.row(y))) {
            EXPECT_FALSE(dominated_by(cache.row(y), cache.row(x)));
            if (dominated_by(cache.row(y), cache.row(z))) {
                EXPECT_TRUE(dominated_by(cache.row(x), cache.row(z)));
            }
        }
    }
}

TEST(Coverage, CandidateSetCounting) {
    const Scenario s = opsbd::testing::plaza8();
    const CoverageCache cache = cache_for(s, 10);
    EXPECT_THROW(candidate_set(cache, 0), std::invalid_argument);
    const int unblocked = static_cast<int>(std::count_if(s.grid.begin(), s.grid.end(), [](CellKind k) { return k != CellKind::Blocked; }));
    EXPECT_EQ(static_cast<int>(candidate_set(cache, unblocked).size()), unblocked);
    std::size_t prev = 0;
    for (int d = 1; d <= unblocked; ++d) {
        const auto cs = candidate_set(cache, d);
        EXPECT_GE(cs.size(), prev);
        prev = cs.size();
    }
    // delta = 1 keeps exactly the non-dominated cells.
    for (CellId c : candidate_set(cache, 1)) {
        for (CellId o = 0; o < s.num_cells(); ++o) {
            if (!s.blocked(o)) {
                EXPECT_FALSE(dominated_by(cache.row(c), cache.row(o)));
            }
        }
    }
    // Corner cells far from every path are pruned for small delta.
    const auto cs3 = candidate_set(cache, 3);
    EXPECT_LT(cs3.size(), static_cast<std::size_t>(unblocked));
}

TEST(Coverage, DominanceCsv) {
    const Scenario s = opsbd::testing::plaza8();
    const CoverageCache cache = cache_for(s, 10);
    std::ostringstream out;
    write_dominance_csv(out, s, cache, 3);
    const std::string text = out.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "row,col,kind,delta,candidate");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 65);
}
