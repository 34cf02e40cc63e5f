#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace opsbd;
using opsbd::testing::grid_scenario;

namespace {

// Exact rational visibility test. Coordinates are in half-cell units so every
// center and square corner is an integer.
struct Frac {
    long long n, d;  // d > 0
};
bool less(Frac a, Frac b) { return a.n * b.d < b.n * a.d; }
Frac make(long long n, long long d) { return d < 0 ? Frac{-n, -d} : Frac{n, d}; }

bool segment_hits_open_square(long long ax, long long ay, long long bx, long long by, long long x0, long long x1,
                              long long y0, long long y1) {
    Frac lo{0, 1}, hi{1, 1};
    auto axis = [&](long long o, long long dir, long long l, long long h) {
        if (dir == 0) {
            if (!(l < o && o < h)) hi = {-1, 1};
            return;
        }
        Frac t1 = make(l - o, dir), t2 = make(h - o, dir);
        if (less(t2, t1)) std::swap(t1, t2);
        if (less(lo, t1)) lo = t1;
        if (less(t2, hi)) hi = t2;
    };
    axis(ax, bx - ax, x0, x1);
    axis(ay, by - ay, y0, y1);
    return less(lo, hi);
}

bool oracle_los(const Scenario& s, CellRef a, CellRef b) {
    const long long ax = 2LL * a.col - 1, ay = 2LL * a.row - 1, bx = 2LL * b.col - 1, by = 2LL * b.row - 1;
    for (CellId id = 0; id < s.num_cells(); ++id) {
        if (!s.blocked(id)) continue;
        const CellRef c = s.ref(id);
        if (segment_hits_open_square(ax, ay, bx, by, 2LL * c.col - 2, 2LL * c.col, 2LL * c.row - 2, 2LL * c.row)) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST(Geometry, CellCenter) {
    const Scenario s = grid_scenario({"E..", "..O"}, 10, {1});
    const Point p = cell_center(s, {2, 3});
    EXPECT_DOUBLE_EQ(p.x, 25.0);
    EXPECT_DOUBLE_EQ(p.y, 15.0);
}

TEST(Geometry, LineOfSightBasics) {
    const Scenario s = grid_scenario({"E.#.O", "....."}, 10, {1});
    EXPECT_TRUE(line_of_sight(s, {1, 1}, {1, 2}));
    EXPECT_FALSE(line_of_sight(s, {1, 1}, {1, 5}));  // straight through the middle of (1,3)
    EXPECT_TRUE(line_of_sight(s, {2, 1}, {2, 5}));
}

TEST(Geometry, GrazingCornerPasses) {
    // The segment (1,1) -> (2,4) touches the shared corner of (1,3) and (2,2)
    // without entering either square.
    const Scenario s = grid_scenario({"E.#.", ".#.O"}, 10, {1});
    EXPECT_TRUE(oracle_los(s, {1, 1}, {2, 4}));
    EXPECT_TRUE(line_of_sight(s, {1, 1}, {2, 4}));
    EXPECT_TRUE(line_of_sight(s, {2, 4}, {1, 1}));
    // Diagonal squeeze between two blocked cells touching at a corner.
    const Scenario d = grid_scenario({"E#", "#O"}, 10, {1});
    EXPECT_TRUE(line_of_sight(d, {1, 1}, {2, 2}));
    // Through the middle of (1,2); the row below is clear.
    const Scenario f = grid_scenario({"E#O", "..."}, 10, {1});
    EXPECT_FALSE(line_of_sight(f, {1, 1}, {1, 3}));
    EXPECT_TRUE(line_of_sight(f, {2, 1}, {2, 3}));
}

TEST(Geometry, LineOfSightMatchesExactOracle) {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 40; ++trial) {
        const int rows = 3 + static_cast<int>(gen() % 8), cols = 3 + static_cast<int>(gen() % 8);
        std::vector<std::string> g(static_cast<std::size_t>(rows), std::string(static_cast<std::size_t>(cols), '.'));
        for (auto& row : g) {
            for (auto& ch : row) {
                if (gen() % 4 == 0) ch = '#';
            }
        }
        g[0][0] = 'E';
        g.back().back() = 'O';
        const Scenario s = grid_scenario(g, 10, {1});
        for (CellId a = 0; a < s.num_cells(); ++a) {
            for (CellId b = 0; b < s.num_cells(); ++b) {
                if (s.blocked(a) || s.blocked(b)) continue;
                ASSERT_EQ(line_of_sight(s, s.ref(a), s.ref(b)), oracle_los(s, s.ref(a), s.ref(b)))
                    << "trial " << trial << " " << a << "->" << b;
            }
        }
    }
}

TEST(Geometry, ChordExamples) {
    EXPECT_NEAR(chord_length({-100, 0}, {100, 0}, {0, 0}, 20), 40.0, 1e-12);
    EXPECT_NEAR(chord_length({-100, 10}, {100, 10}, {0, 0}, 20), 2.0 * std::sqrt(400.0 - 100.0), 1e-12);
    EXPECT_NEAR(chord_length({-100, 10}, {100, 10}, {0, 0}, 20), 34.64102, 1e-5);
    EXPECT_EQ(chord_length({-100, 30}, {100, 30}, {0, 0}, 20), 0.0);
    // Segment ending inside the disk.
    EXPECT_NEAR(chord_length({-100, 0}, {5, 0}, {0, 0}, 20), 25.0, 1e-12);
    // Segment entirely inside.
    EXPECT_NEAR(chord_length({-3, 1}, {4, 1}, {0, 0}, 20), 7.0, 1e-12);
    // Degenerate segment.
    EXPECT_EQ(chord_length({1, 1}, {1, 1}, {0, 0}, 20), 0.0);
}

TEST(Geometry, ChordProperties) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-60, 60), rad(0.5, 40);
    for (int i = 0; i < 5000; ++i) {
        const Point p{u(gen), u(gen)}, q{u(gen), u(gen)}, c{u(gen), u(gen)};
        const double tau = rad(gen);
        const double full = chord_length(p, q, c, tau);
        EXPECT_GE(full, 0.0);
        EXPECT_LE(full, std::min(distance(p, q), 2 * tau) + 1e-9);
        EXPECT_NEAR(full, chord_length(q, p, c, tau), 1e-9);
        EXPECT_LE(full, chord_length(p, q, c, tau * 1.3) + 1e-12);
        const double t = std::uniform_real_distribution<double>(0, 1)(gen);
        const Point r{p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
        EXPECT_NEAR(full, chord_length(p, r, c, tau) + chord_length(r, q, c, tau), 1e-9);
    }
}

TEST(Geometry, PolylineChordSumsSegments) {
    const Polyline path = Polyline::from_points({{-50, 0}, {0, 0}, {0, 50}});
    EXPECT_NEAR(path.length, 100.0, 1e-12);
    EXPECT_NEAR(chord_length(path, {0, 0}, 10), 20.0, 1e-12);
}

TEST(Geometry, TruncateDeadZone) {
    const Polyline path = Polyline::from_points({{0, 0}, {30, 0}, {30, 20}});
    ASSERT_NEAR(path.length, 50.0, 1e-12);
    const Polyline cut = truncate_dead_zone(path, 10);
    EXPECT_NEAR(cut.length, 40.0, 1e-12);
    ASSERT_EQ(cut.points.size(), 3u);
    EXPECT_NEAR(cut.points.back().x, 30.0, 1e-12);
    EXPECT_NEAR(cut.points.back().y, 10.0, 1e-12);
    // Manual segment sums of the prefix.
    EXPECT_NEAR(distance(cut.points[0], cut.points[1]) + distance(cut.points[1], cut.points[2]), 40.0, 1e-12);

    const Polyline shortp = Polyline::from_points({{0, 0}, {8, 0}});
    EXPECT_TRUE(truncate_dead_zone(shortp, 10).empty());
    EXPECT_EQ(truncate_dead_zone(shortp, 10).length, 0.0);

    const Polyline same = truncate_dead_zone(path, 0);
    EXPECT_EQ(same.points.size(), path.points.size());
    EXPECT_EQ(same.length, path.length);
}

TEST(Geometry, TruncationLengthLaw) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-100, 100), dl(0, 150);
    for (int i = 0; i < 2000; ++i) {
        std::vector<Point> pts;
        const int n = 2 + static_cast<int>(gen() % 5);
        for (int k = 0; k < n; ++k) pts.push_back({u(gen), u(gen)});
        const Polyline path = Polyline::from_points(pts);
        const double d = dl(gen);
        EXPECT_NEAR(truncate_dead_zone(path, d).length, std::max(0.0, path.length - d), 1e-9);
    }
}
