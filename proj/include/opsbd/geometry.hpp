#pragma once

/// @file geometry.hpp
/// @brief Planar geometry on the scenario grid: cell centers, line of sight
/// through blocked squares, segment/disk chords and dead-zone truncation.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "opsbd/scenario.hpp"

namespace opsbd {

/// Tolerance, in meters, for every geometric predicate.
inline constexpr double kGeomTol = 1e-9;

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

inline double distance(Point a, Point b) { return std::hypot(b.x - a.x, b.y - a.y); }

struct Polyline {
    std::vector<Point> points;
    double length = 0.0;

    static Polyline from_points(std::vector<Point> pts) {
        Polyline p;
        p.points = std::move(pts);
        for (std::size_t i = 1; i < p.points.size(); ++i) p.length += distance(p.points[i - 1], p.points[i]);
        return p;
    }

    bool empty() const { return points.size() < 2; }
    std::size_t num_segments() const { return points.empty() ? 0 : points.size() - 1; }
    bool operator==(const Polyline&) const = default;
};

/// Center of cell (i, j): ((j - 0.5) * zeta, (i - 0.5) * zeta).
inline Point cell_center(const Scenario& s, CellRef c) {
    return {(c.col - 0.5) * s.cell_size, (c.row - 0.5) * s.cell_size};
}

namespace detail {

// Restricts [tlo, thi] to the parameters where origin + t*dir lies strictly
// inside (lo, hi).
inline void clip_open_slab(double origin, double dir, double lo, double hi, double& tlo, double& thi) {
    if (dir == 0.0) {
        if (!(origin > lo && origin < hi)) {
            tlo = 1.0;
            thi = 0.0;
        }
        return;
    }
    double t1 = (lo - origin) / dir;
    double t2 = (hi - origin) / dir;
    if (t1 > t2) std::swap(t1, t2);
    tlo = std::max(tlo, t1);
    thi = std::min(thi, t2);
}

}  // namespace detail

/// True iff the open segment between the centers of a and b avoids the open
/// interior of every blocked square. Grazing a face or a corner does not block.
inline bool line_of_sight(const Scenario& s, CellRef a, CellRef b) {
    if (a == b) return true;
    if (b < a) std::swap(a, b);  // exact symmetry

    // Cell units: cell (r, c) is the square (c-1, c) x (r-1, r).
    const double ax = a.col - 0.5;
    const double ay = a.row - 0.5;
    const double dx = b.col - a.col;
    const double dy = b.row - a.row;
    const double seg_m = std::hypot(dx, dy) * s.cell_size;
    const double tol = kGeomTol / seg_m;

    const int r_lo = std::min(a.row, b.row);
    const int r_hi = std::max(a.row, b.row);
    for (int r = r_lo; r <= r_hi; ++r) {
        double tlo = 0.0;
        double thi = 1.0;
        detail::clip_open_slab(ay, dy, r - 1.0, static_cast<double>(r), tlo, thi);
        if (thi - tlo <= tol) continue;
        const double x0 = ax + dx * tlo;
        const double x1 = ax + dx * thi;
        const int c_lo = std::max(1, static_cast<int>(std::floor(std::min(x0, x1))) + 1);
        const int c_hi = std::min(s.cols, static_cast<int>(std::ceil(std::max(x0, x1))));
        for (int c = c_lo; c <= c_hi; ++c) {
            if (!s.blocked(CellRef{r, c})) continue;
            double ulo = tlo;
            double uhi = thi;
            detail::clip_open_slab(ax, dx, c - 1.0, static_cast<double>(c), ulo, uhi);
            if (uhi - ulo > tol) return false;
        }
    }
    return true;
}

/// Length of segment pq inside the closed disk (center, radius).
inline double chord_length(Point p, Point q, Point center, double radius) {
    const double dx = q.x - p.x;
    const double dy = q.y - p.y;
    const double len2 = dx * dx + dy * dy;
    if (len2 == 0.0) return 0.0;
    const double len = std::sqrt(len2);
    // Projection of the center onto the supporting line, in meters from p.
    const double along = ((center.x - p.x) * dx + (center.y - p.y) * dy) / len;
    const double fx = p.x + dx * (along / len) - center.x;
    const double fy = p.y + dy * (along / len) - center.y;
    const double h2 = fx * fx + fy * fy;
    const double r2 = radius * radius;
    if (h2 >= r2) return 0.0;
    const double half = std::sqrt(r2 - h2);
    const double lo = std::max(0.0, along - half);
    const double hi = std::min(len, along + half);
    return std::max(0.0, hi - lo);
}

/// Total length of the polyline inside the closed disk.
inline double chord_length(const Polyline& path, Point center, double radius) {
    double sum = 0.0;
    for (std::size_t i = 1; i < path.points.size(); ++i) {
        sum += chord_length(path.points[i - 1], path.points[i], center, radius);
    }
    return sum;
}

/// Prefix of `path` with arc length max(0, length - dead_length). Returns an
/// empty polyline when nothing is left.
inline Polyline truncate_dead_zone(const Polyline& path, double dead_length) {
    if (dead_length <= 0.0) return path;
    const double keep = path.length - dead_length;
    if (keep <= 0.0 || path.points.size() < 2) return {};

    std::vector<Point> out{path.points.front()};
    double walked = 0.0;
    for (std::size_t i = 1; i < path.points.size(); ++i) {
        const Point a = path.points[i - 1];
        const Point b = path.points[i];
        const double seg = distance(a, b);
        if (walked + seg < keep) {
            out.push_back(b);
            walked += seg;
            continue;
        }
        const double t = (keep - walked) / seg;
        if (t >= 1.0) {
            out.push_back(b);
        } else if (t > 0.0) {
            out.push_back({a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t});
        }
        break;
    }
    Polyline result;
    result.points = std::move(out);
    result.length = keep;
    return result;
}

}  // namespace opsbd
