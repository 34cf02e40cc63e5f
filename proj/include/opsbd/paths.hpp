#pragma once

/// @file paths.hpp
/// @brief Visibility graph over unblocked cell centers and the
/// entrance-to-objective shortest paths followed by the attacker.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <vector>

#include "opsbd/geometry.hpp"
#include "opsbd/scenario.hpp"

namespace opsbd {

/// Complete graph on unblocked cells; an edge exists iff the two centers see
/// each other, with weight zeta * sqrt(di^2 + dj^2).
class VisibilityGraph {
public:
    explicit VisibilityGraph(const Scenario& s) : rows_(s.rows), cols_(s.cols), zeta_(s.cell_size) {
        vertex_of_.assign(static_cast<std::size_t>(s.num_cells()), -1);
        for (CellId id = 0; id < s.num_cells(); ++id) {
            if (s.blocked(id)) continue;
            vertex_of_[static_cast<std::size_t>(id)] = static_cast<int>(cells_.size());
            cells_.push_back(id);
        }
        const std::size_t n = cells_.size();
        words_ = (n + 63) / 64;
        bits_.assign(n * words_, 0);
        for (std::size_t u = 0; u < n; ++u) {
            const CellRef cu = s.ref(cells_[u]);
            for (std::size_t v = u + 1; v < n; ++v) {
                if (line_of_sight(s, cu, s.ref(cells_[v]))) {
                    bits_[u * words_ + v / 64] |= std::uint64_t{1} << (v % 64);
                    bits_[v * words_ + u / 64] |= std::uint64_t{1} << (u % 64);
                }
            }
        }
        offset_len_.resize(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_));
        for (int dr = 0; dr < rows_; ++dr) {
            for (int dc = 0; dc < cols_; ++dc) {
                offset_len_[static_cast<std::size_t>(dr * cols_ + dc)] = zeta_ * std::sqrt(double(dr) * dr + double(dc) * dc);
            }
        }
    }

    std::size_t num_vertices() const { return cells_.size(); }
    CellId cell(std::size_t v) const { return cells_[v]; }
    /// Vertex index of a cell, or -1 when blocked.
    int vertex(CellId id) const { return vertex_of_[static_cast<std::size_t>(id)]; }

    bool visible(std::size_t u, std::size_t v) const {
        return u == v || ((bits_[u * words_ + v / 64] >> (v % 64)) & 1U) != 0;
    }

    /// Edge weight; +inf when the centers do not see each other.
    double weight(std::size_t u, std::size_t v) const {
        if (!visible(u, v)) return std::numeric_limits<double>::infinity();
        return euclid(u, v);
    }

    /// zeta * sqrt(di^2 + dj^2) regardless of obstacles.
    double euclid(std::size_t u, std::size_t v) const {
        const int a = cells_[u];
        const int b = cells_[v];
        const int dr = std::abs(a / cols_ - b / cols_);
        const int dc = std::abs(a % cols_ - b % cols_);
        return offset_len_[static_cast<std::size_t>(dr * cols_ + dc)];
    }

    int cols() const { return cols_; }

private:
    int rows_;
    int cols_;
    double zeta_;
    std::vector<CellId> cells_;
    std::vector<int> vertex_of_;
    std::vector<std::uint64_t> bits_;
    std::size_t words_ = 0;
    std::vector<double> offset_len_;
};

inline VisibilityGraph build_graph(const Scenario& s) { return VisibilityGraph(s); }

/// Single-source shortest paths. Among equal-cost relaxations (within the
/// geometric tolerance) the predecessor with the smaller row-major index wins.
struct ShortestPathTree {
    std::vector<double> dist;  // per vertex; +inf when unreachable
    std::vector<int> pred;     // per vertex; -1 at the source / unreachable
};

inline ShortestPathTree dijkstra(const VisibilityGraph& g, std::size_t source) {
    const std::size_t n = g.num_vertices();
    constexpr double inf = std::numeric_limits<double>::infinity();
    ShortestPathTree t{std::vector<double>(n, inf), std::vector<int>(n, -1)};
    std::vector<char> done(n, 0);
    t.dist[source] = 0.0;
    for (std::size_t iter = 0; iter < n; ++iter) {
        std::size_t u = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (!done[v] && t.dist[v] < inf && (u == n || t.dist[v] < t.dist[u])) u = v;
        }
        if (u == n) break;
        done[u] = 1;
        for (std::size_t v = 0; v < n; ++v) {
            if (done[v] || !g.visible(u, v)) continue;
            const double nd = t.dist[u] + g.euclid(u, v);
            if (nd < t.dist[v] - kGeomTol) {
                t.dist[v] = nd;
                t.pred[v] = static_cast<int>(u);
            } else if (nd <= t.dist[v] + kGeomTol && g.cell(u) < g.cell(static_cast<std::size_t>(t.pred[v]))) {
                t.dist[v] = std::min(t.dist[v], nd);
                t.pred[v] = static_cast<int>(u);
            }
        }
    }
    return t;
}

namespace detail {

// Drops interior vertices that lie on the straight continuation of their
// neighbours. Exact: centers differ by integer cell offsets.
inline std::vector<CellRef> drop_collinear(std::vector<CellRef> cells) {
    if (cells.size() < 3) return cells;
    std::vector<CellRef> out{cells.front()};
    for (std::size_t i = 1; i + 1 < cells.size(); ++i) {
        const CellRef a = out.back();
        const CellRef b = cells[i];
        const CellRef c = cells[i + 1];
        const long long ux = b.col - a.col, uy = b.row - a.row;
        const long long vx = c.col - b.col, vy = c.row - b.row;
        if (ux * vy - uy * vx == 0 && ux * vx + uy * vy > 0) continue;
        out.push_back(b);
    }
    out.push_back(cells.back());
    return out;
}

inline std::vector<CellRef> extract_cells(const Scenario& s, const VisibilityGraph& g, const ShortestPathTree& t,
                                          std::size_t target) {
    std::vector<CellRef> rev;
    for (int v = static_cast<int>(target); v >= 0; v = t.pred[static_cast<std::size_t>(v)]) {
        rev.push_back(s.ref(g.cell(static_cast<std::size_t>(v))));
    }
    return {rev.rbegin(), rev.rend()};
}

inline Polyline polyline_of(const Scenario& s, const std::vector<CellRef>& cells) {
    std::vector<Point> pts;
    pts.reserve(cells.size());
    for (const auto& c : cells) pts.push_back(cell_center(s, c));
    return Polyline::from_points(std::move(pts));
}

}  // namespace detail

/// Minimum-weight path between two unblocked cells as a polyline of cell
/// centers. Unreachable targets yield an empty polyline of infinite length.
inline Polyline shortest_path(const Scenario& s, const VisibilityGraph& g, CellRef from, CellRef to) {
    const int src = g.vertex(s.id(from));
    const int dst = g.vertex(s.id(to));
    if (src < 0 || dst < 0) throw ScenarioError("shortest_path endpoints must be unblocked cells");
    const auto tree = dijkstra(g, static_cast<std::size_t>(src));
    if (!std::isfinite(tree.dist[static_cast<std::size_t>(dst)])) {
        Polyline p;
        p.length = std::numeric_limits<double>::infinity();
        return p;
    }
    return detail::polyline_of(s, detail::drop_collinear(detail::extract_cells(s, g, tree, static_cast<std::size_t>(dst))));
}

struct PathRecord {
    int entrance = 0;    // 0-based index into Scenario::entrances
    int objective = 0;   // 0-based index into Scenario::objectives
    std::vector<CellRef> cells;  // polyline vertices as cells
    Polyline full;       // P_ij
    Polyline detectable; // P_ij minus the dead zone
};

/// The eps*phi attacker paths; path p joins entrance p / phi to objective p % phi.
struct PathSet {
    std::vector<PathRecord> paths;
    int num_objectives = 0;

    std::size_t size() const { return paths.size(); }
    const PathRecord& operator[](std::size_t p) const { return paths[p]; }
};

inline PathSet enumerate_paths(const Scenario& s, const VisibilityGraph& g) {
    PathSet ps;
    ps.num_objectives = s.num_objectives();
    ps.paths.reserve(static_cast<std::size_t>(s.num_paths()));
    const double dead = s.params.dead_length();
    for (int i = 0; i < s.num_entrances(); ++i) {
        const int src = g.vertex(s.id(s.entrances[static_cast<std::size_t>(i)]));
        if (src < 0) throw ScenarioError("entrance on a blocked cell");
        const auto tree = dijkstra(g, static_cast<std::size_t>(src));
        for (int j = 0; j < s.num_objectives(); ++j) {
            const CellRef oc = s.objectives[static_cast<std::size_t>(j)].cell;
            const int dst = g.vertex(s.id(oc));
            if (dst < 0 || !std::isfinite(tree.dist[static_cast<std::size_t>(dst)])) {
                throw ScenarioError("objective " + detail::cell_str(oc) + " unreachable from entrance " +
                                    detail::cell_str(s.entrances[static_cast<std::size_t>(i)]));
            }
            PathRecord rec;
            rec.entrance = i;
            rec.objective = j;
            rec.cells = detail::drop_collinear(detail::extract_cells(s, g, tree, static_cast<std::size_t>(dst)));
            rec.full = detail::polyline_of(s, rec.cells);
            rec.detectable = truncate_dead_zone(rec.full, dead);
            ps.paths.push_back(std::move(rec));
        }
    }
    return ps;
}

inline PathSet enumerate_paths(const Scenario& s) { return enumerate_paths(s, build_graph(s)); }

/// Debug export: one row per polyline vertex.
inline void write_paths_csv(std::ostream& out, const PathSet& ps) {
    out << "path_index,seq,x_m,y_m\n";
    char buf[96];
    for (std::size_t p = 0; p < ps.size(); ++p) {
        const auto& pts = ps[p].full.points;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%zu,%zu,%.12g,%.12g\n", p, k, pts[k].x, pts[k].y);
            out << buf;
        }
    }
}

}  // namespace opsbd
