#pragma once

/// @file coverage.hpp
/// @brief Detectable-length cache and dominance pruning of candidate cells.
///
/// `lambda(c, p)` is the length of the detectable part of path p inside the
/// detection disk of a detector at the center of cell c. A cell is dominated
/// by another when the other covers at least as much of every path and
/// strictly more of one; cells with at least delta dominators can be
/// replaced without loss and are pruned from the search space.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "opsbd/geometry.hpp"
#include "opsbd/paths.hpp"
#include "opsbd/scenario.hpp"

namespace opsbd {

class CoverageCache {
public:
    CoverageCache() = default;
    CoverageCache(int rows, int cols, int num_paths)
        : rows_(rows), cols_(cols), num_paths_(num_paths),
          lambda_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * static_cast<std::size_t>(num_paths), 0.0),
          delta_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0),
          usable_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int num_cells() const { return rows_ * cols_; }
    int num_paths() const { return num_paths_; }

    double lambda(CellId c, int p) const { return lambda_[index(c, p)]; }
    double& lambda(CellId c, int p) { return lambda_[index(c, p)]; }
    std::span<const double> row(CellId c) const {
        return {lambda_.data() + index(c, 0), static_cast<std::size_t>(num_paths_)};
    }

    /// Number of unblocked cells dominating c.
    int delta(CellId c) const { return delta_[static_cast<std::size_t>(c)]; }
    std::span<const int> deltas() const { return delta_; }
    void set_deltas(std::vector<int> d) { delta_ = std::move(d); }

    /// Unblocked cells may host detectors.
    bool usable(CellId c) const { return usable_[static_cast<std::size_t>(c)] != 0; }
    void set_usable(CellId c, bool u) { usable_[static_cast<std::size_t>(c)] = u ? 1 : 0; }

    /// Detectable (dead-zone truncated) length of each path.
    std::vector<double> path_lengths;

private:
    std::size_t index(CellId c, int p) const {
        return static_cast<std::size_t>(c) * static_cast<std::size_t>(num_paths_) + static_cast<std::size_t>(p);
    }

    int rows_ = 0;
    int cols_ = 0;
    int num_paths_ = 0;
    std::vector<double> lambda_;
    std::vector<int> delta_;
    std::vector<char> usable_;
};

/// True iff `a` is dominated by `b`: a <= b on every path, < on at least one.
inline bool dominated_by(std::span<const double> a, std::span<const double> b) {
    bool strict = false;
    for (std::size_t p = 0; p < a.size(); ++p) {
        if (a[p] > b[p]) return false;
        if (a[p] < b[p]) strict = true;
    }
    return strict;
}

/// Dominator counts over unblocked cells. Cells whose coverage is zero on
/// every path are dominated by exactly the cells with any positive coverage,
/// so only the positive cells are compared pairwise.
inline std::vector<int> dominance_counts(const CoverageCache& cache) {
    const int n = cache.num_cells();
    const std::size_t r = static_cast<std::size_t>(cache.num_paths());
    std::vector<CellId> positive;
    for (CellId c = 0; c < n; ++c) {
        if (!cache.usable(c)) continue;
        const auto row = cache.row(c);
        if (std::any_of(row.begin(), row.end(), [](double v) { return v > 0.0; })) positive.push_back(c);
    }
    std::vector<int> delta(static_cast<std::size_t>(n), static_cast<int>(positive.size()));
    for (CellId c : positive) delta[static_cast<std::size_t>(c)] = 0;

    for (std::size_t i = 0; i < positive.size(); ++i) {
        const auto a = cache.row(positive[i]);
        for (std::size_t j = i + 1; j < positive.size(); ++j) {
            const auto b = cache.row(positive[j]);
            bool a_le = true, b_le = true, a_lt = false, b_lt = false;
            for (std::size_t p = 0; p < r && (a_le || b_le); ++p) {
                if (a[p] < b[p]) {
                    a_lt = true;
                    b_le = false;
                } else if (a[p] > b[p]) {
                    b_lt = true;
                    a_le = false;
                }
            }
            if (a_le && a_lt) ++delta[static_cast<std::size_t>(positive[i])];
            if (b_le && b_lt) ++delta[static_cast<std::size_t>(positive[j])];
        }
    }
    return delta;
}

/// Builds the lambda table for detectors of radius `radius` and fills in the
/// dominance counts.
inline CoverageCache build_cache(const Scenario& s, const PathSet& ps, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("detector radius must be positive");
    const int r = static_cast<int>(ps.size());
    CoverageCache cache(s.rows, s.cols, r);
    for (CellId c = 0; c < s.num_cells(); ++c) cache.set_usable(c, !s.blocked(c));
    cache.path_lengths.reserve(ps.size());

    for (int p = 0; p < r; ++p) {
        const Polyline& path = ps[static_cast<std::size_t>(p)].detectable;
        cache.path_lengths.push_back(path.length);
        for (std::size_t k = 1; k < path.points.size(); ++k) {
            const Point a = path.points[k - 1];
            const Point b = path.points[k];
            // Cells whose center lies within radius of the segment's bounding box.
            const double zeta = s.cell_size;
            const int c_lo = std::max(1, static_cast<int>(std::floor((std::min(a.x, b.x) - radius) / zeta)));
            const int c_hi = std::min(s.cols, static_cast<int>(std::ceil((std::max(a.x, b.x) + radius) / zeta)) + 1);
            const int r_lo = std::max(1, static_cast<int>(std::floor((std::min(a.y, b.y) - radius) / zeta)));
            const int r_hi = std::min(s.rows, static_cast<int>(std::ceil((std::max(a.y, b.y) + radius) / zeta)) + 1);
            for (int row = r_lo; row <= r_hi; ++row) {
                for (int col = c_lo; col <= c_hi; ++col) {
                    const CellRef cell{row, col};
                    const CellId id = s.id(cell);
                    if (!cache.usable(id)) continue;
                    cache.lambda(id, p) += chord_length(a, b, cell_center(s, cell), radius);
                }
            }
        }
    }
    cache.set_deltas(dominance_counts(cache));
    return cache;
}

/// Unblocked cells with fewer than `detectors` dominators, ascending row-major.
inline std::vector<CellId> candidate_set(const CoverageCache& cache, int detectors) {
    if (detectors <= 0) throw std::invalid_argument("number of detectors must be positive");
    std::vector<CellId> out;
    for (CellId c = 0; c < cache.num_cells(); ++c) {
        if (cache.usable(c) && cache.delta(c) < detectors) out.push_back(c);
    }
    return out;
}

/// Dominance map for inspection: one row per cell.
inline void write_dominance_csv(std::ostream& out, const Scenario& s, const CoverageCache& cache, int detectors) {
    out << "row,col,kind,delta,candidate\n";
    for (CellId c = 0; c < s.num_cells(); ++c) {
        const CellRef ref = s.ref(c);
        const bool cand = cache.usable(c) && cache.delta(c) < detectors;
        out << ref.row << ',' << ref.col << ',' << detail::kind_char(s.kind(c)) << ','
            << (cache.usable(c) ? cache.delta(c) : -1) << ',' << (cand ? 1 : 0) << '\n';
    }
}

}  // namespace opsbd
