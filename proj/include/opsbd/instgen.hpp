#pragma once

/// @file instgen.hpp
/// @brief Seeded random scenario generator.
///
/// Entrances sit on the border (k per side), objectives on interior cells and
/// a fixed fraction of the remaining cells is blocked. Blocked placements are
/// redrawn until every entrance reaches every objective. Casualties at an
/// objective are kappa * rho, rho ~ Normal(mean, sd) truncated below at 0.05
/// persons/m^2, kappa a lethal-area constant in m^2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "opsbd/rng.hpp"
#include "opsbd/scenario.hpp"

namespace opsbd {

struct GenParams {
    int rows = 32;
    int cols = 32;
    double cell_size = 10.0;
    int entrances_per_side = 2;
    int objectives = 4;
    double blocked_fraction = 0.05;
    double radius = 20.0;
    double casualty_scale = 100.0;
    double density_mean = 0.4;
    double density_sd = 0.1;
    std::uint64_t seed = 1;
    std::string name;  // defaults to a name derived from the parameters
};

inline constexpr double kMinDensity = 0.05;
inline constexpr int kMaxBlockedRetries = 1000;

/// Throws std::invalid_argument when `p` is out of range. With `bench_grid`
/// every parameter must come from the published benchmark domains.
inline void check_gen_params(const GenParams& p, bool bench_grid) {
    auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
    if (p.rows < 1 || p.cols < 1) fail("rows and cols must be positive");
    if (!(p.cell_size > 0.0)) fail("cell size must be positive");
    if (p.entrances_per_side < 1) fail("entrances per side must be positive");
    if (p.objectives < 1) fail("objectives must be positive");
    if (!(p.blocked_fraction >= 0.0 && p.blocked_fraction < 1.0)) fail("blocked fraction must lie in [0,1)");
    if (!(p.radius > 0.0)) fail("radius must be positive");
    if (!(p.casualty_scale > 0.0)) fail("casualty scale must be positive");
    if (!(p.density_sd >= 0.0)) fail("density sd must be nonnegative");
    if (p.entrances_per_side > std::min(p.rows, p.cols)) fail("more entrances per side than border cells");
    if (!bench_grid) return;

    auto in = [](double v, std::initializer_list<double> dom) {
        return std::any_of(dom.begin(), dom.end(), [v](double d) { return std::abs(v - d) < 1e-12; });
    };
    if (!in(p.rows, {32, 64, 128}) || !in(p.cols, {32, 64, 128})) fail("benchmark grid: rows/cols must be 32, 64 or 128");
    if (!in(p.cell_size, {5, 10, 20})) fail("benchmark grid: cell size must be 5, 10 or 20 m");
    if (!in(p.entrances_per_side, {2, 3, 4})) fail("benchmark grid: entrances per side must be 2, 3 or 4");
    if (!in(p.objectives, {2, 4, 6, 8})) fail("benchmark grid: objectives must be 2, 4, 6 or 8");
    if (!in(p.blocked_fraction, {0.025, 0.05, 0.10})) fail("benchmark grid: blocked fraction must be 0.025, 0.05 or 0.10");
    if (!in(p.radius, {10, 20, 40})) fail("benchmark grid: radius must be 10, 20 or 40 m");
}

inline int blocked_count(const GenParams& p) {
    return static_cast<int>(std::floor(p.blocked_fraction * p.rows * p.cols + 1e-9));
}

inline Scenario generate_instance(const GenParams& p, bool bench_grid = false) {
    check_gen_params(p, bench_grid);
    Rng rng(p.seed);

    Scenario s;
    s.rows = p.rows;
    s.cols = p.cols;
    s.cell_size = p.cell_size;
    s.grid.assign(static_cast<std::size_t>(p.rows) * static_cast<std::size_t>(p.cols), CellKind::Unblocked);
    s.params.radius = p.radius;
    if (p.name.empty()) {
        s.name = "gen_" + std::to_string(p.rows) + "x" + std::to_string(p.cols) + "_seed" + std::to_string(p.seed);
    } else {
        s.name = p.name;
    }

    // Entrances: top, bottom, left, right. A corner belongs to two sides but
    // can only be drawn once.
    for (int side = 0; side < 4; ++side) {
        int placed = 0;
        int attempts = 0;
        while (placed < p.entrances_per_side) {
            if (++attempts > 100000) throw std::invalid_argument("cannot place entrances on every side");
            CellRef c;
            switch (side) {
                case 0: c = {1, 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(p.cols)))}; break;
                case 1: c = {p.rows, 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(p.cols)))}; break;
                case 2: c = {1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(p.rows))), 1}; break;
                default: c = {1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(p.rows))), p.cols}; break;
            }
            auto& k = s.grid[static_cast<std::size_t>(s.id(c))];
            if (k != CellKind::Unblocked) continue;
            k = CellKind::Entrance;
            ++placed;
        }
    }

    // Objectives on interior cells (any free cell when there is no interior).
    std::vector<CellId> free_cells;
    const bool has_interior = p.rows >= 3 && p.cols >= 3;
    for (CellId id = 0; id < s.num_cells(); ++id) {
        const CellRef c = s.ref(id);
        const bool interior = c.row > 1 && c.row < p.rows && c.col > 1 && c.col < p.cols;
        if (s.kind(id) == CellKind::Unblocked && (interior || !has_interior)) free_cells.push_back(id);
    }
    if (static_cast<int>(free_cells.size()) < p.objectives) throw std::invalid_argument("not enough cells for objectives");
    std::vector<std::pair<CellId, double>> objs;
    for (int j = 0; j < p.objectives; ++j) {
        const auto pick = static_cast<std::size_t>(j) + rng.index(free_cells.size() - static_cast<std::size_t>(j));
        std::swap(free_cells[static_cast<std::size_t>(j)], free_cells[pick]);
        double rho;
        do {
            rho = rng.normal(p.density_mean, p.density_sd);
        } while (rho < kMinDensity);
        objs.emplace_back(free_cells[static_cast<std::size_t>(j)], p.casualty_scale * rho);
    }
    std::sort(objs.begin(), objs.end());
    for (const auto& [id, c] : objs) {
        s.grid[static_cast<std::size_t>(id)] = CellKind::Objective;
        s.objectives.push_back({s.ref(id), c});
    }
    for (CellId id = 0; id < s.num_cells(); ++id) {
        if (s.kind(id) == CellKind::Entrance) s.entrances.push_back(s.ref(id));
    }

    // Blocked cells, redrawn until the attack graph is connected.
    std::vector<CellId> eligible;
    for (CellId id = 0; id < s.num_cells(); ++id) {
        if (s.kind(id) == CellKind::Unblocked) eligible.push_back(id);
    }
    const int n_blocked = blocked_count(p);
    if (n_blocked > static_cast<int>(eligible.size())) throw std::invalid_argument("blocked fraction too large");
    const auto open_grid = s.grid;
    for (int attempt = 0; attempt < kMaxBlockedRetries; ++attempt) {
        s.grid = open_grid;
        auto pool = eligible;
        for (int b = 0; b < n_blocked; ++b) {
            const auto pick = static_cast<std::size_t>(b) + rng.index(pool.size() - static_cast<std::size_t>(b));
            std::swap(pool[static_cast<std::size_t>(b)], pool[pick]);
            s.grid[static_cast<std::size_t>(pool[static_cast<std::size_t>(b)])] = CellKind::Blocked;
        }
        if (validate_scenario(s).empty()) return s;
    }
    throw std::invalid_argument("could not draw a connected blocked layout within the retry limit");
}

}  // namespace opsbd
