#pragma once

#include <string>
#include <vector>

#include "opsbd/opsbd.hpp"

namespace opsbd::testing {

// Grid rows over ". # E O"; objectives take `casualties` in row-major order.
inline Scenario grid_scenario(const std::vector<std::string>& rows, double zeta, std::vector<double> casualties,
                              double radius = 10.0) {
    Scenario s;
    s.name = "t";
    s.rows = static_cast<int>(rows.size());
    s.cols = static_cast<int>(rows.front().size());
    s.cell_size = zeta;
    s.params.radius = radius;
    std::size_t k = 0;
    for (int r = 1; r <= s.rows; ++r) {
        for (int c = 1; c <= s.cols; ++c) {
            const char ch = rows[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(c - 1)];
            CellKind kind = CellKind::Unblocked;
            if (ch == '#') kind = CellKind::Blocked;
            if (ch == 'E') {
                kind = CellKind::Entrance;
                s.entrances.push_back({r, c});
            }
            if (ch == 'O') {
                kind = CellKind::Objective;
                s.objectives.push_back({{r, c}, casualties.at(k++)});
            }
            s.grid.push_back(kind);
        }
    }
    return s;
}

inline std::string samples_dir() { return OPSBD_SAMPLES_DIR; }

inline Scenario plaza8() { return load_scenario(samples_dir() + "/plaza8.json"); }

// 8x8 generated instance with benchmark-grid values for every other parameter.
inline GenParams tiny_params(std::uint64_t seed) {
    GenParams p;
    p.rows = 8;
    p.cols = 8;
    p.cell_size = 10;
    p.entrances_per_side = 2;
    p.objectives = 2;
    p.blocked_fraction = 0.10;
    p.radius = 10;
    p.seed = seed;
    return p;
}

inline GenParams desk_params(std::uint64_t seed, int size = 16) {
    GenParams p;
    p.rows = size;
    p.cols = size;
    p.objectives = 4;
    p.blocked_fraction = 0.05;
    p.radius = 20;
    p.seed = seed;
    return p;
}

}  // namespace opsbd::testing
