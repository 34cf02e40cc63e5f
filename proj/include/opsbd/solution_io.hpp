#pragma once

/// @file solution_io.hpp
/// @brief Solution documents: detectors, value, detector count, scenario
/// name, algorithm and seed.

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opsbd/objective.hpp"

namespace opsbd {

inline nlohmann::ordered_json solution_to_json(const Scenario& s, const Solution& sol, const std::string& algorithm,
                                               std::uint64_t seed) {
    nlohmann::ordered_json j;
    auto dets = nlohmann::ordered_json::array();
    for (CellId c : sol.cells) {
        const CellRef r = s.ref(c);
        dets.push_back({{"row", r.row}, {"col", r.col}});
    }
    j["detectors"] = dets;
    j["value"] = sol.value;
    j["delta"] = sol.cells.size();
    j["scenario_name"] = s.name;
    j["algorithm"] = algorithm;
    j["seed"] = seed;
    return j;
}

/// Detector cells of a solution document, validated against `s`.
inline std::vector<CellId> solution_cells_from_json(const nlohmann::json& j, const Scenario& s) {
    std::vector<CellId> cells;
    for (const auto& d : j.at("detectors")) {
        const CellRef r{d.at("row").get<int>(), d.at("col").get<int>()};
        if (!s.contains(r)) throw std::invalid_argument("detector " + detail::cell_str(r) + " outside the grid");
        if (s.blocked(r)) throw std::invalid_argument("detector " + detail::cell_str(r) + " on a blocked cell");
        const CellId id = s.id(r);
        if (std::find(cells.begin(), cells.end(), id) != cells.end()) {
            throw std::invalid_argument("detector " + detail::cell_str(r) + " listed twice");
        }
        cells.push_back(id);
    }
    return cells;
}

inline std::vector<CellId> load_solution_cells(const std::string& path, const Scenario& s) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return solution_cells_from_json(nlohmann::json::parse(in), s);
}

}  // namespace opsbd
