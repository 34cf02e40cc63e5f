#pragma once

/// @file scenario.hpp
/// @brief Scenario data model: grid, entrances, objectives, attack-choice
/// probabilities and physical parameters, plus its JSON file format.
///
/// Coordinates are 1-based (row, col); row 1 is the top row of the text grid.
/// Internally cells are addressed by their 0-based row-major index (`CellId`).

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace opsbd {

using CellId = std::int32_t;

enum class CellKind : std::uint8_t { Unblocked, Blocked, Entrance, Objective };

struct CellRef {
    int row = 0;
    int col = 0;
    auto operator<=>(const CellRef&) const = default;
};

struct ObjectiveCell {
    CellRef cell;
    double casualties = 0.0;  // C_j, persons
    bool operator==(const ObjectiveCell&) const = default;
};

struct PhysicsParams {
    double eta = 0.06;              // detection rate per meter
    double theta = 0.6;             // neutralization probability once detected
    std::optional<double> radius;   // detector radius tau, meters; no default
    double speed = 1.0;             // attacker speed, m/s
    double neutralize_time = 10.0;  // seconds needed to abort the attack
    bool operator==(const PhysicsParams&) const = default;

    double dead_length() const { return speed * neutralize_time; }
};

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Scenario {
    std::string name;
    int rows = 0;
    int cols = 0;
    double cell_size = 0.0;  // zeta, meters
    std::vector<CellKind> grid;  // row-major, rows*cols
    std::vector<ObjectiveCell> objectives;  // row-major grid order
    std::vector<CellRef> entrances;  // row-major grid order
    /// Explicit entrance-by-objective matrix (row-major, eps*phi), or nullopt
    /// for the uniform choice 1/(eps*phi).
    std::optional<std::vector<double>> gamma;
    PhysicsParams params;

    bool operator==(const Scenario&) const = default;

    int num_cells() const { return rows * cols; }
    int num_entrances() const { return static_cast<int>(entrances.size()); }
    int num_objectives() const { return static_cast<int>(objectives.size()); }
    int num_paths() const { return num_entrances() * num_objectives(); }

    bool contains(CellRef c) const { return c.row >= 1 && c.row <= rows && c.col >= 1 && c.col <= cols; }
    CellId id(CellRef c) const { return (c.row - 1) * cols + (c.col - 1); }
    CellRef ref(CellId id) const { return {id / cols + 1, id % cols + 1}; }
    CellKind kind(CellId id) const { return grid[static_cast<std::size_t>(id)]; }
    CellKind kind(CellRef c) const { return kind(id(c)); }
    bool blocked(CellId id) const { return kind(id) == CellKind::Blocked; }
    bool blocked(CellRef c) const { return blocked(id(c)); }

    /// gamma_ij for entrance i, objective j (both 0-based).
    double gamma_at(int i, int j) const {
        if (!gamma) return 1.0 / static_cast<double>(num_paths());
        return (*gamma)[static_cast<std::size_t>(i * num_objectives() + j)];
    }
};

struct Violation {
    std::string code;
    std::string message;
};

namespace detail {

inline char kind_char(CellKind k) {
    switch (k) {
        case CellKind::Unblocked: return '.';
        case CellKind::Blocked: return '#';
        case CellKind::Entrance: return 'E';
        case CellKind::Objective: return 'O';
    }
    return '?';
}

inline std::string cell_str(CellRef c) {
    return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
}

/// 8-connected component labels over unblocked cells (-1 for blocked).
/// Two cells are joined by a finite visibility-graph path iff they share a
/// label: every visibility segment crosses only unblocked interiors, moving
/// between cells through shared edges or shared corners, and every 8-neighbour
/// step is itself an unobstructed segment.
inline std::vector<int> connected_components(const Scenario& s) {
    std::vector<int> label(static_cast<std::size_t>(s.num_cells()), -1);
    std::vector<CellId> stack;
    int next = 0;
    for (CellId start = 0; start < s.num_cells(); ++start) {
        if (s.blocked(start) || label[static_cast<std::size_t>(start)] >= 0) continue;
        label[static_cast<std::size_t>(start)] = next;
        stack.push_back(start);
        while (!stack.empty()) {
            const CellId cur = stack.back();
            stack.pop_back();
            const int r = cur / s.cols;
            const int c = cur % s.cols;
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    const int nr = r + dr;
                    const int nc = c + dc;
                    if (nr < 0 || nr >= s.rows || nc < 0 || nc >= s.cols) continue;
                    const CellId nb = nr * s.cols + nc;
                    if (s.blocked(nb) || label[static_cast<std::size_t>(nb)] >= 0) continue;
                    label[static_cast<std::size_t>(nb)] = next;
                    stack.push_back(nb);
                }
            }
        }
        ++next;
    }
    return label;
}

/// Every invariant except reachability. Reachability needs a well-formed grid.
inline std::vector<Violation> structural_violations(const Scenario& s) {
    std::vector<Violation> out;
    auto add = [&](std::string code, std::string msg) { out.push_back({std::move(code), std::move(msg)}); };

    if (s.rows < 1 || s.cols < 1) add("grid_shape", "grid dimensions must be positive");
    if (static_cast<long long>(s.grid.size()) != static_cast<long long>(s.rows) * s.cols) {
        add("grid_shape", "grid has " + std::to_string(s.grid.size()) + " cells, expected rows*cols");
        return out;
    }
    if (!(s.cell_size > 0.0) || !std::isfinite(s.cell_size)) add("bad_param", "cell_size must be positive");

    std::vector<CellRef> grid_entrances;
    std::vector<CellRef> grid_objectives;
    for (CellId id = 0; id < s.num_cells(); ++id) {
        if (s.kind(id) == CellKind::Entrance) grid_entrances.push_back(s.ref(id));
        if (s.kind(id) == CellKind::Objective) grid_objectives.push_back(s.ref(id));
    }
    if (grid_entrances.empty()) add("no_entrances", "scenario has no entrances");
    if (s.objectives.empty()) add("no_objectives", "scenario has no objectives");
    if (grid_entrances != s.entrances) add("entrance_mismatch", "entrance list does not match grid markings");

    std::vector<CellRef> listed;
    for (const auto& o : s.objectives) listed.push_back(o.cell);
    if (listed != grid_objectives) add("objective_mismatch", "objective list does not match grid markings in row-major order");

    for (const auto& o : s.objectives) {
        if (!(o.casualties > 0.0) || !std::isfinite(o.casualties)) {
            add("nonpositive_casualties", "objective " + cell_str(o.cell) + " has nonpositive casualties");
        }
    }

    if (s.gamma) {
        const auto& g = *s.gamma;
        if (static_cast<int>(g.size()) != s.num_paths()) {
            add("gamma_shape", "gamma matrix must be entrances x objectives");
        } else {
            double sum = 0.0;
            bool negative = false;
            for (double v : g) {
                if (!(v >= 0.0) || !std::isfinite(v)) negative = true;
                sum += v;
            }
            if (negative) add("gamma_negative", "gamma entries must be nonnegative");
            if (std::abs(sum - 1.0) > 1e-9) add("gamma_not_normalized", "gamma sums to " + std::to_string(sum) + ", expected 1");
        }
    }

    const auto& p = s.params;
    if (!(p.eta > 0.0)) add("bad_param", "eta must be positive");
    if (!(p.theta >= 0.0 && p.theta <= 1.0)) add("bad_param", "theta must lie in [0,1]");
    if (p.radius && !(*p.radius > 0.0)) add("bad_param", "radius must be positive");
    if (!(p.speed > 0.0)) add("bad_param", "speed must be positive");
    if (!(p.neutralize_time >= 0.0)) add("bad_param", "neutralize time must be nonnegative");
    return out;
}

}  // namespace detail

/// Reports every invariant violation, including entrance/objective pairs with
/// no finite path. Never throws.
inline std::vector<Violation> validate_scenario(const Scenario& s) {
    auto out = detail::structural_violations(s);
    const bool shape_ok = std::none_of(out.begin(), out.end(), [](const Violation& v) { return v.code == "grid_shape"; });
    if (!shape_ok) return out;
    const auto label = detail::connected_components(s);
    for (const auto& e : s.entrances) {
        if (!s.contains(e)) continue;
        for (const auto& o : s.objectives) {
            if (!s.contains(o.cell)) continue;
            const int le = label[static_cast<std::size_t>(s.id(e))];
            const int lo = label[static_cast<std::size_t>(s.id(o.cell))];
            if (le < 0 || le != lo) {
                out.push_back({"unreachable_pair", "objective " + detail::cell_str(o.cell) + " unreachable from entrance " +
                                                       detail::cell_str(e)});
            }
        }
    }
    return out;
}

/// Throws ScenarioError carrying every violation when the scenario is invalid.
inline void require_valid(const Scenario& s) {
    const auto v = validate_scenario(s);
    if (v.empty()) return;
    std::string msg = "invalid scenario:";
    for (const auto& x : v) msg += "\n  " + x.code + ": " + x.message;
    throw ScenarioError(msg);
}

inline Scenario scenario_from_json(const nlohmann::json& doc) {
    using nlohmann::json;
    if (!doc.is_object()) throw ScenarioError("malformed document: top level must be an object");
    auto need = [&](const char* key) -> const json& {
        if (!doc.contains(key)) throw ScenarioError(std::string("malformed document: missing key '") + key + "'");
        return doc.at(key);
    };

    Scenario s;
    try {
        s.name = doc.value("name", std::string{});
        s.rows = need("rows").get<int>();
        s.cols = need("cols").get<int>();
        s.cell_size = need("cell_size_m").get<double>();
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("malformed document: ") + e.what());
    }
    if (s.rows < 1 || s.cols < 1) throw ScenarioError("grid dimensions must be positive");

    const json& grid = need("grid");
    if (!grid.is_array() || static_cast<int>(grid.size()) != s.rows) {
        throw ScenarioError("grid must be a list of " + std::to_string(s.rows) + " strings");
    }
    s.grid.reserve(static_cast<std::size_t>(s.rows) * static_cast<std::size_t>(s.cols));
    for (int r = 0; r < s.rows; ++r) {
        if (!grid[static_cast<std::size_t>(r)].is_string()) throw ScenarioError("grid rows must be strings");
        const auto line = grid[static_cast<std::size_t>(r)].get<std::string>();
        if (static_cast<int>(line.size()) != s.cols) {
            throw ScenarioError("grid rows of unequal length: row " + std::to_string(r + 1) + " has " +
                                std::to_string(line.size()) + " cells, expected " + std::to_string(s.cols));
        }
        for (char ch : line) {
            switch (ch) {
                case '.': s.grid.push_back(CellKind::Unblocked); break;
                case '#': s.grid.push_back(CellKind::Blocked); break;
                case 'E': s.grid.push_back(CellKind::Entrance); break;
                case 'O': s.grid.push_back(CellKind::Objective); break;
                default: throw ScenarioError(std::string("unknown cell character '") + ch + "' in row " + std::to_string(r + 1));
            }
        }
    }
    for (CellId id = 0; id < s.num_cells(); ++id) {
        if (s.kind(id) == CellKind::Entrance) s.entrances.push_back(s.ref(id));
    }

    const json& objs = doc.contains("objectives") ? doc.at("objectives") : json::array();
    if (!objs.is_array()) throw ScenarioError("malformed document: objectives must be a list");
    try {
        for (const auto& o : objs) {
            ObjectiveCell oc{{o.at("row").get<int>(), o.at("col").get<int>()}, o.at("casualties").get<double>()};
            if (!s.contains(oc.cell)) throw ScenarioError("objective " + detail::cell_str(oc.cell) + " outside the grid");
            for (const auto& prev : s.objectives) {
                if (prev.cell == oc.cell) throw ScenarioError("duplicate objective coordinates " + detail::cell_str(oc.cell));
            }
            if (s.kind(oc.cell) != CellKind::Objective) {
                throw ScenarioError("objective entry " + detail::cell_str(oc.cell) + " is not marked 'O' in the grid");
            }
            s.objectives.push_back(oc);
        }
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("malformed document: ") + e.what());
    }
    for (CellId id = 0; id < s.num_cells(); ++id) {
        if (s.kind(id) != CellKind::Objective) continue;
        const CellRef c = s.ref(id);
        if (std::none_of(s.objectives.begin(), s.objectives.end(), [&](const ObjectiveCell& o) { return o.cell == c; })) {
            throw ScenarioError("objective " + detail::cell_str(c) + " marked in grid but missing casualty entry");
        }
    }
    if (!std::is_sorted(s.objectives.begin(), s.objectives.end(),
                        [](const ObjectiveCell& a, const ObjectiveCell& b) { return a.cell < b.cell; })) {
        throw ScenarioError("objectives must be listed in row-major grid order");
    }

    if (doc.contains("gamma")) {
        const json& g = doc.at("gamma");
        if (g.is_string()) {
            if (g.get<std::string>() != "uniform") throw ScenarioError("gamma must be \"uniform\" or a matrix");
        } else if (g.is_array()) {
            if (static_cast<int>(g.size()) != s.num_entrances()) throw ScenarioError("gamma must have one row per entrance");
            std::vector<double> m;
            for (const auto& row : g) {
                if (!row.is_array() || static_cast<int>(row.size()) != s.num_objectives()) {
                    throw ScenarioError("gamma rows must have one entry per objective");
                }
                for (const auto& v : row) {
                    if (!v.is_number()) throw ScenarioError("gamma entries must be numbers");
                    m.push_back(v.get<double>());
                }
            }
            s.gamma = std::move(m);
        } else {
            throw ScenarioError("gamma must be \"uniform\" or a matrix");
        }
    }

    if (doc.contains("params")) {
        const json& p = doc.at("params");
        if (!p.is_object()) throw ScenarioError("malformed document: params must be an object");
        try {
            s.params.eta = p.value("eta", s.params.eta);
            s.params.theta = p.value("theta", s.params.theta);
            if (p.contains("radius_m") && !p.at("radius_m").is_null()) s.params.radius = p.at("radius_m").get<double>();
            s.params.speed = p.value("speed_mps", s.params.speed);
            s.params.neutralize_time = p.value("neutralize_s", s.params.neutralize_time);
        } catch (const json::exception& e) {
            throw ScenarioError(std::string("malformed document: ") + e.what());
        }
    }

    const auto v = detail::structural_violations(s);
    if (!v.empty()) throw ScenarioError(v.front().code + ": " + v.front().message);
    return s;
}

inline Scenario parse_scenario(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError(std::string("malformed document: ") + e.what());
    }
    return scenario_from_json(doc);
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

inline nlohmann::ordered_json scenario_to_json(const Scenario& s) {
    nlohmann::ordered_json doc;
    doc["name"] = s.name;
    doc["rows"] = s.rows;
    doc["cols"] = s.cols;
    doc["cell_size_m"] = s.cell_size;
    auto grid = nlohmann::ordered_json::array();
    for (int r = 0; r < s.rows; ++r) {
        std::string line;
        for (int c = 0; c < s.cols; ++c) line.push_back(detail::kind_char(s.grid[static_cast<std::size_t>(r * s.cols + c)]));
        grid.push_back(line);
    }
    doc["grid"] = grid;
    auto objs = nlohmann::ordered_json::array();
    for (const auto& o : s.objectives) {
        nlohmann::ordered_json j;
        j["row"] = o.cell.row;
        j["col"] = o.cell.col;
        j["casualties"] = o.casualties;
        objs.push_back(j);
    }
    doc["objectives"] = objs;
    if (s.gamma) {
        auto g = nlohmann::ordered_json::array();
        for (int i = 0; i < s.num_entrances(); ++i) {
            auto row = nlohmann::ordered_json::array();
            for (int j = 0; j < s.num_objectives(); ++j) row.push_back(s.gamma_at(i, j));
            g.push_back(row);
        }
        doc["gamma"] = g;
    } else {
        doc["gamma"] = "uniform";
    }
    nlohmann::ordered_json p;
    p["eta"] = s.params.eta;
    p["theta"] = s.params.theta;
    if (s.params.radius) p["radius_m"] = *s.params.radius;
    p["speed_mps"] = s.params.speed;
    p["neutralize_s"] = s.params.neutralize_time;
    doc["params"] = p;
    return doc;
}

inline std::string write_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

}  // namespace opsbd
