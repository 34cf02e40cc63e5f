#pragma once

/// @file objective.hpp
/// @brief Expected-casualty objective and the precomputed problem instance.
///
/// For a placement with per-path covered lengths L_p (summed over detectors,
/// which act independently):
///
///     W = (1 - theta) * B + theta * sum_p gamma_p * C_p * exp(-eta * L_p)
///
/// where B = sum_p gamma_p * C_p is the casualty count with no detectors.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "opsbd/coverage.hpp"
#include "opsbd/paths.hpp"
#include "opsbd/scenario.hpp"

namespace opsbd {

/// A set of distinct detector cells (ascending row-major ids) and its W.
struct Solution {
    std::vector<CellId> cells;
    double value = std::numeric_limits<double>::infinity();

    bool operator==(const Solution&) const = default;
};

/// Nonzero coverage of one path by one cell.
struct PathHit {
    int path;
    double lambda;
    double factor;  // exp(-eta * lambda)
};

/// Scenario plus everything precomputed before search starts: paths, the
/// coverage cache, per-path weights and sparse per-cell hit lists.
class Instance {
public:
    Instance(Scenario s, PathSet ps, CoverageCache cache, double radius)
        : scenario_(std::move(s)), paths_(std::move(ps)), cache_(std::move(cache)), radius_(radius) {
        const int r = cache_.num_paths();
        weights_.reserve(static_cast<std::size_t>(r));
        for (int p = 0; p < r; ++p) {
            const auto& rec = paths_[static_cast<std::size_t>(p)];
            const double w = scenario_.gamma_at(rec.entrance, rec.objective) *
                             scenario_.objectives[static_cast<std::size_t>(rec.objective)].casualties;
            weights_.push_back(w);
            baseline_ += w;
        }
        hit_offset_.reserve(static_cast<std::size_t>(cache_.num_cells()) + 1);
        hit_offset_.push_back(0);
        const double eta = scenario_.params.eta;
        for (CellId c = 0; c < cache_.num_cells(); ++c) {
            for (int p = 0; p < r; ++p) {
                const double l = cache_.lambda(c, p);
                if (l > 0.0) hits_.push_back({p, l, std::exp(-eta * l)});
            }
            hit_offset_.push_back(hits_.size());
        }
    }

    const Scenario& scenario() const { return scenario_; }
    const PathSet& paths() const { return paths_; }
    const CoverageCache& cache() const { return cache_; }
    double radius() const { return radius_; }
    int num_paths() const { return cache_.num_paths(); }
    double eta() const { return scenario_.params.eta; }
    double theta() const { return scenario_.params.theta; }

    /// gamma_p * C_p
    double weight(int p) const { return weights_[static_cast<std::size_t>(p)]; }
    std::span<const double> weights() const { return weights_; }
    double baseline() const { return baseline_; }

    std::span<const PathHit> hits(CellId c) const {
        return {hits_.data() + hit_offset_[static_cast<std::size_t>(c)],
                hit_offset_[static_cast<std::size_t>(c) + 1] - hit_offset_[static_cast<std::size_t>(c)]};
    }

    /// W from the residual sum S = sum_p w_p exp(-eta L_p).
    double value_from_residual(double residual) const { return (1.0 - theta()) * baseline_ + theta() * residual; }

private:
    Scenario scenario_;
    PathSet paths_;
    CoverageCache cache_;
    double radius_;
    std::vector<double> weights_;
    double baseline_ = 0.0;
    std::vector<PathHit> hits_;
    std::vector<std::size_t> hit_offset_;
};

/// Validates the scenario and runs all precomputation. `radius` overrides the
/// scenario's detector radius; one of the two must be present.
inline Instance make_instance(Scenario s, std::optional<double> radius = std::nullopt) {
    if (radius) s.params.radius = *radius;
    if (!s.params.radius) throw ScenarioError("detector radius not given (scenario params.radius_m or --radius)");
    require_valid(s);
    const double tau = *s.params.radius;
    const auto graph = build_graph(s);
    PathSet ps = enumerate_paths(s, graph);
    CoverageCache cache = build_cache(s, ps, tau);
    return Instance(std::move(s), std::move(ps), std::move(cache), tau);
}

/// B = sum_ij gamma_ij * C_j
inline double baseline_casualties(const Scenario& s) {
    double b = 0.0;
    for (int i = 0; i < s.num_entrances(); ++i) {
        for (int j = 0; j < s.num_objectives(); ++j) b += s.gamma_at(i, j) * s.objectives[static_cast<std::size_t>(j)].casualties;
    }
    return b;
}

namespace detail {

inline void check_cell(const Instance& inst, CellId c) {
    if (c < 0 || c >= inst.cache().num_cells()) throw std::invalid_argument("detector cell outside the grid");
    if (!inst.cache().usable(c)) throw std::invalid_argument("detector cell is blocked");
}

inline double residual_sum(const Instance& inst, std::span<const double> covered) {
    double s = 0.0;
    const double eta = inst.eta();
    for (int p = 0; p < inst.num_paths(); ++p) s += inst.weight(p) * std::exp(-eta * covered[static_cast<std::size_t>(p)]);
    return s;
}

}  // namespace detail

/// Per-path covered lengths L_p, summing cells in ascending id order.
inline std::vector<double> coverage_totals(const Instance& inst, std::span<const CellId> cells) {
    std::vector<CellId> sorted(cells.begin(), cells.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> covered(static_cast<std::size_t>(inst.num_paths()), 0.0);
    for (CellId c : sorted) {
        detail::check_cell(inst, c);
        const auto row = inst.cache().row(c);
        for (std::size_t p = 0; p < covered.size(); ++p) covered[p] += row[p];
    }
    return covered;
}

/// Expected casualties of a placement. Depends only on the set of cells.
inline double evaluate(const Instance& inst, std::span<const CellId> cells) {
    const auto covered = coverage_totals(inst, cells);
    return inst.value_from_residual(detail::residual_sum(inst, covered));
}

inline double evaluate(const Instance& inst, std::initializer_list<CellId> cells) {
    return evaluate(inst, std::span<const CellId>(cells.begin(), cells.size()));
}

/// W after replacing `out_cell` by `in_cell`, updating L_p incrementally.
inline std::pair<double, std::vector<double>> evaluate_swap(const Instance& inst, std::span<const CellId> sol,
                                                            CellId out_cell, CellId in_cell,
                                                            std::span<const double> covered) {
    if (out_cell == in_cell) throw std::invalid_argument("swap cells must differ");
    if (std::find(sol.begin(), sol.end(), out_cell) == sol.end()) throw std::invalid_argument("swapped-out cell not in solution");
    if (std::find(sol.begin(), sol.end(), in_cell) != sol.end()) throw std::invalid_argument("swapped-in cell already in solution");
    detail::check_cell(inst, in_cell);
    std::vector<double> next(covered.begin(), covered.end());
    const auto out_row = inst.cache().row(out_cell);
    const auto in_row = inst.cache().row(in_cell);
    for (std::size_t p = 0; p < next.size(); ++p) next[p] = next[p] - out_row[p] + in_row[p];
    const double w = inst.value_from_residual(detail::residual_sum(inst, next));
    return {w, std::move(next)};
}

/// Running totals for a partial placement, used by the constructive and
/// local-search solvers. `value_with(d)` scores the placement extended by d
/// in O(paths touched by d).
class PlacementState {
public:
    explicit PlacementState(const Instance& inst)
        : inst_(&inst), covered_(static_cast<std::size_t>(inst.num_paths()), 0.0),
          residual_(inst.weights().begin(), inst.weights().end()) {
        refresh_sum();
    }

    PlacementState(const Instance& inst, std::span<const CellId> cells) : PlacementState(inst) {
        for (CellId c : cells) push(c);
        refresh();
    }

    void add(CellId c) {
        push(c);
        refresh();
    }

    void remove(CellId c) {
        const auto it = std::find(cells_.begin(), cells_.end(), c);
        if (it == cells_.end()) throw std::invalid_argument("cell not in placement");
        cells_.erase(it);
        std::fill(covered_.begin(), covered_.end(), 0.0);
        auto cells = std::move(cells_);
        cells_.clear();
        for (CellId x : cells) push(x);
        refresh();
    }

    std::span<const CellId> cells() const { return cells_; }
    std::span<const double> covered() const { return covered_; }
    bool contains(CellId c) const { return std::find(cells_.begin(), cells_.end(), c) != cells_.end(); }

    double value() const { return inst_->value_from_residual(residual_sum_); }

    double value_with(CellId d) const {
        double s = residual_sum_;
        for (const PathHit& h : inst_->hits(d)) s += residual_[static_cast<std::size_t>(h.path)] * (h.factor - 1.0);
        return inst_->value_from_residual(s);
    }

private:
    void push(CellId c) {
        detail::check_cell(*inst_, c);
        cells_.push_back(c);
        for (const PathHit& h : inst_->hits(c)) covered_[static_cast<std::size_t>(h.path)] += h.lambda;
    }

    void refresh() {
        const double eta = inst_->eta();
        for (std::size_t p = 0; p < covered_.size(); ++p) residual_[p] = inst_->weight(static_cast<int>(p)) * std::exp(-eta * covered_[p]);
        refresh_sum();
    }

    void refresh_sum() {
        residual_sum_ = 0.0;
        for (double r : residual_) residual_sum_ += r;
    }

    const Instance* inst_;
    std::vector<CellId> cells_;
    std::vector<double> covered_;
    std::vector<double> residual_;
    double residual_sum_ = 0.0;
};

/// Canonical solution record: sorted cells, value from the full evaluation.
inline Solution make_solution(const Instance& inst, std::vector<CellId> cells) {
    std::sort(cells.begin(), cells.end());
    Solution s;
    s.value = evaluate(inst, cells);
    s.cells = std::move(cells);
    return s;
}

}  // namespace opsbd
