#pragma once

/// @file oracle.hpp
/// @brief Ground truth for small instances: exhaustive enumeration of
/// placements and Monte-Carlo simulation of the attack.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "opsbd/objective.hpp"
#include "opsbd/rng.hpp"
#include "opsbd/solvers.hpp"

namespace opsbd {

struct ExactResult {
    Solution best;
    std::uint64_t enumerated = 0;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Minimum of W over every delta-subset of the pool (the pruned candidate
/// set, or every unblocked cell). Subsets are visited in lexicographic order
/// and ties keep the first, so the reported cells are the lexicographically
/// smallest optimum. Per-path totals are kept per prefix level, summed in the
/// same order as `evaluate`, so values match it bit for bit.
inline ExactResult exact_best(const Instance& inst, int detectors, bool use_pruning = true,
                              std::uint64_t cap = kDefaultEnumerationCap) {
    if (detectors <= 0) throw std::invalid_argument("number of detectors must be positive");
    std::vector<CellId> pool;
    if (use_pruning) {
        pool = candidate_set(inst.cache(), detectors);
    } else {
        for (CellId c = 0; c < inst.cache().num_cells(); ++c) {
            if (inst.cache().usable(c)) pool.push_back(c);
        }
    }
    const auto k = static_cast<std::size_t>(detectors);
    if (k > pool.size()) throw std::invalid_argument("number of detectors exceeds pool size");
    const auto count = detail::choose_capped(pool.size(), k, cap + 1);
    if (count > cap) throw std::invalid_argument("enumeration cap exceeded");

    const auto r = static_cast<std::size_t>(inst.num_paths());
    const double eta = inst.eta();
    // prefix[level] holds totals after placing idx[0..level-1].
    std::vector<std::vector<double>> prefix(k + 1, std::vector<double>(r, 0.0));
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;

    auto fill_from = [&](std::size_t level) {
        for (std::size_t l = level; l < k; ++l) {
            const auto row = inst.cache().row(pool[idx[l]]);
            for (std::size_t p = 0; p < r; ++p) prefix[l + 1][p] = prefix[l][p] + row[p];
        }
    };

    ExactResult out;
    std::vector<CellId> best_cells;
    fill_from(0);
    while (true) {
        double residual = 0.0;
        for (std::size_t p = 0; p < r; ++p) residual += inst.weight(static_cast<int>(p)) * std::exp(-eta * prefix[k][p]);
        const double w = inst.value_from_residual(residual);
        ++out.enumerated;
        if (w < out.best.value) {
            out.best.value = w;
            best_cells.clear();
            for (std::size_t i = 0; i < k; ++i) best_cells.push_back(pool[idx[i]]);
        }
        // Next combination in lexicographic order.
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == pool.size() - k + (pos - 1)) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
        fill_from(pos - 1);
    }
    out.best.cells = std::move(best_cells);
    return out;
}

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
};

/// Simulates the attack: the attacker picks path p with probability gamma_p;
/// each detector independently raises the alarm with probability
/// 1 - exp(-eta * lambda(detector, p)); an alarm stops the attack with
/// probability theta. Returns the mean casualty count and its standard error.
inline McEstimate monte_carlo_estimate(const Instance& inst, std::span<const CellId> cells, std::uint64_t trials,
                                       std::uint64_t seed) {
    if (trials == 0) throw std::invalid_argument("trials must be at least 1");
    for (CellId c : cells) detail::check_cell(inst, c);
    const auto& s = inst.scenario();
    const int r = inst.num_paths();

    std::vector<double> cumulative;
    std::vector<double> casualties;
    double acc = 0.0;
    for (int p = 0; p < r; ++p) {
        const auto& rec = inst.paths()[static_cast<std::size_t>(p)];
        acc += s.gamma_at(rec.entrance, rec.objective);
        cumulative.push_back(acc);
        casualties.push_back(s.objectives[static_cast<std::size_t>(rec.objective)].casualties);
    }
    // detect[k * r + p]
    std::vector<double> detect;
    detect.reserve(cells.size() * static_cast<std::size_t>(r));
    for (CellId c : cells) {
        for (int p = 0; p < r; ++p) detect.push_back(1.0 - std::exp(-inst.eta() * inst.cache().lambda(c, p)));
    }

    Rng rng(seed);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const double u = rng.uniform() * acc;
        auto p = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        if (p >= cumulative.size()) p = cumulative.size() - 1;
        bool alarm = false;
        for (std::size_t k = 0; k < cells.size() && !alarm; ++k) {
            alarm = rng.uniform() < detect[k * static_cast<std::size_t>(r) + p];
        }
        const bool stopped = alarm && rng.bernoulli(inst.theta());
        const double x = stopped ? 0.0 : casualties[p];
        sum += x;
        sum_sq += x * x;
    }
    const double n = static_cast<double>(trials);
    McEstimate est;
    est.trials = trials;
    est.mean = sum / n;
    if (trials > 1) {
        const double var = std::max(0.0, (sum_sq - n * est.mean * est.mean) / (n - 1.0));
        est.std_error = std::sqrt(var / n);
    }
    return est;
}

}  // namespace opsbd
