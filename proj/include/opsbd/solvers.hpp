#pragma once

/// @file solvers.hpp
/// @brief Detector-placement heuristics: Greedy, GRASP (optionally followed by
/// hill climbing), random-restart Hill Climbing, a steady-state EA and a UMDA
/// over GRASP decision vectors.
///
/// All stochastic solvers draw from `Rng` only, so runs under an evaluation
/// budget are reproducible bit for bit. Ties are broken towards the smaller
/// row-major cell index everywhere.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <iterator>
#include <limits>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "opsbd/budget.hpp"
#include "opsbd/coverage.hpp"
#include "opsbd/objective.hpp"
#include "opsbd/rng.hpp"

namespace opsbd {

/// RCL ranks of the first delta-1 placements of a guided construction.
struct DecisionVector {
    std::vector<std::uint32_t> ranks;
    bool operator==(const DecisionVector&) const = default;
};

namespace detail {

inline std::vector<CellId> search_pool(const Instance& inst, int detectors) {
    auto pool = candidate_set(inst.cache(), detectors);
    if (static_cast<std::size_t>(detectors) > pool.size()) {
        throw std::invalid_argument("number of detectors (" + std::to_string(detectors) + ") exceeds candidate count (" +
                                    std::to_string(pool.size()) + ")");
    }
    return pool;
}

struct Extension {
    CellId cell;
    double value;
};

/// Values of every single-cell extension of `state` by a cell of `pool`.
inline std::vector<Extension> extensions(const PlacementState& state, std::span<const CellId> pool, BudgetClock* clock) {
    std::vector<Extension> cl;
    cl.reserve(pool.size());
    for (CellId d : pool) cl.push_back({d, state.value_with(d)});
    if (clock) clock->charge(pool.size());
    return cl;
}

/// Restricted candidate list sorted by (value, cell).
inline std::vector<Extension> restricted_list(std::vector<Extension> cl, double alpha) {
    if (cl.empty()) throw std::invalid_argument("empty candidate pool");
    double lo = cl.front().value;
    double hi = cl.front().value;
    for (const auto& e : cl) {
        lo = std::min(lo, e.value);
        hi = std::max(hi, e.value);
    }
    const double mu = alpha >= 1.0 ? hi : lo + alpha * (hi - lo);
    std::erase_if(cl, [mu](const Extension& e) { return e.value > mu; });
    std::sort(cl.begin(), cl.end(), [](const Extension& a, const Extension& b) {
        return a.value < b.value || (a.value == b.value && a.cell < b.cell);
    });
    return cl;
}

inline void take(std::vector<CellId>& pool, CellId c) { pool.erase(std::find(pool.begin(), pool.end(), c)); }

inline std::vector<CellId> random_subset(std::span<const CellId> pool, int k, Rng& rng) {
    std::vector<CellId> tmp(pool.begin(), pool.end());
    for (int i = 0; i < k; ++i) {
        const auto j = static_cast<std::size_t>(i) + rng.index(tmp.size() - static_cast<std::size_t>(i));
        std::swap(tmp[static_cast<std::size_t>(i)], tmp[j]);
    }
    tmp.resize(static_cast<std::size_t>(k));
    std::sort(tmp.begin(), tmp.end());
    return tmp;
}

inline void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
}

}  // namespace detail

/// Places detectors one at a time, each time adding the candidate that
/// minimizes the extended placement's W.
inline Solution greedy(const Instance& inst, int detectors, BudgetClock* clock = nullptr) {
    auto pool = detail::search_pool(inst, detectors);
    PlacementState state(inst);
    for (int step = 0; step < detectors; ++step) {
        const auto cl = detail::extensions(state, pool, clock);
        const detail::Extension* best = &cl.front();
        for (const auto& e : cl) {
            if (e.value < best->value) best = &e;
        }
        const CellId chosen = best->cell;
        state.add(chosen);
        detail::take(pool, chosen);
    }
    return make_solution(inst, {state.cells().begin(), state.cells().end()});
}

struct Construction {
    Solution solution;
    DecisionVector decisions;
};

/// One GRASP construction. Each step keeps the extensions with value
/// <= min + alpha * (max - min) and picks one uniformly; the rank of the pick
/// within the sorted RCL is recorded for the first delta-1 steps.
inline Construction grasp_construct(const Instance& inst, int detectors, double alpha, Rng& rng,
                                    BudgetClock* clock = nullptr) {
    detail::check_alpha(alpha);
    auto pool = detail::search_pool(inst, detectors);
    PlacementState state(inst);
    Construction out;
    for (int step = 0; step < detectors; ++step) {
        const auto rcl = detail::restricted_list(detail::extensions(state, pool, clock), alpha);
        const auto rank = rng.index(rcl.size());
        const CellId chosen = rcl[rank].cell;
        if (step + 1 < detectors) out.decisions.ranks.push_back(static_cast<std::uint32_t>(rank));
        state.add(chosen);
        detail::take(pool, chosen);
    }
    out.solution = make_solution(inst, {state.cells().begin(), state.cells().end()});
    return out;
}

/// Replays a construction: step i takes the RCL element of rank
/// min(x_i, |RCL|-1); the last detector is placed greedily. `applied`, when
/// given, receives the ranks after clamping.
inline Solution decode_decision_vector(const Instance& inst, int detectors, double alpha, const DecisionVector& x,
                                       BudgetClock* clock = nullptr, DecisionVector* applied = nullptr) {
    detail::check_alpha(alpha);
    if (x.ranks.size() + 1 != static_cast<std::size_t>(detectors)) {
        throw std::invalid_argument("decision vector length must be detectors - 1");
    }
    auto pool = detail::search_pool(inst, detectors);
    PlacementState state(inst);
    if (applied) applied->ranks.clear();
    for (int step = 0; step < detectors; ++step) {
        const auto rcl = detail::restricted_list(detail::extensions(state, pool, clock), alpha);
        std::size_t rank = 0;
        if (step + 1 < detectors) {
            rank = std::min<std::size_t>(x.ranks[static_cast<std::size_t>(step)], rcl.size() - 1);
            if (applied) applied->ranks.push_back(static_cast<std::uint32_t>(rank));
        }
        const CellId chosen = rcl[rank].cell;
        state.add(chosen);
        detail::take(pool, chosen);
    }
    return make_solution(inst, {state.cells().begin(), state.cells().end()});
}

/// First-improvement single-swap descent. For each position, every candidate
/// not currently placed is tried and any strictly better swap is accepted on
/// the spot; sweeps repeat until one passes without improvement. Stops early,
/// keeping the current placement, when `clock` runs out.
inline Solution hill_climb(const Instance& inst, int detectors, std::vector<CellId> start, BudgetClock* clock = nullptr,
                           TraceRecorder* trace = nullptr) {
    if (start.size() != static_cast<std::size_t>(detectors)) throw std::invalid_argument("start must place every detector");
    const auto pool = detail::search_pool(inst, detectors);
    std::vector<char> placed(static_cast<std::size_t>(inst.cache().num_cells()), 0);
    for (CellId c : start) {
        detail::check_cell(inst, c);
        if (placed[static_cast<std::size_t>(c)]) throw std::invalid_argument("start repeats a cell");
        placed[static_cast<std::size_t>(c)] = 1;
    }
    std::vector<CellId> sol = std::move(start);

    bool improvement = true;
    bool stopped = false;
    while (improvement && !stopped) {
        improvement = false;
        for (std::size_t i = 0; i < sol.size() && !stopped; ++i) {
            std::vector<CellId> others;
            others.reserve(sol.size() - 1);
            for (std::size_t k = 0; k < sol.size(); ++k) {
                if (k != i) others.push_back(sol[k]);
            }
            const PlacementState base(inst, others);
            double current = base.value_with(sol[i]);
            for (CellId d : pool) {
                if (placed[static_cast<std::size_t>(d)]) continue;
                if (clock) {
                    if (clock->exhausted()) {
                        stopped = true;
                        break;
                    }
                    clock->charge();
                }
                const double v = base.value_with(d);
                if (v < current) {
                    placed[static_cast<std::size_t>(sol[i])] = 0;
                    placed[static_cast<std::size_t>(d)] = 1;
                    sol[i] = d;
                    current = v;
                    improvement = true;
                    if (trace) trace->offer(make_solution(inst, sol));
                }
            }
        }
    }
    return make_solution(inst, std::move(sol));
}

/// Deterministic greedy wrapped as an anytime run (a single trace event).
inline RunTrace greedy_run(const Instance& inst, int detectors, Budget budget) {
    BudgetClock clock(budget);
    TraceRecorder rec(clock);
    rec.offer(greedy(inst, detectors, &clock));
    return rec.finish();
}

/// Repeated GRASP constructions until the budget runs out; with
/// `local_search` each construction is followed by hill climbing. The first
/// construction always completes.
inline RunTrace grasp_run(const Instance& inst, int detectors, double alpha, Budget budget, std::uint64_t seed,
                          bool local_search = false) {
    detail::check_alpha(alpha);
    Rng rng(seed);
    BudgetClock clock(budget);
    TraceRecorder rec(clock);
    do {
        auto built = grasp_construct(inst, detectors, alpha, rng, &clock);
        rec.offer(built.solution);
        if (local_search) rec.offer(hill_climb(inst, detectors, built.solution.cells, &clock, &rec));
    } while (!clock.exhausted());
    return rec.finish();
}

/// Random-restart hill climbing from uniform random placements.
inline RunTrace hc_run(const Instance& inst, int detectors, Budget budget, std::uint64_t seed) {
    const auto pool = detail::search_pool(inst, detectors);
    Rng rng(seed);
    BudgetClock clock(budget);
    TraceRecorder rec(clock);
    do {
        auto start = detail::random_subset(pool, detectors, rng);
        clock.charge();
        rec.offer(make_solution(inst, start));
        rec.offer(hill_climb(inst, detectors, std::move(start), &clock, &rec));
    } while (!clock.exhausted());
    return rec.finish();
}

struct EaParams {
    int pop_size = 100;
    double crossover = 0.9;
    double mutation = -1.0;  // per-gene probability; negative means 1/delta
};

namespace detail {

/// C(n, k), saturating at `cap`.
inline std::uint64_t choose_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    long double acc = 1.0L;
    for (std::uint64_t i = 1; i <= k; ++i) {
        acc = acc * static_cast<long double>(n - k + i) / static_cast<long double>(i);
        if (acc >= static_cast<long double>(cap)) return cap;
    }
    return static_cast<std::uint64_t>(acc + 0.5L);
}

}  // namespace detail

/// Steady-state EA over placements: binary tournaments, union-sampling
/// recombination, per-gene replacement mutation and replace-worst. The
/// population never holds two equal cell sets; duplicate offspring are dropped.
inline RunTrace ea_run(const Instance& inst, int detectors, EaParams params, Budget budget, std::uint64_t seed) {
    if (params.pop_size < 2) throw std::invalid_argument("population size must be at least 2");
    const auto pool = detail::search_pool(inst, detectors);
    const auto n_pop = static_cast<std::size_t>(params.pop_size);
    if (detail::choose_capped(pool.size(), static_cast<std::uint64_t>(detectors), n_pop) < n_pop) {
        throw std::invalid_argument("population size exceeds the number of distinct placements");
    }
    const double pm = params.mutation < 0.0 ? 1.0 / detectors : params.mutation;

    Rng rng(seed);
    BudgetClock clock(budget);
    TraceRecorder rec(clock);

    std::vector<Solution> pop;
    std::set<std::vector<CellId>> members;
    pop.reserve(n_pop);
    while (pop.size() < n_pop) {
        auto cells = detail::random_subset(pool, detectors, rng);
        if (members.contains(cells)) continue;
        members.insert(cells);
        clock.charge();
        pop.push_back(make_solution(inst, std::move(cells)));
        rec.offer(pop.back());
    }

    auto tournament = [&]() -> const Solution& {
        const auto a = rng.index(n_pop);
        const auto b = rng.index(n_pop);
        return pop[a].value <= pop[b].value ? pop[a] : pop[b];
    };

    std::vector<char> in_child(static_cast<std::size_t>(inst.cache().num_cells()), 0);
    while (!clock.exhausted()) {
        std::vector<CellId> child;
        if (rng.bernoulli(params.crossover)) {
            const Solution& p1 = tournament();
            const Solution& p2 = tournament();
            std::vector<CellId> joined;
            std::set_union(p1.cells.begin(), p1.cells.end(), p2.cells.begin(), p2.cells.end(), std::back_inserter(joined));
            child = detail::random_subset(joined, detectors, rng);
        } else {
            child = pop[rng.index(n_pop)].cells;
        }

        for (CellId c : child) in_child[static_cast<std::size_t>(c)] = 1;
        if (pool.size() > child.size()) {
            for (auto& gene : child) {
                if (!rng.bernoulli(pm)) continue;
                CellId repl;
                do {
                    repl = pool[rng.index(pool.size())];
                } while (in_child[static_cast<std::size_t>(repl)]);
                in_child[static_cast<std::size_t>(gene)] = 0;
                in_child[static_cast<std::size_t>(repl)] = 1;
                gene = repl;
            }
        }
        for (CellId c : child) in_child[static_cast<std::size_t>(c)] = 0;

        clock.charge();
        Solution offspring = make_solution(inst, std::move(child));
        rec.offer(offspring);
        if (members.contains(offspring.cells)) continue;

        std::size_t worst = 0;
        for (std::size_t k = 1; k < n_pop; ++k) {
            if (pop[k].value > pop[worst].value) worst = k;
        }
        members.erase(pop[worst].cells);
        members.insert(offspring.cells);
        pop[worst] = std::move(offspring);
    }
    return rec.finish();
}

/// Independent per-position distributions over RCL ranks.
class UnivariateModel {
public:
    /// Frequencies of each rank among `vectors`, mixed with the uniform
    /// distribution over 0..K_i (K_i the largest rank seen at position i)
    /// with weight `smoothing`.
    static UnivariateModel from_vectors(std::span<const DecisionVector> vectors, double smoothing) {
        if (vectors.empty()) throw std::invalid_argument("cannot build a model from no vectors");
        UnivariateModel m;
        const std::size_t len = vectors.front().ranks.size();
        m.tables_.resize(len);
        for (std::size_t i = 0; i < len; ++i) {
            std::uint32_t k_max = 0;
            for (const auto& v : vectors) k_max = std::max(k_max, v.ranks[i]);
            std::vector<double> counts(static_cast<std::size_t>(k_max) + 1, 0.0);
            for (const auto& v : vectors) counts[v.ranks[i]] += 1.0;
            const double n = static_cast<double>(vectors.size());
            const double floor = smoothing / static_cast<double>(counts.size());
            for (auto& c : counts) c = (1.0 - smoothing) * (c / n) + floor;
            m.tables_[i] = std::move(counts);
        }
        return m;
    }

    /// Point mass on the given vector (no smoothing).
    static UnivariateModel point_mass(const DecisionVector& x) {
        UnivariateModel m;
        for (auto r : x.ranks) {
            std::vector<double> t(static_cast<std::size_t>(r) + 1, 0.0);
            t.back() = 1.0;
            m.tables_.push_back(std::move(t));
        }
        return m;
    }

    DecisionVector sample(Rng& rng) const {
        DecisionVector x;
        x.ranks.reserve(tables_.size());
        for (const auto& t : tables_) {
            const double u = rng.uniform();
            double acc = 0.0;
            std::uint32_t pick = static_cast<std::uint32_t>(t.size() - 1);
            for (std::size_t v = 0; v < t.size(); ++v) {
                acc += t[v];
                if (u < acc) {
                    pick = static_cast<std::uint32_t>(v);
                    break;
                }
            }
            // Never land on a zero-probability tail through rounding.
            while (pick > 0 && t[pick] == 0.0) --pick;
            x.ranks.push_back(pick);
        }
        return x;
    }

    std::size_t length() const { return tables_.size(); }
    const std::vector<double>& table(std::size_t i) const { return tables_[i]; }

private:
    std::vector<std::vector<double>> tables_;
};

struct UmdaParams {
    int pop_size = 100;
    int select_size = 50;
    double alpha = 0.1;
    double smoothing = 0.01;
};

/// UMDA over GRASP decision vectors. The initial model comes from pop_size
/// GRASP constructions; each generation samples pop_size vectors, decodes
/// them, keeps the best select_size and refits the model on their (clamped)
/// ranks.
inline RunTrace umda_run(const Instance& inst, int detectors, UmdaParams params, Budget budget, std::uint64_t seed) {
    if (params.pop_size < 2) throw std::invalid_argument("population size must be at least 2");
    if (params.select_size < 1 || params.select_size >= params.pop_size) {
        throw std::invalid_argument("selection size must be in [1, population size)");
    }
    detail::check_alpha(params.alpha);
    detail::search_pool(inst, detectors);

    Rng rng(seed);
    BudgetClock clock(budget);
    TraceRecorder rec(clock);
    const auto n_pop = static_cast<std::size_t>(params.pop_size);

    std::vector<DecisionVector> vectors;
    std::vector<double> values;
    for (std::size_t k = 0; k < n_pop; ++k) {
        auto built = grasp_construct(inst, detectors, params.alpha, rng, &clock);
        rec.offer(built.solution);
        vectors.push_back(std::move(built.decisions));
        if (clock.exhausted()) return rec.finish();
    }
    auto model = UnivariateModel::from_vectors(vectors, params.smoothing);

    auto sample_population = [&]() -> bool {
        vectors.clear();
        values.clear();
        for (std::size_t k = 0; k < n_pop; ++k) {
            DecisionVector applied;
            const Solution s = decode_decision_vector(inst, detectors, params.alpha, model.sample(rng), &clock, &applied);
            rec.offer(s);
            vectors.push_back(std::move(applied));
            values.push_back(s.value);
            if (clock.exhausted()) return false;
        }
        return true;
    };

    while (sample_population()) {
        std::vector<std::size_t> order(vectors.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<DecisionVector> selected;
        for (std::size_t k = 0; k < static_cast<std::size_t>(params.select_size); ++k) selected.push_back(vectors[order[k]]);
        model = UnivariateModel::from_vectors(selected, params.smoothing);
    }
    return rec.finish();
}

/// Algorithm selector shared by the CLI and the benchmark harness.
struct AlgorithmSpec {
    std::string name = "hc";  // greedy | grasp | grasp+hc | hc | ea | umda
    std::string label;        // display name; defaults to name (with alpha)
    double alpha = 0.1;
    EaParams ea;
    UmdaParams umda;  // umda.alpha is taken from `alpha`

    std::string display() const {
        if (!label.empty()) return label;
        if (name == "grasp" || name == "grasp+hc" || name == "umda") {
            char buf[32];
            std::snprintf(buf, sizeof buf, "@%g", alpha);
            return name + buf;
        }
        return name;
    }
};

inline std::string canonical_algorithm(std::string name) {
    if (name == "grasp-hc") return "grasp+hc";
    static const std::set<std::string> known{"greedy", "grasp", "grasp+hc", "hc", "ea", "umda"};
    if (!known.contains(name)) throw std::invalid_argument("unknown algorithm '" + name + "'");
    return name;
}

inline RunTrace run_algorithm(const Instance& inst, int detectors, const AlgorithmSpec& spec, Budget budget,
                              std::uint64_t seed) {
    const std::string name = canonical_algorithm(spec.name);
    if (name == "greedy") return greedy_run(inst, detectors, budget);
    if (name == "grasp") return grasp_run(inst, detectors, spec.alpha, budget, seed, false);
    if (name == "grasp+hc") return grasp_run(inst, detectors, spec.alpha, budget, seed, true);
    if (name == "hc") return hc_run(inst, detectors, budget, seed);
    if (name == "ea") return ea_run(inst, detectors, spec.ea, budget, seed);
    UmdaParams umda = spec.umda;
    umda.alpha = spec.alpha;
    return umda_run(inst, detectors, umda, budget, seed);
}

}  // namespace opsbd
