#pragma once

/// @file bench.hpp
/// @brief Benchmark harness: runs an (instance x algorithm x seed) matrix,
/// scores every run against the per-instance best known value, and computes
/// mean ranks, the Friedman statistic and qualified runtime distributions.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "opsbd/budget.hpp"
#include "opsbd/instgen.hpp"
#include "opsbd/objective.hpp"
#include "opsbd/scenario.hpp"
#include "opsbd/solvers.hpp"

namespace opsbd {

/// Numbers in every exported table: 12 significant digits.
inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct GeneratedSource {
    GenParams params;
    int replicas = 1;  // replica k uses seed params.seed + k
    bool bench_grid = false;
};

struct BenchConfig {
    std::vector<std::string> scenario_files;
    std::vector<Scenario> scenarios;  // in-memory sources
    std::vector<GeneratedSource> generated;
    std::vector<AlgorithmSpec> algorithms;
    std::vector<int> detectors{8};
    std::optional<double> radius;
    Budget budget = Budget::eval_count(100000);
    std::map<int, Budget> budget_by_size;  // keyed by max(rows, cols)
    std::vector<std::uint64_t> seeds{1};
    int jobs = 0;  // 0: hardware threads - 1 (at least 1)
    double quality_eps = 0.0;

    Budget budget_for(const Scenario& s) const {
        const auto it = budget_by_size.find(std::max(s.rows, s.cols));
        return it == budget_by_size.end() ? budget : it->second;
    }
};

struct ResultRow {
    std::string instance;
    std::string algorithm;
    std::uint64_t seed = 0;
    double final_w = 0.0;
    double best_known = 0.0;
    double deviation = 0.0;
    double elapsed_to_final = 0.0;
    std::uint64_t evaluations = 0;
    std::string error;  // empty when the run succeeded

    bool ok() const { return error.empty(); }
};

struct TraceRecord {
    std::string instance;
    std::string algorithm;
    std::uint64_t seed = 0;
    RunTrace trace;
};

struct DeviationSummary {
    std::size_t count = 0;
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
    double upper_whisker = 0.0;  // Q3 + 1.5 IQR
};

struct BenchSummary {
    std::vector<std::string> algorithms;  // display order
    std::map<std::string, DeviationSummary> deviations;
    std::map<std::string, double> mean_ranks;
    std::size_t ranked_instances = 0;
    double friedman = 0.0;
};

struct BenchResult {
    std::vector<ResultRow> rows;
    std::vector<TraceRecord> traces;
    BenchSummary summary;
};

/// Linear-interpolation quantile (type 7) of sorted data.
inline double quantile_sorted(const std::vector<double>& v, double q) {
    if (v.empty()) return 0.0;
    const double h = (static_cast<double>(v.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline DeviationSummary summarize(std::vector<double> v) {
    DeviationSummary d;
    d.count = v.size();
    if (v.empty()) return d;
    std::sort(v.begin(), v.end());
    d.min = v.front();
    d.max = v.back();
    d.q1 = quantile_sorted(v, 0.25);
    d.median = quantile_sorted(v, 0.5);
    d.q3 = quantile_sorted(v, 0.75);
    double sum = 0.0;
    for (double x : v) sum += x;
    d.mean = sum / static_cast<double>(v.size());
    d.upper_whisker = d.q3 + 1.5 * (d.q3 - d.q1);
    return d;
}

/// Ranks of `values` (1 = smallest); tied values share their average rank.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

/// Mean rank of each column over the rows of `table` (rows = instances,
/// columns = algorithms, lower value = better).
inline std::vector<double> mean_ranks(const std::vector<std::vector<double>>& table) {
    if (table.empty()) return {};
    std::vector<double> acc(table.front().size(), 0.0);
    for (const auto& row : table) {
        const auto r = average_ranks(row);
        for (std::size_t j = 0; j < r.size(); ++j) acc[j] += r[j];
    }
    for (auto& a : acc) a /= static_cast<double>(table.size());
    return acc;
}

/// Friedman chi-square: 12N / (k(k+1)) * (sum_j R_j^2 - k(k+1)^2 / 4), with
/// R_j the mean rank of algorithm j over N instances.
inline double friedman_statistic(const std::vector<double>& mean_rank, std::size_t instances) {
    const double k = static_cast<double>(mean_rank.size());
    const double n = static_cast<double>(instances);
    if (k < 2 || n < 1) return 0.0;
    double sum_sq = 0.0;
    for (double r : mean_rank) sum_sq += r * r;
    return 12.0 * n / (k * (k + 1.0)) * (sum_sq - k * (k + 1.0) * (k + 1.0) / 4.0);
}

struct QrtdCurve {
    std::string algorithm;
    std::vector<double> times;
    std::vector<double> success;  // fraction of runs at quality target by time t
};

/// For each algorithm, the fraction of its runs whose best-so-far reached
/// best_known * (1 + quality_eps) by each time in `grid`.
inline std::vector<QrtdCurve> compute_qrtd(const std::vector<TraceRecord>& traces,
                                           const std::map<std::string, double>& best_known,
                                           const std::vector<double>& grid, double quality_eps = 0.0) {
    if (traces.empty()) throw std::invalid_argument("no traces to analyse");
    std::vector<std::string> algos;
    for (const auto& t : traces) {
        if (std::find(algos.begin(), algos.end(), t.algorithm) == algos.end()) algos.push_back(t.algorithm);
    }
    std::vector<QrtdCurve> out;
    for (const auto& a : algos) {
        std::vector<double> hit_times;
        std::size_t runs = 0;
        for (const auto& t : traces) {
            if (t.algorithm != a) continue;
            ++runs;
            const auto bk = best_known.find(t.instance);
            if (bk == best_known.end()) continue;
            const double target = bk->second * (1.0 + quality_eps);
            for (const auto& e : t.trace.events) {
                if (e.best_w <= target) {
                    hit_times.push_back(e.elapsed_s);
                    break;
                }
            }
        }
        QrtdCurve c;
        c.algorithm = a;
        c.times = grid;
        for (double g : grid) {
            const auto n = std::count_if(hit_times.begin(), hit_times.end(), [g](double h) { return h <= g; });
            c.success.push_back(runs == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(runs));
        }
        out.push_back(std::move(c));
    }
    return out;
}

/// Per-instance minimum final value over all traces.
inline std::map<std::string, double> best_known_values(const std::vector<TraceRecord>& traces) {
    std::map<std::string, double> bk;
    for (const auto& t : traces) {
        const double v = t.trace.best.value;
        auto [it, fresh] = bk.emplace(t.instance, v);
        if (!fresh) it->second = std::min(it->second, v);
    }
    return bk;
}

/// Fills best-known values, deviations and the summary from finished rows.
inline BenchSummary score_rows(std::vector<ResultRow>& rows, const std::vector<std::string>& algorithms) {
    std::map<std::string, double> bk;
    for (const auto& r : rows) {
        if (!r.ok()) continue;
        auto [it, fresh] = bk.emplace(r.instance, r.final_w);
        if (!fresh) it->second = std::min(it->second, r.final_w);
    }
    BenchSummary sum;
    sum.algorithms = algorithms;
    std::map<std::string, std::vector<double>> devs;
    for (auto& r : rows) {
        if (!r.ok()) continue;
        r.best_known = bk.at(r.instance);
        r.deviation = (r.final_w - r.best_known) / r.best_known;
        devs[r.algorithm].push_back(r.deviation);
    }
    for (const auto& a : algorithms) sum.deviations[a] = summarize(devs[a]);

    // Mean final value per (instance, algorithm) over seeds; only instances
    // where every algorithm produced a result are ranked.
    std::map<std::string, std::map<std::string, std::pair<double, int>>> per;
    for (const auto& r : rows) {
        if (!r.ok()) continue;
        auto& cell = per[r.instance][r.algorithm];
        cell.first += r.final_w;
        cell.second += 1;
    }
    std::vector<std::vector<double>> table;
    for (const auto& [inst, by_algo] : per) {
        if (by_algo.size() != algorithms.size()) continue;
        std::vector<double> row;
        for (const auto& a : algorithms) {
            const auto& c = by_algo.at(a);
            row.push_back(c.first / c.second);
        }
        table.push_back(std::move(row));
    }
    const auto mr = mean_ranks(table);
    for (std::size_t j = 0; j < mr.size(); ++j) sum.mean_ranks[algorithms[j]] = mr[j];
    sum.ranked_instances = table.size();
    sum.friedman = friedman_statistic(mr, table.size());
    return sum;
}

/// Runs the whole matrix. Runs execute concurrently across `cfg.jobs`
/// workers, never inside a timed run; each instance is precomputed once per
/// scenario and shared read-only.
inline BenchResult run_benchmark(const BenchConfig& cfg, std::ostream* log = nullptr) {
    if (cfg.algorithms.empty()) throw std::invalid_argument("benchmark needs at least one algorithm");
    if (cfg.detectors.empty() || cfg.seeds.empty()) throw std::invalid_argument("benchmark needs detectors and seeds");

    std::vector<Scenario> scenarios = cfg.scenarios;
    for (const auto& f : cfg.scenario_files) scenarios.push_back(load_scenario(f));
    for (const auto& g : cfg.generated) {
        for (int k = 0; k < g.replicas; ++k) {
            GenParams p = g.params;
            p.seed = g.params.seed + static_cast<std::uint64_t>(k);
            if (!g.params.name.empty()) p.name = g.params.name + "_" + std::to_string(k);
            scenarios.push_back(generate_instance(p, g.bench_grid));
        }
    }
    if (scenarios.empty()) throw std::invalid_argument("benchmark has no scenarios");

    std::vector<std::string> algo_names;
    for (const auto& a : cfg.algorithms) algo_names.push_back(a.display());
    if (std::set<std::string>(algo_names.begin(), algo_names.end()).size() != algo_names.size()) {
        throw std::invalid_argument("algorithm display names must be unique (set 'label')");
    }

    std::vector<std::unique_ptr<Instance>> instances;
    std::vector<std::string> build_errors;
    for (auto& s : scenarios) {
        try {
            instances.push_back(std::make_unique<Instance>(make_instance(s, cfg.radius)));
            build_errors.emplace_back();
        } catch (const std::exception& e) {
            instances.push_back(nullptr);
            build_errors.emplace_back(e.what());
        }
        if (log) *log << "prepared " << s.name << "\n";
    }

    struct Cell {
        std::size_t scenario;
        int detectors;
        std::size_t algorithm;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        for (int d : cfg.detectors) {
            for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
                for (auto seed : cfg.seeds) cells.push_back({s, d, a, seed});
            }
        }
    }

    BenchResult result;
    result.rows.resize(cells.size());
    std::vector<std::optional<RunTrace>> traces(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mu;

    auto worker = [&]() {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            const Cell& c = cells[i];
            ResultRow& row = result.rows[i];
            row.instance = scenarios[c.scenario].name + "_d" + std::to_string(c.detectors);
            row.algorithm = algo_names[c.algorithm];
            row.seed = c.seed;
            try {
                if (!instances[c.scenario]) throw std::runtime_error(build_errors[c.scenario]);
                const Instance& inst = *instances[c.scenario];
                RunTrace t = run_algorithm(inst, c.detectors, cfg.algorithms[c.algorithm], cfg.budget_for(inst.scenario()),
                                           c.seed);
                row.final_w = t.best.value;
                row.elapsed_to_final = t.events.empty() ? 0.0 : t.events.back().elapsed_s;
                row.evaluations = t.evaluations;
                traces[i] = std::move(t);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            if (log) {
                std::lock_guard lock(log_mu);
                *log << row.instance << " " << row.algorithm << " seed=" << row.seed << " "
                     << (row.ok() ? "W=" + fmt_num(row.final_w) : "error: " + row.error) << "\n";
            }
        }
    };

    int jobs = cfg.jobs;
    if (jobs <= 0) jobs = std::max(1, static_cast<int>(std::thread::hardware_concurrency()) - 1);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (traces[i]) {
            result.traces.push_back({result.rows[i].instance, result.rows[i].algorithm, result.rows[i].seed, std::move(*traces[i])});
        }
    }
    result.summary = score_rows(result.rows, algo_names);
    return result;
}

// ---------------------------------------------------------------- file I/O

inline AlgorithmSpec algorithm_from_json(const nlohmann::json& j) {
    AlgorithmSpec a;
    a.name = canonical_algorithm(j.at("name").get<std::string>());
    a.label = j.value("label", std::string{});
    a.alpha = j.value("alpha", a.alpha);
    a.ea.pop_size = j.value("pop_size", a.ea.pop_size);
    a.ea.crossover = j.value("crossover", a.ea.crossover);
    a.ea.mutation = j.value("mutation", a.ea.mutation);
    a.umda.pop_size = j.value("pop_size", a.umda.pop_size);
    a.umda.select_size = j.value("select_size", a.umda.select_size);
    a.umda.smoothing = j.value("smoothing", a.umda.smoothing);
    return a;
}

inline Budget budget_from_json(const nlohmann::json& j) {
    if (j.contains("seconds")) return Budget::wall_clock(j.at("seconds").get<double>());
    if (j.contains("evals")) return Budget::eval_count(j.at("evals").get<std::uint64_t>());
    throw std::invalid_argument("budget needs 'seconds' or 'evals'");
}

inline GenParams gen_params_from_json(const nlohmann::json& j) {
    GenParams p;
    p.rows = j.value("rows", p.rows);
    p.cols = j.value("cols", p.cols);
    p.cell_size = j.value("cell_size_m", p.cell_size);
    p.entrances_per_side = j.value("entrances_per_side", p.entrances_per_side);
    p.objectives = j.value("objectives", p.objectives);
    p.blocked_fraction = j.value("blocked_fraction", p.blocked_fraction);
    p.radius = j.value("radius_m", p.radius);
    p.casualty_scale = j.value("casualty_scale_m2", p.casualty_scale);
    p.density_mean = j.value("density_mean", p.density_mean);
    p.density_sd = j.value("density_sd", p.density_sd);
    p.seed = j.value("seed", p.seed);
    p.name = j.value("name", std::string{});
    return p;
}

/// Reads a benchmark config. Relative scenario paths resolve against `base_dir`.
inline BenchConfig bench_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
    BenchConfig cfg;
    for (const auto& f : j.value("scenarios", nlohmann::json::array())) {
        std::filesystem::path p = f.get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        cfg.scenario_files.push_back(p.string());
    }
    for (const auto& g : j.value("generate", nlohmann::json::array())) {
        GeneratedSource src;
        src.params = gen_params_from_json(g);
        src.replicas = g.value("replicas", 1);
        src.bench_grid = g.value("bench_grid", false);
        cfg.generated.push_back(src);
    }
    for (const auto& a : j.at("algorithms")) cfg.algorithms.push_back(algorithm_from_json(a));
    if (j.contains("detectors")) cfg.detectors = j.at("detectors").get<std::vector<int>>();
    if (j.contains("radius_m")) cfg.radius = j.at("radius_m").get<double>();
    if (j.contains("budget")) cfg.budget = budget_from_json(j.at("budget"));
    if (j.contains("budget_by_size")) {
        for (const auto& [k, v] : j.at("budget_by_size").items()) cfg.budget_by_size[std::stoi(k)] = budget_from_json(v);
    }
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    cfg.jobs = j.value("jobs", cfg.jobs);
    cfg.quality_eps = j.value("quality_eps", cfg.quality_eps);
    return cfg;
}

inline void write_trace_csv(std::ostream& out, const RunTrace& t) {
    out << "elapsed_s,evals,best_w\n";
    for (const auto& e : t.events) out << fmt_num(e.elapsed_s) << ',' << e.evals << ',' << fmt_num(e.best_w) << '\n';
}

/// Parses a trace CSV; the final best value is the last row.
inline RunTrace read_trace_csv(std::istream& in) {
    RunTrace t;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b, c;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        std::getline(ss, c, ',');
        t.events.push_back({std::stod(a), std::stoull(b), std::stod(c)});
    }
    if (!t.events.empty()) {
        t.best.value = t.events.back().best_w;
        t.elapsed_s = t.events.back().elapsed_s;
        t.evaluations = t.events.back().evals;
    }
    return t;
}

inline void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << "instance,algorithm,seed,final_w,best_known_w,relative_deviation,elapsed_to_final_s,evaluations,error\n";
    for (const auto& r : rows) {
        out << r.instance << ',' << r.algorithm << ',' << r.seed << ',';
        if (r.ok()) {
            out << fmt_num(r.final_w) << ',' << fmt_num(r.best_known) << ',' << fmt_num(r.deviation) << ','
                << fmt_num(r.elapsed_to_final) << ',' << r.evaluations << ",\n";
        } else {
            std::string msg = r.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            out << ",,,," << r.evaluations << ',' << msg << '\n';
        }
    }
}

inline void write_qrtd_csv(std::ostream& out, const std::vector<QrtdCurve>& curves) {
    out << "algorithm,time_s,success\n";
    for (const auto& c : curves) {
        for (std::size_t i = 0; i < c.times.size(); ++i) {
            out << c.algorithm << ',' << fmt_num(c.times[i]) << ',' << fmt_num(c.success[i]) << '\n';
        }
    }
}

inline nlohmann::ordered_json summary_to_json(const BenchSummary& s) {
    nlohmann::ordered_json j;
    j["ranked_instances"] = s.ranked_instances;
    j["friedman_chi2"] = s.friedman;
    j["friedman_df"] = s.algorithms.empty() ? 0 : s.algorithms.size() - 1;
    auto algos = nlohmann::ordered_json::array();
    for (const auto& a : s.algorithms) {
        const auto& d = s.deviations.at(a);
        nlohmann::ordered_json x;
        x["algorithm"] = a;
        x["mean_rank"] = s.mean_ranks.contains(a) ? s.mean_ranks.at(a) : 0.0;
        x["runs"] = d.count;
        x["deviation"] = {{"min", d.min}, {"q1", d.q1}, {"median", d.median}, {"q3", d.q3},
                          {"max", d.max}, {"mean", d.mean}, {"upper_whisker", d.upper_whisker}};
        algos.push_back(x);
    }
    j["algorithms"] = algos;
    return j;
}

/// Evenly spaced grid 0, step, 2*step, ... up to and including `until`.
inline std::vector<double> time_grid(double until, std::size_t points = 101) {
    std::vector<double> g;
    if (points < 2) points = 2;
    for (std::size_t i = 0; i < points; ++i) g.push_back(until * static_cast<double>(i) / static_cast<double>(points - 1));
    return g;
}

/// Trace file stem: <instance>__<algorithm>__s<seed>
inline std::string trace_stem(const TraceRecord& t) {
    return t.instance + "__" + t.algorithm + "__s" + std::to_string(t.seed);
}

/// Writes results.csv, summary.json, qrtd.csv and traces/*.csv into `dir`.
inline void write_bench_outputs(const std::filesystem::path& dir, const BenchResult& res, double quality_eps = 0.0) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "traces");
    {
        std::ofstream out(dir / "results.csv");
        write_results_csv(out, res.rows);
    }
    {
        std::ofstream out(dir / "summary.json");
        out << summary_to_json(res.summary).dump(2) << '\n';
    }
    double horizon = 0.0;
    for (const auto& t : res.traces) {
        std::ofstream out(dir / "traces" / (trace_stem(t) + ".csv"));
        write_trace_csv(out, t.trace);
        horizon = std::max(horizon, t.trace.elapsed_s);
    }
    if (!res.traces.empty()) {
        std::ofstream out(dir / "qrtd.csv");
        write_qrtd_csv(out, compute_qrtd(res.traces, best_known_values(res.traces), time_grid(horizon), quality_eps));
    }
}

}  // namespace opsbd
