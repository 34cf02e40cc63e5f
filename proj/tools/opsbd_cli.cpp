// opsbd: command-line front end for the detector placement library.

#include <glob.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "opsbd/opsbd.hpp"

namespace fs = std::filesystem;
using namespace opsbd;

namespace {

std::ofstream open_out(const std::string& path) {
    if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

std::string cells_str(const Scenario& s, const std::vector<CellId>& cells) {
    std::string out;
    for (CellId c : cells) {
        if (!out.empty()) out += ' ';
        out += detail::cell_str(s.ref(c));
    }
    return out;
}

std::vector<std::string> expand_glob(const std::string& pattern) {
    glob_t g{};
    std::vector<std::string> files;
    if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
        for (std::size_t i = 0; i < g.gl_pathc; ++i) files.emplace_back(g.gl_pathv[i]);
    }
    globfree(&g);
    return files;
}

// <instance>__<algorithm>__s<seed>.csv
std::optional<TraceRecord> trace_from_file(const std::string& path) {
    const std::string stem = fs::path(path).stem().string();
    const auto a = stem.find("__");
    const auto b = stem.rfind("__");
    if (a == std::string::npos || a == b) return std::nullopt;
    TraceRecord t;
    t.instance = stem.substr(0, a);
    t.algorithm = stem.substr(a + 2, b - a - 2);
    std::string seed = stem.substr(b + 2);
    if (!seed.empty() && seed.front() == 's') seed.erase(0, 1);
    t.seed = std::stoull(seed);
    std::ifstream in(path);
    t.trace = read_trace_csv(in);
    return t;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Detector placement: solvers, oracles, generator and benchmark harness"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "Run one algorithm on a scenario");
    std::string scen_file, out_file, trace_file;
    std::string algo = "hc";
    int detectors = 0;
    std::optional<double> radius;
    std::optional<double> seconds;
    std::optional<std::uint64_t> evals;
    std::uint64_t seed = 1;
    AlgorithmSpec spec;
    solve->add_option("--scenario", scen_file, "Scenario file")->required()->check(CLI::ExistingFile);
    solve->add_option("--algo", algo, "greedy | grasp | grasp-hc | hc | ea | umda")
        ->check(CLI::IsMember({"greedy", "grasp", "grasp-hc", "grasp+hc", "hc", "ea", "umda"}));
    solve->add_option("--detectors", detectors, "Number of detectors")->required()->check(CLI::PositiveNumber);
    solve->add_option("--radius", radius, "Detector radius in meters (overrides the scenario)");
    auto* time_opt = solve->add_option("--time", seconds, "Wall-clock budget in seconds");
    auto* evals_opt = solve->add_option("--evals", evals, "Evaluation budget");
    time_opt->excludes(evals_opt);
    solve->add_option("--seed", seed, "Random seed");
    solve->add_option("--alpha", spec.alpha, "GRASP / UMDA threshold in [0,1]");
    solve->add_option("--pop-size", spec.ea.pop_size, "EA / UMDA population size");
    solve->add_option("--crossover", spec.ea.crossover, "EA crossover probability");
    solve->add_option("--mutation", spec.ea.mutation, "EA per-gene mutation probability (default 1/detectors)");
    solve->add_option("--select-size", spec.umda.select_size, "UMDA selected population size");
    solve->add_option("--out", out_file, "Solution file to write");
    solve->add_option("--trace", trace_file, "Trace CSV to write");

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a random scenario");
    GenParams gp;
    bool bench_grid = false;
    std::string gen_out;
    gen->add_option("--rows", gp.rows, "Grid rows");
    gen->add_option("--cols", gp.cols, "Grid columns");
    gen->add_option("--cell", gp.cell_size, "Cell side in meters");
    gen->add_option("--entrances-per-side", gp.entrances_per_side, "Entrances on each border side");
    gen->add_option("--objectives", gp.objectives, "Number of objectives");
    gen->add_option("--blocked", gp.blocked_fraction, "Fraction of blocked cells");
    gen->add_option("--radius", gp.radius, "Detector radius in meters");
    gen->add_option("--casualty-scale", gp.casualty_scale, "Lethal area constant in m^2");
    gen->add_option("--seed", gp.seed, "Random seed");
    gen->add_option("--name", gp.name, "Scenario name");
    gen->add_option("--out", gen_out, "Scenario file to write")->required();
    gen->add_flag("--bench-grid", bench_grid, "Restrict parameters to the benchmark grid values");

    // bench
    auto* bench = app.add_subcommand("bench", "Run a benchmark matrix");
    std::string cfg_file, out_dir;
    std::optional<int> jobs;
    bench->add_option("--config", cfg_file, "Benchmark config")->required()->check(CLI::ExistingFile);
    bench->add_option("--out-dir", out_dir, "Output directory")->required();
    bench->add_option("--jobs", jobs, "Parallel workers");

    // qrtd
    auto* qrtd = app.add_subcommand("qrtd", "Qualified runtime distributions from trace files");
    std::string traces_glob, qrtd_out;
    double quality_eps = 0.0;
    std::size_t points = 101;
    qrtd->add_option("--traces", traces_glob, "Glob of trace CSVs named <instance>__<algo>__s<seed>.csv")->required();
    qrtd->add_option("--out", qrtd_out, "Output CSV")->required();
    qrtd->add_option("--quality-eps", quality_eps, "Relative quality tolerance");
    qrtd->add_option("--points", points, "Number of time grid points");

    // exact
    auto* exact = app.add_subcommand("exact", "Exhaustive optimum for small instances");
    bool no_pruning = false;
    std::uint64_t cap = kDefaultEnumerationCap;
    exact->add_option("--scenario", scen_file, "Scenario file")->required()->check(CLI::ExistingFile);
    exact->add_option("--detectors", detectors, "Number of detectors")->required()->check(CLI::PositiveNumber);
    exact->add_option("--radius", radius, "Detector radius in meters");
    exact->add_flag("--no-pruning", no_pruning, "Enumerate over every unblocked cell");
    exact->add_option("--cap", cap, "Maximum number of subsets");
    exact->add_option("--out", out_file, "Solution file to write");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte-Carlo estimate of a solution's casualties");
    std::string sol_file;
    std::uint64_t trials = 1000000;
    sim->add_option("--scenario", scen_file, "Scenario file")->required()->check(CLI::ExistingFile);
    sim->add_option("--solution", sol_file, "Solution file")->required()->check(CLI::ExistingFile);
    sim->add_option("--trials", trials, "Number of simulated attacks");
    sim->add_option("--seed", seed, "Random seed");
    sim->add_option("--radius", radius, "Detector radius in meters");

    // dominance
    auto* dom = app.add_subcommand("dominance", "Dump dominance counts and candidate flags");
    std::string dom_out;
    dom->add_option("--scenario", scen_file, "Scenario file")->required()->check(CLI::ExistingFile);
    dom->add_option("--detectors", detectors, "Number of detectors")->required()->check(CLI::PositiveNumber);
    dom->add_option("--radius", radius, "Detector radius in meters");
    dom->add_option("--out", dom_out, "Output CSV")->required();

    // paths
    auto* paths = app.add_subcommand("paths", "Export shortest paths as polyline vertices");
    std::string paths_out;
    paths->add_option("--scenario", scen_file, "Scenario file")->required()->check(CLI::ExistingFile);
    paths->add_option("--out", paths_out, "Output CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            spec.name = canonical_algorithm(algo);
            const Budget budget = seconds ? Budget::wall_clock(*seconds) : Budget::eval_count(evals.value_or(100000));
            const Instance inst = make_instance(load_scenario(scen_file), radius);
            const RunTrace t = run_algorithm(inst, detectors, spec, budget, seed);
            std::printf("algorithm %s\nvalue %.12g\nbaseline %.12g\ndetectors %s\nevaluations %llu\nelapsed_s %.6g\n",
                        spec.display().c_str(), t.best.value, inst.baseline(),
                        cells_str(inst.scenario(), t.best.cells).c_str(), static_cast<unsigned long long>(t.evaluations),
                        t.elapsed_s);
            if (!out_file.empty()) {
                open_out(out_file) << solution_to_json(inst.scenario(), t.best, spec.display(), seed).dump(2) << '\n';
            }
            if (!trace_file.empty()) {
                auto out = open_out(trace_file);
                write_trace_csv(out, t);
            }
        } else if (*gen) {
            const Scenario s = generate_instance(gp, bench_grid);
            open_out(gen_out) << write_scenario(s);
            std::printf("wrote %s (%dx%d, %d entrances, %d objectives)\n", gen_out.c_str(), s.rows, s.cols,
                        s.num_entrances(), s.num_objectives());
        } else if (*bench) {
            std::ifstream in(cfg_file);
            BenchConfig cfg = bench_config_from_json(nlohmann::json::parse(in), fs::path(cfg_file).parent_path());
            if (jobs) cfg.jobs = *jobs;
            const BenchResult res = run_benchmark(cfg, &std::cerr);
            write_bench_outputs(out_dir, res, cfg.quality_eps);
            std::cout << summary_to_json(res.summary).dump(2) << '\n';
        } else if (*qrtd) {
            std::vector<TraceRecord> traces;
            for (const auto& f : expand_glob(traces_glob)) {
                if (auto t = trace_from_file(f)) traces.push_back(std::move(*t));
            }
            if (traces.empty()) throw std::invalid_argument("no trace files match " + traces_glob);
            double horizon = 0.0;
            for (const auto& t : traces) horizon = std::max(horizon, t.trace.elapsed_s);
            const auto curves = compute_qrtd(traces, best_known_values(traces), time_grid(horizon, points), quality_eps);
            auto out = open_out(qrtd_out);
            write_qrtd_csv(out, curves);
            std::printf("%zu traces, %zu algorithms\n", traces.size(), curves.size());
        } else if (*exact) {
            const Instance inst = make_instance(load_scenario(scen_file), radius);
            const ExactResult r = exact_best(inst, detectors, !no_pruning, cap);
            std::printf("value %.12g\ndetectors %s\nenumerated %llu\n", r.best.value,
                        cells_str(inst.scenario(), r.best.cells).c_str(), static_cast<unsigned long long>(r.enumerated));
            if (!out_file.empty()) {
                open_out(out_file) << solution_to_json(inst.scenario(), r.best, "exact", 0).dump(2) << '\n';
            }
        } else if (*sim) {
            const Instance inst = make_instance(load_scenario(scen_file), radius);
            const auto cells = load_solution_cells(sol_file, inst.scenario());
            const McEstimate est = monte_carlo_estimate(inst, cells, trials, seed);
            const double analytic = evaluate(inst, cells);
            std::printf("estimate %.12g\nstd_error %.12g\nanalytic %.12g\nz %.4g\n", est.mean, est.std_error, analytic,
                        est.std_error > 0 ? (est.mean - analytic) / est.std_error : 0.0);
        } else if (*dom) {
            const Instance inst = make_instance(load_scenario(scen_file), radius);
            auto out = open_out(dom_out);
            write_dominance_csv(out, inst.scenario(), inst.cache(), detectors);
            std::printf("%zu candidates\n", candidate_set(inst.cache(), detectors).size());
        } else if (*paths) {
            const Scenario s = load_scenario(scen_file);
            require_valid(s);
            auto out = open_out(paths_out);
            write_paths_csv(out, enumerate_paths(s));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
