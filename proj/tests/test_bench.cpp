#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace opsbd;

namespace {

RunTrace trace_of(std::vector<std::pair<double, double>> pts) {
    RunTrace t;
    std::uint64_t ev = 0;
    for (auto [time, w] : pts) t.events.push_back({time, ++ev, w});
    t.best.value = pts.back().second;
    t.elapsed_s = pts.back().first;
    return t;
}

BenchConfig small_config() {
    BenchConfig cfg;
    for (std::uint64_t seed : {1, 2, 3}) {
        GeneratedSource g;
        g.params = opsbd::testing::desk_params(seed, 12);
        cfg.generated.push_back(g);
    }
    for (const char* n : {"greedy", "hc", "grasp"}) {
        AlgorithmSpec a;
        a.name = n;
        cfg.algorithms.push_back(a);
    }
    cfg.detectors = {3};
    cfg.budget = Budget::eval_count(5000);
    cfg.seeds = {1, 2};
    cfg.jobs = 1;
    return cfg;
}

}  // namespace

TEST(Stats, AverageRanksWithTies) {
    EXPECT_EQ(average_ranks({3.0, 1.0, 2.0}), (std::vector<double>{3, 1, 2}));
    EXPECT_EQ(average_ranks({1.0, 1.0, 2.0}), (std::vector<double>{1.5, 1.5, 3}));
    EXPECT_EQ(average_ranks({5.0, 5.0, 5.0}), (std::vector<double>{2, 2, 2}));
}

TEST(Stats, FriedmanHandComputed) {
    // Three algorithms on four instances; the last instance has a tie.
    const std::vector<std::vector<double>> table{{1, 2, 3}, {2, 1, 3}, {1, 3, 2}, {1, 1, 2}};
    const auto r = mean_ranks(table);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_DOUBLE_EQ(r[0], 5.5 / 4);
    EXPECT_DOUBLE_EQ(r[1], 7.5 / 4);
    EXPECT_DOUBLE_EQ(r[2], 11.0 / 4);
    // Rank sums 5.5, 7.5, 11: 12/(4*3*4) * (5.5^2 + 7.5^2 + 11^2) - 3*4*4 = 3.875
    EXPECT_NEAR(friedman_statistic(r, 4), 3.875, 1e-12);
    EXPECT_EQ(friedman_statistic({1.0, 2.0}, 0), 0.0);
}

TEST(Stats, QuartilesAndWhisker) {
    const DeviationSummary d = summarize({5, 1, 4, 2, 3});
    EXPECT_DOUBLE_EQ(d.q1, 2);
    EXPECT_DOUBLE_EQ(d.median, 3);
    EXPECT_DOUBLE_EQ(d.q3, 4);
    EXPECT_DOUBLE_EQ(d.upper_whisker, 7);
    EXPECT_DOUBLE_EQ(d.mean, 3);
    EXPECT_EQ(d.count, 5u);
}

TEST(Score, SingleCompetitorHasZeroDeviation) {
    std::vector<ResultRow> rows{{"i1", "greedy", 1, 10.0, 0, 0, 0, 5, ""}};
    const BenchSummary s = score_rows(rows, {"greedy"});
    EXPECT_EQ(rows[0].deviation, 0.0);
    EXPECT_EQ(rows[0].best_known, 10.0);
    EXPECT_DOUBLE_EQ(s.mean_ranks.at("greedy"), 1.0);
}

TEST(Score, StrictDominanceGivesRanksOneAndTwo) {
    std::vector<ResultRow> rows;
    for (int i = 0; i < 5; ++i) {
        const std::string inst = "i" + std::to_string(i);
        rows.push_back({inst, "a", 1, 10.0 + i, 0, 0, 0, 1, ""});
        rows.push_back({inst, "b", 1, 11.0 + i, 0, 0, 0, 1, ""});
    }
    rows.push_back({"i0", "b", 2, 0, 0, 0, 0, 0, "boom"});
    const BenchSummary s = score_rows(rows, {"a", "b"});
    EXPECT_DOUBLE_EQ(s.mean_ranks.at("a"), 1.0);
    EXPECT_DOUBLE_EQ(s.mean_ranks.at("b"), 2.0);
    EXPECT_EQ(s.ranked_instances, 5u);
    EXPECT_NEAR(rows[1].deviation, 0.1, 1e-12);
    EXPECT_EQ(s.deviations.at("b").count, 5u);
}

TEST(Qrtd, CurvesAndEdgeCases) {
    std::vector<TraceRecord> traces{
        {"i1", "good", 1, trace_of({{0.1, 10}, {0.5, 8}})},
        {"i2", "good", 1, trace_of({{0.2, 7}})},
        {"i1", "bad", 1, trace_of({{0.1, 9}})},
        {"i2", "bad", 1, trace_of({{0.3, 9}})},
        {"i1", "greedy", 1, trace_of({{0.05, 8.5}})},
        {"i2", "greedy", 1, trace_of({{0.05, 7}})},
    };
    const auto bk = best_known_values(traces);
    EXPECT_EQ(bk.at("i1"), 8);
    EXPECT_EQ(bk.at("i2"), 7);
    const std::vector<double> grid{0.0, 0.1, 0.2, 0.3, 0.5, 1.0};
    const auto curves = compute_qrtd(traces, bk, grid);
    ASSERT_EQ(curves.size(), 3u);
    EXPECT_EQ(curves[0].algorithm, "good");
    EXPECT_EQ(curves[0].success, (std::vector<double>{0, 0, 0.5, 0.5, 1, 1}));
    EXPECT_EQ(curves[1].success, (std::vector<double>(6, 0.0)));  // never reaches best known
    EXPECT_EQ(curves[2].success, (std::vector<double>{0, 0.5, 0.5, 0.5, 0.5, 0.5}));  // step function
    for (const auto& c : curves) EXPECT_TRUE(std::is_sorted(c.success.begin(), c.success.end()));
    // A 15% tolerance lets "bad" count on i1 (9 <= 8 * 1.15).
    const auto loose = compute_qrtd(traces, bk, grid, 0.15);
    EXPECT_EQ(loose[1].success.back(), 0.5);
    EXPECT_THROW(compute_qrtd({}, bk, grid), std::invalid_argument);
}

TEST(Bench, MatrixRunIsReproducibleAndScored) {
    const BenchConfig cfg = small_config();
    const BenchResult a = run_benchmark(cfg);
    const BenchResult b = run_benchmark(cfg);
    ASSERT_EQ(a.rows.size(), 3u * 3u * 2u);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        // elapsed_to_final is wall-clock and differs between runs.
        EXPECT_EQ(a.rows[i].instance, b.rows[i].instance);
        EXPECT_EQ(a.rows[i].algorithm, b.rows[i].algorithm);
        EXPECT_EQ(a.rows[i].final_w, b.rows[i].final_w);
        EXPECT_EQ(a.rows[i].deviation, b.rows[i].deviation);
        EXPECT_EQ(a.rows[i].evaluations, b.rows[i].evaluations);
    }
    std::map<std::string, double> min_dev;
    for (const auto& r : a.rows) {
        ASSERT_TRUE(r.ok()) << r.error;
        EXPECT_GE(r.deviation, 0.0);
        auto [it, fresh] = min_dev.emplace(r.instance, r.deviation);
        if (!fresh) it->second = std::min(it->second, r.deviation);
    }
    for (const auto& [inst, d] : min_dev) EXPECT_EQ(d, 0.0) << inst;
    EXPECT_EQ(a.summary.ranked_instances, 3u);
    EXPECT_EQ(a.traces.size(), a.rows.size());
}

TEST(Bench, SolverFailureIsRecorded) {
    BenchConfig cfg = small_config();
    cfg.detectors = {100000};
    cfg.seeds = {1};
    const BenchResult r = run_benchmark(cfg);
    ASSERT_EQ(r.rows.size(), 9u);
    for (const auto& row : r.rows) EXPECT_FALSE(row.ok());
    EXPECT_EQ(r.summary.ranked_instances, 0u);
}

TEST(Bench, ParallelWorkersGiveSameEvalCountResults) {
    BenchConfig cfg = small_config();
    const BenchResult serial = run_benchmark(cfg);
    cfg.jobs = 3;
    const BenchResult parallel = run_benchmark(cfg);
    ASSERT_EQ(serial.rows.size(), parallel.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
        EXPECT_EQ(serial.rows[i].final_w, parallel.rows[i].final_w);
        EXPECT_EQ(serial.rows[i].evaluations, parallel.rows[i].evaluations);
    }
}

TEST(Bench, ConfigAndOutputs) {
    const auto j = nlohmann::json::parse(R"({
        "scenarios": ["plaza8.json"],
        "generate": [{"rows": 10, "cols": 10, "objectives": 2, "seed": 5, "replicas": 2}],
        "algorithms": [{"name": "greedy"}, {"name": "grasp-hc", "alpha": 0.2}, {"name": "umda", "pop_size": 10, "select_size": 5}],
        "detectors": [2],
        "budget": {"evals": 3000},
        "budget_by_size": {"64": {"seconds": 2}},
        "seeds": [7],
        "jobs": 1
    })");
    const BenchConfig cfg = bench_config_from_json(j, opsbd::testing::samples_dir());
    ASSERT_EQ(cfg.algorithms.size(), 3u);
    EXPECT_EQ(cfg.algorithms[1].name, "grasp+hc");
    EXPECT_EQ(cfg.algorithms[1].display(), "grasp+hc@0.2");
    EXPECT_EQ(cfg.algorithms[2].umda.select_size, 5);
    EXPECT_EQ(cfg.generated[0].replicas, 2);
    EXPECT_EQ(cfg.budget_by_size.at(64).mode, Budget::Mode::WallClock);

    const BenchResult res = run_benchmark(cfg);
    EXPECT_EQ(res.rows.size(), 3u * 3u);
    const auto dir = std::filesystem::temp_directory_path() / "opsbd_bench_test";
    std::filesystem::remove_all(dir);
    write_bench_outputs(dir, res);
    EXPECT_TRUE(std::filesystem::exists(dir / "results.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "summary.json"));
    EXPECT_TRUE(std::filesystem::exists(dir / "qrtd.csv"));
    const auto trace_file = dir / "traces" / (trace_stem(res.traces.front()) + ".csv");
    ASSERT_TRUE(std::filesystem::exists(trace_file));
    std::ifstream in(trace_file);
    const RunTrace back = read_trace_csv(in);
    EXPECT_EQ(back.events.size(), res.traces.front().trace.events.size());
    EXPECT_NEAR(back.best.value, res.traces.front().trace.best.value, 1e-9 * back.best.value);
    std::ifstream results(dir / "results.csv");
    std::string header;
    std::getline(results, header);
    EXPECT_EQ(header, "instance,algorithm,seed,final_w,best_known_w,relative_deviation,elapsed_to_final_s,evaluations,error");
    std::filesystem::remove_all(dir);

    EXPECT_THROW(bench_config_from_json(nlohmann::json::parse(R"({"algorithms":[{"name":"sa"}]})")), std::invalid_argument);
}
