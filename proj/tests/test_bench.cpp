#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

using namespace mbang;
using namespace fixtures;

TEST(Score, TripleAgainstItsPairs)
{
    auto truth = graph1(4, {}, {{2, 3, 4}});
    auto pairs = graph1(4, {}, {{2, 3}, {2, 4}, {3, 4}});
    auto s = score(truth, pairs);
    EXPECT_EQ(s.edge_correct, 0);
    EXPECT_EQ(s.edge_total, 1);
    EXPECT_FALSE(s.graph_exact);
    auto sub = score(truth, pairs, ScoreMode::subdivision);
    EXPECT_EQ(sub.edge_correct, 3);
    EXPECT_EQ(sub.edge_total, 3);
    EXPECT_TRUE(sub.graph_exact);
}

TEST(Score, PartialRecovery)
{
    auto s = score(graph1(5, {}, {{1, 2}, {3, 4, 5}}), graph1(5, {}, {{1, 2}}));
    EXPECT_EQ(s.edge_correct, 1);
    EXPECT_EQ(s.edge_total, 2);
    EXPECT_THROW(score(MixedGraph(3), MixedGraph(4)), ValidationError);
    // Directed edges must match for an exact graph.
    EXPECT_FALSE(score(graph1(3, {{1, 2}}), MixedGraph(3)).graph_exact);
    EXPECT_TRUE(score(two_hidden_graph(), two_hidden_graph()).graph_exact);
}

TEST(Seeds, DistinctPerTrial)
{
    EXPECT_NE(trial_seed(1, 0), trial_seed(1, 1));
    EXPECT_NE(trial_seed(1, 0), trial_seed(2, 0));
    EXPECT_EQ(trial_seed(5, 3), trial_seed(5, 3));
}

TEST(Benchmark, NoEdgesIsTriviallyExact)
{
    TrialConfig cfg;
    cfg.edges = 0;
    cfg.trials = 5;
    cfg.n = 200;
    auto r = run_benchmark(cfg);
    EXPECT_EQ(r.summary.failures, 0);
    EXPECT_DOUBLE_EQ(r.summary.graph_exact_rate, 1.0);
    EXPECT_DOUBLE_EQ(r.summary.edge_rate, 1.0);
}

TEST(Benchmark, DeterministicAcrossWorkerCounts)
{
    TrialConfig cfg;
    cfg.trials = 6;
    cfg.n = 2000;
    cfg.seed = 77;
    cfg.threads = 1;
    auto a = run_benchmark(cfg);
    cfg.threads = 3;
    auto b = run_benchmark(cfg);
    ASSERT_EQ(a.outcomes.size(), b.outcomes.size());
    for (std::size_t t = 0; t < a.outcomes.size(); ++t) {
        EXPECT_EQ(a.outcomes[t].seed, b.outcomes[t].seed);
        EXPECT_EQ(a.outcomes[t].truth, b.outcomes[t].truth);
        EXPECT_EQ(a.outcomes[t].recovered, b.outcomes[t].recovered);
    }
}

TEST(Benchmark, SummaryIsMeanOfIndicators)
{
    TrialConfig cfg;
    cfg.trials = 8;
    cfg.n = 1000;
    cfg.edges = 8;
    auto r = run_benchmark(cfg);
    int exact = 0, correct = 0, total = 0;
    for (const auto& o : r.outcomes) {
        exact += o.graph_exact;
        correct += o.edge_correct;
        total += o.edge_total;
    }
    EXPECT_DOUBLE_EQ(r.summary.graph_exact_rate, exact / 8.0);
    EXPECT_EQ(r.summary.edge_correct, correct);
    EXPECT_EQ(r.summary.edge_total, total);
    auto csv = outcomes_csv(cfg, r.outcomes);
    EXPECT_EQ(csv.rfind("trial,seed,n,edges,noise,edge_correct,edge_total,graph_exact,stage_exact,wall_ms\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
    auto j = summary_json(cfg, r.summary);
    EXPECT_EQ(j["trials"], 8);
}

TEST(Benchmark, PopulationStageIsExactOnSparseGraphs)
{
    TrialConfig cfg;
    cfg.stage = StageKind::population;
    cfg.discovery.zero_test = ZeroTestMode::exact;
    cfg.trials = 30;
    auto r = run_benchmark(cfg);
    EXPECT_EQ(r.summary.failures, 0);
    EXPECT_GE(r.summary.graph_exact_rate, 0.95);
}

TEST(Benchmark, ExternalStageReadsPerTrialFiles)
{
    auto dir = std::filesystem::temp_directory_path() / "mbang_test_bench";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    TrialConfig cfg;
    cfg.trials = 3;
    cfg.n = 500;
    cfg.export_dir = dir.string();
    run_benchmark(cfg);
    for (int t = 0; t < 3; ++t) {
        auto base = dir / ("trial_" + std::to_string(t));
        ASSERT_TRUE(std::filesystem::exists(base.string() + ".csv"));
        auto spec = io::spec_from_json(io::read_json_file(base.string() + "_truth.json"));
        io::write_text_file((dir / ("trial_" + std::to_string(t) + ".json")).string(),
                            io::to_json(oracle_first_stage(spec)).dump());
    }
    TrialConfig ext = cfg;
    ext.export_dir.clear();
    ext.stage = StageKind::external;
    ext.external_dir = dir.string();
    auto a = run_benchmark(ext), b = run_benchmark(cfg);
    for (int t = 0; t < 3; ++t) {
        EXPECT_TRUE(a.outcomes[t].error.empty()) << a.outcomes[t].error;
        EXPECT_TRUE(a.outcomes[t].stage_exact);
        EXPECT_EQ(a.outcomes[t].recovered, b.outcomes[t].recovered);
    }
    std::filesystem::remove(dir / "trial_1.json");
    auto missing = run_benchmark(ext);
    EXPECT_FALSE(missing.outcomes[1].error.empty());
    EXPECT_EQ(missing.summary.failures, 1);
}

TEST(Benchmark, ConfigErrors)
{
    TrialConfig cfg;
    cfg.edges = 22;
    EXPECT_THROW(run_benchmark(cfg), UsageError);
    cfg = {};
    cfg.stage = StageKind::external;
    EXPECT_THROW(run_benchmark(cfg), UsageError);
}

TEST(Workers, EnvironmentCap)
{
    ::setenv("MBANG_THREADS", "2", 1);
    EXPECT_EQ(worker_count(8), 2u);
    EXPECT_EQ(worker_count(1), 1u);
    ::unsetenv("MBANG_THREADS");
    EXPECT_EQ(worker_count(5), 5u);
}
