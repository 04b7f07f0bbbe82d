#pragma once

// Random-graph benchmark: generate, simulate, discover, score.

#include "discovery.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "io.hpp"
#include "lsem.hpp"
#include "noise.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace mbang {

enum class ScoreMode {
    exact_edges, // a multidirected edge counts iff the identical vertex set is recovered
    subdivision, // compare bidirected subdivisions pair by pair
};

struct Score {
    int edge_correct = 0;
    int edge_total = 0;
    bool graph_exact = false;
};

inline Score score(const MixedGraph& truth, const MixedGraph& recovered, ScoreMode mode = ScoreMode::exact_edges)
{
    if (truth.p() != recovered.p())
        throw ValidationError("score: graphs have " + std::to_string(truth.p()) + " and " +
                              std::to_string(recovered.p()) + " vertices");
    Score s;
    const bool same_directed = truth.directed() == recovered.directed();
    if (mode == ScoreMode::exact_edges) {
        const auto& got = recovered.multi();
        for (const auto& h : truth.multi()) {
            ++s.edge_total;
            if (std::binary_search(got.begin(), got.end(), h)) ++s.edge_correct;
        }
        s.graph_exact = same_directed && truth.multi() == recovered.multi();
    } else {
        auto want = bidirected_subdivision(truth);
        auto got = bidirected_subdivision(recovered);
        for (const auto& [a, b] : want.pairs()) {
            ++s.edge_total;
            if (got.adjacent(a, b)) ++s.edge_correct;
        }
        s.graph_exact = same_directed && want.pairs() == got.pairs();
    }
    return s;
}

enum class StageKind {
    oracle,     // true B and bidirected subdivision, sample cumulants
    external,   // first-stage JSON per trial read from a directory
    population, // oracle stage and exact population cumulants
};

struct TrialConfig {
    int p_pre = 7;
    int edges = 5;
    NoiseSpec noise = NoiseSpec::uniform(-10.0, 10.0);
    std::size_t n = 10000;
    int trials = 100;
    StageKind stage = StageKind::oracle;
    std::string external_dir;  // trial_<t>.json files for StageKind::external
    std::string export_dir;    // if set, write trial_<t>.csv and trial_<t>_truth.json
    std::uint64_t seed = 1;
    double hidden_probability = 0.5;
    int max_hidden = 3;
    BowRule bow_rule = BowRule::drop_parent_from_edge;
    DiscoveryConfig discovery;
    unsigned threads = 0; // 0: hardware concurrency, capped by MBANG_THREADS

    void validate() const
    {
        if (p_pre <= 0 || trials <= 0 || n == 0) throw UsageError("trial counts must be positive");
        if (edges < 0 || edges > p_pre * (p_pre - 1) / 2) throw UsageError("edge count out of range");
        if (stage == StageKind::external && external_dir.empty())
            throw UsageError("external stage needs a directory of first-stage files");
        discovery.validate();
    }
};

struct TrialOutcome {
    int trial = 0;
    std::uint64_t seed = 0;
    MixedGraph truth;
    MixedGraph recovered;
    int edge_correct = 0;
    int edge_total = 0;
    bool graph_exact = false;
    int pair_correct = 0; // subdivision-mode counts
    int pair_total = 0;
    bool subdivision_exact = false;
    bool stage_exact = false; // first stage returned the true directed and bidirected structure
    double wall_ms = 0.0;
    std::string error; // non-empty when the trial failed
};

struct BenchmarkSummary {
    int trials = 0;
    int failures = 0;
    int edge_correct = 0;
    int edge_total = 0;
    double edge_rate = 0.0;          // pooled over edges; trials without edges add nothing
    double graph_exact_rate = 0.0;   // mean of per-trial indicators
    double subdivision_exact_rate = 0.0;
    double pair_rate = 0.0;
    int stage_exact = 0;
    double conditional_exact_rate = 0.0; // among stage_exact trials
};

struct BenchmarkResult {
    std::vector<TrialOutcome> outcomes;
    BenchmarkSummary summary;
};

/// SplitMix64 finalizer; derives independent per-trial seeds.
inline std::uint64_t mix_seed(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t seed, int trial)
{
    return mix_seed(seed ^ mix_seed(static_cast<std::uint64_t>(trial) + 1));
}

/// Worker count: requested (0 = hardware), capped by MBANG_THREADS.
inline unsigned worker_count(unsigned requested)
{
    unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MBANG_THREADS")) {
        char* end = nullptr;
        long cap = std::strtol(env, &end, 10);
        if (end != env && cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return std::max(1u, n);
}

inline BenchmarkSummary summarize(const std::vector<TrialOutcome>& outcomes)
{
    BenchmarkSummary s;
    s.trials = static_cast<int>(outcomes.size());
    int exact = 0, sub_exact = 0, pair_correct = 0, pair_total = 0, cond_exact = 0;
    for (const auto& o : outcomes) {
        if (!o.error.empty()) {
            ++s.failures;
            continue;
        }
        s.edge_correct += o.edge_correct;
        s.edge_total += o.edge_total;
        pair_correct += o.pair_correct;
        pair_total += o.pair_total;
        exact += o.graph_exact;
        sub_exact += o.subdivision_exact;
        if (o.stage_exact) {
            ++s.stage_exact;
            cond_exact += o.graph_exact;
        }
    }
    auto ratio = [](int a, int b) { return b ? static_cast<double>(a) / b : 0.0; };
    // nothing to recover counts as fully recovered
    auto vacuous = [](int a, int b) { return b ? static_cast<double>(a) / b : 1.0; };
    s.edge_rate = vacuous(s.edge_correct, s.edge_total);
    s.graph_exact_rate = ratio(exact, s.trials);
    s.subdivision_exact_rate = ratio(sub_exact, s.trials);
    s.pair_rate = vacuous(pair_correct, pair_total);
    s.conditional_exact_rate = ratio(cond_exact, s.stage_exact);
    return s;
}

inline TrialOutcome run_trial(const TrialConfig& cfg, int trial)
{
    TrialOutcome out;
    out.trial = trial;
    out.seed = trial_seed(cfg.seed, trial);
    auto start = std::chrono::steady_clock::now();
    try {
        RandomModelOptions opt;
        opt.hidden_probability = cfg.hidden_probability;
        opt.max_hidden = cfg.max_hidden;
        opt.bow_rule = cfg.bow_rule;
        opt.noise = cfg.noise;
        auto model = random_bowfree(cfg.p_pre, cfg.edges, out.seed, opt);
        out.truth = model.spec.graph;

        DiscoveryResult result;
        if (cfg.stage == StageKind::population) {
            result = run_mbang_population(model.spec, cfg.discovery);
            out.stage_exact = true;
        } else {
            auto sim = simulate(model.spec, cfg.n, mix_seed(out.seed));
            if (!cfg.export_dir.empty()) {
                auto base = std::filesystem::path(cfg.export_dir) / ("trial_" + std::to_string(trial));
                io::write_dataset(base.string() + ".csv", sim.data);
                io::write_text_file(base.string() + "_truth.json", io::to_json(model.spec).dump(2));
            }
            FirstStageResult stage;
            if (cfg.stage == StageKind::oracle) {
                stage = oracle_first_stage(model.spec);
            } else {
                auto path = std::filesystem::path(cfg.external_dir) / ("trial_" + std::to_string(trial) + ".json");
                stage = io::load_external_first_stage(path.string(), false);
            }
            out.stage_exact = stage.directed == out.truth.directed() &&
                              stage.bidirected == bidirected_subdivision(out.truth);
            result = run_mbang(sim.data, stage, cfg.discovery, false);
        }
        out.recovered = result.graph;
        auto exact = score(out.truth, out.recovered, ScoreMode::exact_edges);
        auto pairs = score(out.truth, out.recovered, ScoreMode::subdivision);
        out.edge_correct = exact.edge_correct;
        out.edge_total = exact.edge_total;
        out.graph_exact = exact.graph_exact;
        out.pair_correct = pairs.edge_correct;
        out.pair_total = pairs.edge_total;
        out.subdivision_exact = pairs.graph_exact;
    } catch (const std::exception& e) {
        out.error = e.what();
        if (out.error.empty()) out.error = "unknown failure";
    }
    out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
}

/// Run all trials on a pool of workers. Outcomes are ordered by trial index
/// and do not depend on the worker count.
inline BenchmarkResult run_benchmark(const TrialConfig& cfg)
{
    cfg.validate();
    if (!cfg.export_dir.empty()) std::filesystem::create_directories(cfg.export_dir);
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(cfg.trials));
    std::atomic<int> next{0};
    auto work = [&] {
        for (int t = next++; t < cfg.trials; t = next++) outcomes[static_cast<std::size_t>(t)] = run_trial(cfg, t);
    };
    unsigned workers = std::min<unsigned>(worker_count(cfg.threads), static_cast<unsigned>(cfg.trials));
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    pool.clear();
    auto summary = summarize(outcomes);
    return {std::move(outcomes), summary};
}

inline std::string outcomes_csv(const TrialConfig& cfg, const std::vector<TrialOutcome>& outcomes)
{
    std::ostringstream os;
    os << "trial,seed,n,edges,noise,edge_correct,edge_total,graph_exact,stage_exact,wall_ms\n";
    char ms[32];
    for (const auto& o : outcomes) {
        std::snprintf(ms, sizeof ms, "%.3f", o.wall_ms);
        os << o.trial << ',' << o.seed << ',' << cfg.n << ',' << cfg.edges << ",\"" << cfg.noise.to_string() << "\","
           << o.edge_correct << ',' << o.edge_total << ',' << (o.graph_exact ? 1 : 0) << ','
           << (o.stage_exact ? 1 : 0) << ',' << ms << '\n';
    }
    return os.str();
}

inline const char* to_string(StageKind s)
{
    switch (s) {
    case StageKind::oracle: return "oracle";
    case StageKind::external: return "external";
    case StageKind::population: return "population";
    }
    return "";
}

inline io::json summary_json(const TrialConfig& cfg, const BenchmarkSummary& s)
{
    return {{"config",
             {{"p_pre", cfg.p_pre},
              {"edges", cfg.edges},
              {"noise", cfg.noise.to_string()},
              {"n", cfg.n},
              {"trials", cfg.trials},
              {"stage", to_string(cfg.stage)},
              {"seed", cfg.seed},
              {"cumulant_tolerance", cfg.discovery.cumulant_tolerance},
              {"relaxed_test", io::to_string(cfg.discovery.relaxed)},
              {"standardize", cfg.discovery.standardize}}},
            {"trials", s.trials},
            {"failures", s.failures},
            {"edge_correct", s.edge_correct},
            {"edge_total", s.edge_total},
            {"edge_rate", s.edge_rate},
            {"graph_exact_rate", s.graph_exact_rate},
            {"subdivision_exact_rate", s.subdivision_exact_rate},
            {"pair_rate", s.pair_rate},
            {"stage_exact", s.stage_exact},
            {"conditional_exact_rate", s.conditional_exact_rate}};
}

} // namespace mbang
