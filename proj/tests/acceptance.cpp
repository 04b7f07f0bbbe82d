// One line per acceptance criterion; exit status is nonzero if any fails.

#include "fixtures.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

using namespace mbang;
using namespace fixtures;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail, double seconds)
{
    std::printf("%s [%d] %s: %s (%.1fs)\n", ok ? "PASS" : "FAIL", id, name, detail.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++failures;
}

template <typename Fn>
void criterion(int id, const char* name, Fn&& fn)
{
    auto start = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
        ok = fn(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    report(id, name, ok, detail, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

std::string fmt(const char* f, auto... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

DiscoveryConfig sample_cfg(RelaxedTest relaxed = RelaxedTest::listing)
{
    DiscoveryConfig cfg;
    cfg.cumulant_tolerance = 0.05;
    cfg.standardize = true;
    cfg.relaxed = relaxed;
    return cfg;
}

MixedGraph discover(const LsemSpec& spec, std::size_t n, std::uint64_t seed, const DiscoveryConfig& cfg)
{
    auto sim = simulate(spec, n, seed);
    return run_mbang(sim.data, oracle_first_stage(spec), cfg).graph;
}

} // namespace

int main()
{
    criterion(1, "multi-trek rule", [](std::string& d) {
        std::mt19937_64 rng(20240501);
        long checked = 0, violations = 0;
        for (int g = 0; g < 300; ++g) {
            int p = 2 + g % 4;
            auto spec = random_generic_spec(p, rng);
            auto pop = population_cumulants(spec);
            for (int k = 2; k <= 4; ++k) {
                if (k > p) continue;
                for (const auto& tup : distinct_tuples(p, k)) {
                    ++checked;
                    bool zero = std::abs(pop.cumulant(tup)) <= 1e-9;
                    if (zero == has_k_trek(spec.graph, VertexTuple(tup, p))) ++violations;
                }
            }
        }
        d = fmt("%ld tuples over 300 graphs, %ld violations", checked, violations);
        return violations == 0;
    });

    criterion(2, "population-oracle pipeline", [](std::string& d) {
        DiscoveryConfig cfg;
        cfg.zero_test = ZeroTestMode::exact;
        int exact = 0, total = 0;
        for (int edges : {5, 8})
            for (std::uint64_t t = 0; t < 100; ++t) {
                auto model = random_bowfree(7, edges, trial_seed(edges, static_cast<int>(t)));
                ++total;
                exact += run_mbang_population(model.spec, cfg).graph == model.spec.graph;
            }
        double rate = static_cast<double>(exact) / total;
        d = fmt("%d/%d exact (%.3f, need >= 0.99)", exact, total, rate);
        return rate >= 0.99;
    });

    criterion(3, "cumulant estimator convergence", [](std::string& d) {
        auto spec = shared_cause_spec();
        const Vertex idx[3] = {1, 2, 3};
        auto pop = population_cumulants(spec);
        double truth = pop.cumulant(idx);
        int within = 0;
        double worst = 0.0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            SampleCumulants s(center_rows(simulate(spec, 200000, seed).data));
            double rel = std::abs(s.cumulant(idx) - truth) / std::abs(truth);
            worst = std::max(worst, rel);
            within += rel <= 0.10;
        }
        d = fmt("C(2,3,4) population %.3f; %d/10 seeds within 10%% (worst %.3f)", truth, within, worst);
        return within >= 9;
    });

    criterion(4, "split vs shared hidden cause", [](std::string& d) {
        auto c1 = split_cause_spec(), c2 = shared_cause_spec();
        int ok1 = 0, ok2 = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            ok1 += discover(c1, 50000, seed, sample_cfg()).multi() == sets1({{2, 3}, {3, 4}});
            ok2 += discover(c2, 50000, 1000 + seed, sample_cfg()).multi() == sets1({{2, 3, 4}});
        }
        d = fmt("split %d/20, shared %d/20 (need >= 18 each)", ok1, ok2);
        return ok1 >= 18 && ok2 >= 18;
    });

    criterion(5, "finite-sample consistency trend", [](std::string& d) {
        TrialConfig cfg;
        cfg.p_pre = 7;
        cfg.edges = 5;
        cfg.noise = NoiseSpec::uniform(-10, 10);
        cfg.trials = 50;
        cfg.seed = 2024;
        cfg.stage = StageKind::oracle;
        cfg.discovery = sample_cfg();
        std::vector<double> rates;
        for (std::size_t n : {10000u, 25000u, 50000u}) {
            cfg.n = n;
            rates.push_back(run_benchmark(cfg).summary.graph_exact_rate);
        }
        d = fmt("exact rate n=10k %.2f, 25k %.2f, 50k %.2f (non-decreasing, last >= 0.85)", rates[0], rates[1],
                rates[2]);
        return rates[0] <= rates[1] && rates[1] <= rates[2] && rates[2] >= 0.85;
    });

    criterion(6, "always-true test equals Bron-Kerbosch", [](std::string& d) {
        std::mt19937_64 rng(6);
        ExtensionTest yes = [](std::span<const Vertex>, Vertex v) {
            return std::optional<MergeEvidence>(MergeEvidence{v, {}, 1.0});
        };
        int agree = 0;
        for (int g = 0; g < 100; ++g) {
            auto bg = random_bidirected(2 + g % 7, 0.2 + 0.15 * (g % 5), rng);
            std::vector<VertexSet> got;
            for (const auto& e : find_multidirected(bg, yes)) got.push_back(e.vertices);
            auto brute = brute_force_cliques(bg);
            agree += got == brute && enumerate_cliques(bg) == brute;
        }
        d = fmt("%d/100 graphs agree with exhaustive enumeration", agree);
        return agree == 100;
    });

    criterion(7, "symmetric-noise relaxation", [](std::string& d) {
        auto spec = shared_cause_spec(NoiseSpec::uniform(-10, 10));
        const auto target = sets1({{2, 3, 4}});
        int relaxed_found = 0, strict_missed = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            auto sim = simulate(spec, 50000, seed);
            auto stage = oracle_first_stage(spec);
            auto relaxed = run_mbang(sim.data, stage, sample_cfg(RelaxedTest::listing)).graph.multi();
            auto strict = run_mbang(sim.data, stage, sample_cfg(RelaxedTest::off)).graph.multi();
            relaxed_found += relaxed == target;
            strict_missed += std::find(strict.begin(), strict.end(), target.front()) == strict.end();
        }
        d = fmt("relaxed found %d/20, strict missed %d/20 (need >= 18 each)", relaxed_found, strict_missed);
        return relaxed_found >= 18 && strict_missed >= 18;
    });

    criterion(8, "dedirect identity", [](std::string& d) {
        double worst = 0.0;
        for (std::uint64_t s = 1; s <= 50; ++s) {
            auto model = random_bowfree(7, 2 + static_cast<int>(s % 11), s);
            auto sim = simulate(model.spec, 1000, mix_seed(s));
            auto x = dedirect(sim.data, model.spec.B);
            for (std::size_t i = 0; i < x.p(); ++i)
                for (std::size_t j = 0; j < x.n(); ++j) worst = std::max(worst, std::abs(x(i, j) - sim.noise(i, j)));
        }
        d = fmt("max |X - eps| over 50 specs = %.2e (need <= 1e-10)", worst);
        return worst <= 1e-10;
    });

    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
