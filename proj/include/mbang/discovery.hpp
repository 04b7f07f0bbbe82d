#pragma once

// Multidirected-edge discovery on top of a first-stage estimate.
//
// Pipeline: first stage (B_hat, bidirected pairs) -> X = Y - B_hat Y ->
// standardize rows -> cumulant-guided Bron-Kerbosch over the bidirected graph.
// A clique R = (i1..ik) is extended by v only if C^(k+1)_{R,v} is nonzero or,
// with the relaxed test, some C^(k+2)_{R,v,j} with j in R is nonzero.

#include "cumulants.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "lsem.hpp"
#include "matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iterator>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mbang {

struct FirstStageResult {
    Matrix B_hat;
    BidirectedGraph bidirected;
    std::vector<Edge> directed;
};

/// Pairs that appear both as a directed edge and as a bidirected pair.
inline std::vector<Edge> find_bows(const FirstStageResult& stage)
{
    std::vector<Edge> bows;
    for (const auto& [from, to] : stage.directed)
        if (stage.bidirected.adjacent(from, to)) bows.emplace_back(from, to);
    return bows;
}

/// Checks shapes, vertex ranges, B_hat support and (optionally) bow-freeness.
inline void validate(const FirstStageResult& stage, bool strict_bows = true)
{
    const auto p = static_cast<std::size_t>(stage.bidirected.p());
    if (stage.B_hat.rows() != p || stage.B_hat.cols() != p)
        throw ValidationError("first stage: B is " + std::to_string(stage.B_hat.rows()) + "x" +
                              std::to_string(stage.B_hat.cols()) + ", expected " + std::to_string(p) + "x" +
                              std::to_string(p));
    MixedGraph directed(static_cast<int>(p), stage.directed); // range and self-loop checks
    if (!is_acyclic(directed)) throw ValidationError("first stage: directed edges form a cycle");
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            double b = stage.B_hat(i, j);
            if (!std::isfinite(b)) throw ValidationError("first stage: B has a non-finite entry");
            if (b != 0.0 && !directed.has_directed(static_cast<Vertex>(i), static_cast<Vertex>(j)))
                throw ValidationError("first stage: B(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                      ") is nonzero without a directed edge");
        }
    if (strict_bows) {
        auto bows = find_bows(stage);
        if (!bows.empty())
            throw ValidationError("first stage: bow between " + std::to_string(bows[0].first + 1) + " and " +
                                  std::to_string(bows[0].second + 1));
    }
}

/// Ground-truth first stage: the true B (optionally perturbed entrywise by
/// U(-perturbation, perturbation) on its support) and the bidirected
/// subdivision of the true multidirected edges.
inline FirstStageResult oracle_first_stage(const LsemSpec& spec, double perturbation = 0.0, std::uint64_t seed = 0)
{
    FirstStageResult out{spec.B, bidirected_subdivision(spec.graph), spec.graph.directed()};
    if (perturbation > 0.0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-perturbation, perturbation);
        for (const auto& [from, to] : out.directed) out.B_hat(from, to) += u(rng);
    }
    return out;
}

enum class RelaxedTest {
    off,     // strict: only C^(k+1)_{R,v}
    listing, // also C^(k+2)_{R,v,j} for j in R
    prose,   // also C^(k+2)_{R,v,j} for j in R U {v}
};

enum class ZeroTestMode {
    threshold, // |C| > cumulant_tolerance
    exact,     // |C| > 1e-9, for population cumulants
};

struct DiscoveryConfig {
    double cumulant_tolerance = 0.05;
    bool standardize = true;
    RelaxedTest relaxed = RelaxedTest::listing;
    ZeroTestMode zero_test = ZeroTestMode::threshold;

    static constexpr double exact_zero = 1e-9;

    double effective_tolerance() const { return zero_test == ZeroTestMode::exact ? exact_zero : cumulant_tolerance; }

    void validate() const
    {
        if (!std::isfinite(cumulant_tolerance) || cumulant_tolerance < 0.0)
            throw UsageError("cumulant tolerance must be finite and non-negative");
    }
};

/// The cumulant entry that justified adding a vertex to a clique.
struct MergeEvidence {
    Vertex added = -1;
    std::vector<Vertex> index; // as queried, R then v (then the repeated j)
    double value = 0.0;
};

struct CumulantTestOutcome {
    bool passed = false;
    MergeEvidence evidence; // the passing entry, or the largest entry examined
};

/// Nonvanishing test for extending clique R by v.
inline CumulantTestOutcome cumulant_test(CumulantSource& cumulants, std::span<const Vertex> clique, Vertex v,
                                         const DiscoveryConfig& cfg)
{
    const double tol = cfg.effective_tolerance();
    CumulantTestOutcome out;
    out.evidence.added = v;
    bool first = true;
    auto probe = [&](std::vector<Vertex> idx) {
        double value = cumulants.cumulant(idx);
        if (first || std::abs(value) > std::abs(out.evidence.value)) {
            out.evidence.index = idx;
            out.evidence.value = value;
            first = false;
        }
        if (std::abs(value) > tol) {
            out.passed = true;
            out.evidence.index = std::move(idx);
            out.evidence.value = value;
        }
        return out.passed;
    };

    std::vector<Vertex> base(clique.begin(), clique.end());
    base.push_back(v);
    if (probe(base)) return out;
    if (cfg.relaxed == RelaxedTest::off) return out;
    std::vector<Vertex> repeats(clique.begin(), clique.end());
    if (cfg.relaxed == RelaxedTest::prose) repeats.push_back(v);
    for (Vertex j : repeats) {
        auto idx = base;
        idx.push_back(j);
        if (probe(std::move(idx))) return out;
    }
    return out;
}

struct DiscoveredEdge {
    VertexSet vertices;
    std::vector<MergeEvidence> merges; // one per vertex added after the first
};

/// Extension predicate for the clique search: given R and v, return evidence
/// if R may be extended by v.
using ExtensionTest = std::function<std::optional<MergeEvidence>(std::span<const Vertex>, Vertex)>;

/// Pivotless Bron-Kerbosch over the bidirected graph in which each extension
/// must pass `test`. Cliques of one or two vertices need no test (pairs come
/// certified from the first stage). R is reported once P is exhausted and no
/// vertex of Q passes the test against R, so a clique whose extension fails
/// is still reported as its own edge.
inline std::vector<DiscoveredEdge> find_multidirected(const BidirectedGraph& bg, const ExtensionTest& test)
{
    std::vector<DiscoveredEdge> found;
    std::vector<Vertex> r;
    std::vector<MergeEvidence> trail;

    auto intersect = [](const std::vector<Vertex>& a, const std::vector<Vertex>& b) {
        std::vector<Vertex> out;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
        return out;
    };

    std::function<void(std::vector<Vertex>, std::vector<Vertex>)> search = [&](std::vector<Vertex> p,
                                                                                std::vector<Vertex> q) {
        const auto excluded = q;
        const auto candidates = p;
        bool extended = false;
        for (Vertex v : candidates) {
            const auto& nv = bg.neighbors(v);
            if (!nv.empty()) {
                std::optional<MergeEvidence> ok;
                if (r.size() < 2)
                    ok = MergeEvidence{v, {}, 0.0};
                else
                    ok = test(r, v);
                if (ok) {
                    extended = true;
                    r.push_back(v);
                    if (r.size() > 1) trail.push_back(*ok);
                    search(intersect(p, nv), intersect(q, nv));
                    if (r.size() > 1) trail.pop_back();
                    r.pop_back();
                }
            }
            p.erase(std::find(p.begin(), p.end(), v));
            q.insert(std::upper_bound(q.begin(), q.end(), v), v);
        }
        if (extended || r.size() < 2) return;
        // Q holds earlier branches; R is theirs if any of them passes against R.
        if (std::any_of(excluded.begin(), excluded.end(), [&](Vertex u) { return test(r, u).has_value(); })) return;
        DiscoveredEdge e{r, trail};
        std::sort(e.vertices.begin(), e.vertices.end());
        found.push_back(std::move(e));
    };

    std::vector<Vertex> all;
    for (Vertex v = 0; v < bg.p(); ++v) all.push_back(v);
    search(std::move(all), {});

    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.vertices < b.vertices; });
    found.erase(std::unique(found.begin(), found.end(),
                            [](const auto& a, const auto& b) { return a.vertices == b.vertices; }),
                found.end());
    return found;
}

inline std::vector<DiscoveredEdge> find_multidirected(CumulantSource& cumulants, const BidirectedGraph& bg,
                                                      const DiscoveryConfig& cfg)
{
    cfg.validate();
    if (cumulants.p() != bg.p()) throw ValidationError("cumulant source and bidirected graph disagree on p");
    if (bg.empty()) return {};
    return find_multidirected(bg, [&](std::span<const Vertex> r, Vertex v) -> std::optional<MergeEvidence> {
        auto outcome = cumulant_test(cumulants, r, v, cfg);
        if (!outcome.passed) return std::nullopt;
        return outcome.evidence;
    });
}

struct DiscoveryResult {
    MixedGraph graph;
    Matrix B_hat;
    std::vector<DiscoveredEdge> edges;
};

inline DiscoveryResult assemble(const FirstStageResult& stage, std::vector<DiscoveredEdge> edges)
{
    std::vector<VertexSet> multi;
    for (const auto& e : edges) multi.push_back(e.vertices);
    return {MixedGraph(stage.bidirected.p(), stage.directed, std::move(multi)), stage.B_hat, std::move(edges)};
}

/// Full pipeline on data with a precomputed first stage.
inline DiscoveryResult run_mbang(const Dataset& y, const FirstStageResult& stage, const DiscoveryConfig& cfg,
                                 bool strict_bows = true)
{
    cfg.validate();
    validate(stage, strict_bows);
    if (static_cast<int>(y.p()) != stage.bidirected.p())
        throw ValidationError("data has " + std::to_string(y.p()) + " variables but first stage has " +
                              std::to_string(stage.bidirected.p()));
    if (stage.bidirected.empty()) return assemble(stage, {});
    Dataset x = center_rows(dedirect(y, stage.B_hat));
    if (cfg.standardize) x = standardize_rows(std::move(x));
    SampleCumulants cumulants(std::move(x));
    return assemble(stage, find_multidirected(cumulants, stage.bidirected, cfg));
}

using FirstStageProvider = std::function<FirstStageResult(const Dataset&)>;

inline DiscoveryResult run_mbang(const Dataset& y, const FirstStageProvider& provider, const DiscoveryConfig& cfg,
                                 bool strict_bows = true)
{
    FirstStageResult stage;
    try {
        stage = provider(y);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("first stage failed: ") + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("first stage failed: ") + e.what());
    }
    return run_mbang(y, stage, cfg, strict_bows);
}

/// Pipeline on population moments: oracle first stage and the exact
/// cumulants of the noise vector that X = Y - BY reduces to.
inline DiscoveryResult run_mbang_population(const LsemSpec& spec, const DiscoveryConfig& cfg)
{
    cfg.validate();
    auto stage = oracle_first_stage(spec);
    if (stage.bidirected.empty()) return assemble(stage, {});
    auto cumulants = population_noise_cumulants(spec);
    if (cfg.standardize) cumulants.standardize();
    return assemble(stage, find_multidirected(cumulants, stage.bidirected, cfg));
}

} // namespace mbang
