#pragma once

// Linear structural equation models on acyclic mixed graphs.
//
// Matrix convention: B(i, j) is the direct effect of vertex i on vertex j
// (row = cause). In column form X = B^T X + eps, i.e. X = (I - B^T)^{-1} eps.
// Each multidirected edge h carries one hidden source H_h with loadings, so
// eps_i = e_i + sum_{h containing i} loading(h, i) * H_h.

#include "cumulants.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "matrix.hpp"
#include "noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace mbang {

struct LsemSpec {
    MixedGraph graph;
    Matrix B;                                  // p x p, B(i, j) = effect of i on j
    std::vector<std::vector<double>> loadings; // loadings[e][m]: weight of hidden source e on graph.multi()[e][m]
    std::vector<NoiseSpec> noise;              // p observed noises, then one per multidirected edge

    int p() const noexcept { return graph.p(); }
    std::size_t hidden_count() const noexcept { return graph.multi().size(); }

    const NoiseSpec& observed_noise(Vertex v) const { return noise.at(static_cast<std::size_t>(v)); }
    const NoiseSpec& hidden_noise(std::size_t e) const { return noise.at(static_cast<std::size_t>(p()) + e); }

    friend bool operator==(const LsemSpec&, const LsemSpec&) = default;
};

/// Throws ValidationError unless the spec is internally consistent. Bow-free
/// is part of the model class but can be waived for oracle experiments.
inline void validate(const LsemSpec& spec, bool require_bow_free = true)
{
    const auto p = static_cast<std::size_t>(spec.p());
    if (spec.B.rows() != p || spec.B.cols() != p) throw ValidationError("B must be p x p");
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            double b = spec.B(i, j);
            if (!std::isfinite(b)) throw ValidationError("B has a non-finite entry");
            if (b != 0.0 && !spec.graph.has_directed(static_cast<Vertex>(i), static_cast<Vertex>(j)))
                throw ValidationError("B(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                      ") is nonzero but " + std::to_string(i + 1) + " -> " + std::to_string(j + 1) +
                                      " is not an edge");
        }
    if (!is_acyclic(spec.graph)) throw ValidationError("graph has a directed cycle");
    if (require_bow_free && !is_bow_free(spec.graph)) throw ValidationError("graph has a bow");
    if (spec.loadings.size() != spec.hidden_count())
        throw ValidationError("need one loading vector per multidirected edge");
    for (std::size_t e = 0; e < spec.hidden_count(); ++e) {
        if (spec.loadings[e].size() != spec.graph.multi()[e].size())
            throw ValidationError("loading vector " + std::to_string(e + 1) + " has the wrong length");
        for (double x : spec.loadings[e])
            if (!std::isfinite(x)) throw ValidationError("non-finite hidden loading");
    }
    if (spec.noise.size() != p + spec.hidden_count())
        throw ValidationError("need one noise law per observed vertex and per multidirected edge");
}

/// Total-effect matrix A = (I - B^T)^{-1}: A(i, j) is the effect of eps_j on X_i.
inline Matrix total_effects(const LsemSpec& spec)
{
    auto order = topological_order(spec.graph);
    if (!order) throw ValidationError("graph has a directed cycle");
    const auto p = static_cast<std::size_t>(spec.p());
    std::vector<std::vector<Vertex>> parents(p);
    for (const auto& [from, to] : spec.graph.directed()) parents[to].push_back(from);
    Matrix a(p, p);
    for (std::size_t src = 0; src < p; ++src) {
        for (Vertex v : *order) {
            double x = (static_cast<std::size_t>(v) == src) ? 1.0 : 0.0;
            for (Vertex u : parents[v]) x += spec.B(u, v) * a(u, src);
            a(v, src) = x;
        }
    }
    return a;
}

/// Population cumulants of X under the spec, as a mixture of the p observed
/// noises and the hidden sources.
inline MixtureCumulants population_cumulants(const LsemSpec& spec)
{
    validate(spec, false);
    const auto p = static_cast<std::size_t>(spec.p());
    const std::size_t m = spec.hidden_count();
    Matrix a = total_effects(spec);
    Matrix mixing(p, p + m);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) mixing(i, j) = a(i, j);
    for (std::size_t e = 0; e < m; ++e) {
        const auto& h = spec.graph.multi()[e];
        for (std::size_t i = 0; i < p; ++i) {
            double t = 0.0;
            for (std::size_t k = 0; k < h.size(); ++k) t += a(i, static_cast<std::size_t>(h[k])) * spec.loadings[e][k];
            mixing(i, p + e) = t;
        }
    }
    auto noise = spec.noise;
    return MixtureCumulants(std::move(mixing),
                            [noise = std::move(noise)](std::size_t s, int k) { return noise[s].cumulant(k); });
}

/// Population cumulants of the correlated noise vector eps (what X = Y - BY
/// becomes when the true B is removed).
inline MixtureCumulants population_noise_cumulants(const LsemSpec& spec)
{
    LsemSpec bare = spec;
    bare.graph = MixedGraph(spec.p(), {}, spec.graph.multi());
    bare.B = Matrix(static_cast<std::size_t>(spec.p()), static_cast<std::size_t>(spec.p()));
    return population_cumulants(bare);
}

inline CumulantTensor population_cumulant_tensor(const LsemSpec& spec, int k)
{
    auto source = population_cumulants(spec);
    return CumulantTensor::from_source(source, k);
}

struct Simulation {
    Dataset data;  // Y, p x n
    Matrix noise;  // eps, p x n, recorded before propagation
};

/// Draw n samples. Sources are drawn in order (observed noises, then hidden
/// sources), each as a block of n values, from one mt19937_64 stream.
inline Simulation simulate(const LsemSpec& spec, std::size_t n, std::uint64_t seed)
{
    if (n == 0) throw UsageError("sample count must be positive");
    validate(spec);
    const auto p = static_cast<std::size_t>(spec.p());
    const std::size_t m = spec.hidden_count();
    std::mt19937_64 rng(seed);

    Matrix eps(p, n);
    for (std::size_t i = 0; i < p; ++i) {
        const auto& law = spec.noise[i];
        for (double& x : eps.row(i)) x = law.sample(rng);
    }
    std::vector<double> hidden(n);
    for (std::size_t e = 0; e < m; ++e) {
        const auto& law = spec.noise[p + e];
        for (double& x : hidden) x = law.sample(rng);
        const auto& h = spec.graph.multi()[e];
        for (std::size_t k = 0; k < h.size(); ++k) {
            auto row = eps.row(static_cast<std::size_t>(h[k]));
            for (std::size_t j = 0; j < n; ++j) row[j] += spec.loadings[e][k] * hidden[j];
        }
    }

    auto order = *topological_order(spec.graph);
    std::vector<std::vector<Vertex>> parents(p);
    for (const auto& [from, to] : spec.graph.directed()) parents[to].push_back(from);
    Matrix y(p, n);
    for (Vertex v : order) {
        auto out = y.row(static_cast<std::size_t>(v));
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (Vertex u : parents[v]) s += spec.B(u, v) * y(u, j);
            out[j] = s + eps(v, j);
        }
    }
    return {Dataset(std::move(y)), std::move(eps)};
}

/// X = Y - B^T Y in column form: strip the estimated direct effects.
inline Dataset dedirect(const Dataset& y, const Matrix& b)
{
    const std::size_t p = y.p();
    if (b.rows() != p || b.cols() != p)
        throw ValidationError("dedirect: effects matrix is " + std::to_string(b.rows()) + "x" +
                              std::to_string(b.cols()) + " but data has " + std::to_string(p) + " rows");
    const std::size_t n = y.n();
    Dataset x(Matrix(p, n), y.labels());
    for (std::size_t v = 0; v < p; ++v) {
        auto out = x.row(v);
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t u = 0; u < p; ++u)
                if (b(u, v) != 0.0) s += b(u, v) * y(u, j);
            out[j] = y(v, j) - s;
        }
    }
    return x;
}

inline Dataset center_rows(Dataset x)
{
    for (std::size_t i = 0; i < x.p(); ++i) {
        auto r = x.row(i);
        double mean = 0.0;
        for (double v : r) mean += v;
        mean /= static_cast<double>(r.size());
        for (double& v : r) v -= mean;
    }
    return x;
}

/// Divide each row by its empirical standard deviation (1/n normalization).
inline Dataset standardize_rows(Dataset x)
{
    if (x.n() == 0) throw UsageError("empty dataset");
    for (std::size_t i = 0; i < x.p(); ++i) {
        auto r = x.row(i);
        double mean = 0.0;
        for (double v : r) mean += v;
        mean /= static_cast<double>(r.size());
        double ss = 0.0;
        for (double v : r) ss += (v - mean) * (v - mean);
        double sd = std::sqrt(ss / static_cast<double>(r.size()));
        if (!(sd > 0.0) || !std::isfinite(sd))
            throw NumericalError("row " + x.labels()[i] + " has zero variance");
        for (double& v : r) v /= sd;
    }
    return x;
}

/// How a bow created by marginalization is broken.
enum class BowRule {
    drop_parent_from_edge, // i -> j with i, j in h: remove i from h
    drop_directed_edge,    // ... or remove i -> j instead
};

struct Marginalization {
    MixedGraph graph;               // on observed vertices, relabeled 0..p_obs-1
    std::vector<Vertex> observed;   // observed[new] = old vertex
    std::vector<Vertex> edge_owner; // hidden (old) vertex that produced graph.multi()[e]
};

/// Canonical mixed graph of a DAG with parentless hidden vertices: each hidden
/// vertex with >= 2 observed children becomes one multidirected edge on them.
inline Marginalization marginalize(const MixedGraph& dag, const std::vector<Vertex>& hidden,
                                   BowRule rule = BowRule::drop_parent_from_edge)
{
    if (!dag.multi().empty()) throw ValidationError("marginalize expects a DAG without multidirected edges");
    if (!is_acyclic(dag)) throw ValidationError("marginalize expects an acyclic graph");
    const int p = dag.p();
    std::vector<char> is_hidden(static_cast<std::size_t>(p), 0);
    for (Vertex h : hidden) {
        detail::check_vertex(h, p, "hidden vertex");
        if (!dag.parents(h).empty())
            throw ValidationError("hidden vertex " + std::to_string(h + 1) + " has parents");
        is_hidden[h] = 1;
    }

    Marginalization out;
    std::vector<Vertex> relabel(static_cast<std::size_t>(p), -1);
    for (Vertex v = 0; v < p; ++v) {
        if (!is_hidden[v]) {
            relabel[v] = static_cast<Vertex>(out.observed.size());
            out.observed.push_back(v);
        }
    }

    std::vector<Edge> directed;
    for (const auto& [from, to] : dag.directed())
        if (!is_hidden[from]) directed.emplace_back(relabel[from], relabel[to]);

    std::vector<std::pair<VertexSet, Vertex>> edges;
    for (Vertex h = 0; h < p; ++h) {
        if (!is_hidden[h]) continue;
        VertexSet kids;
        for (Vertex c : dag.children(h)) kids.push_back(relabel[c]);
        std::sort(kids.begin(), kids.end());
        if (kids.size() >= 2) edges.emplace_back(std::move(kids), h);
    }

    auto has_edge = [&directed](Vertex a, Vertex b) {
        return std::find(directed.begin(), directed.end(), Edge{a, b}) != directed.end();
    };
    if (rule == BowRule::drop_parent_from_edge) {
        for (auto& [set, owner] : edges) {
            bool changed = true;
            while (changed) {
                changed = false;
                for (auto it = set.begin(); it != set.end(); ++it) {
                    bool is_parent = std::any_of(set.begin(), set.end(), [&](Vertex j) { return has_edge(*it, j); });
                    if (is_parent) {
                        set.erase(it);
                        changed = true;
                        break;
                    }
                }
            }
        }
    } else {
        std::erase_if(directed, [&](const Edge& d) {
            return std::any_of(edges.begin(), edges.end(), [&](const auto& e) {
                return std::binary_search(e.first.begin(), e.first.end(), d.first) &&
                       std::binary_search(e.first.begin(), e.first.end(), d.second);
            });
        });
    }

    std::erase_if(edges, [](const auto& e) { return e.first.size() < 2; });
    // Identical vertex sets collapse to one edge; the first owner is kept.
    std::stable_sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    edges.erase(std::unique(edges.begin(), edges.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
                edges.end());

    std::vector<VertexSet> multi;
    for (const auto& [set, owner] : edges) {
        multi.push_back(set);
        out.edge_owner.push_back(owner);
    }
    out.graph = MixedGraph(static_cast<int>(out.observed.size()), std::move(directed), std::move(multi));
    return out;
}

struct RandomModelOptions {
    double hidden_probability = 0.5;
    int max_hidden = 3;
    BowRule bow_rule = BowRule::drop_parent_from_edge;
    NoiseSpec noise = NoiseSpec::uniform(-10.0, 10.0);
};

struct RandomModel {
    LsemSpec spec;             // on the observed vertices; spec.graph is the ground truth
    MixedGraph dag;            // pre-marginalization DAG
    std::vector<Vertex> observed;
};

/// Coefficient drawn uniformly from (-1, -0.6) U (0.6, 1).
template <typename Rng>
double draw_coefficient(Rng& rng)
{
    double magnitude = std::uniform_real_distribution<double>(0.6, 1.0)(rng);
    return std::bernoulli_distribution(0.5)(rng) ? magnitude : -magnitude;
}

/// Random bow-free acyclic mixed graph with coefficients: e edges chosen
/// uniformly among pairs i < j, parentless vertices with >= 2 children hidden
/// with the given probability, then marginalized.
inline RandomModel random_bowfree(int p, int e, std::uint64_t seed, const RandomModelOptions& opt = {})
{
    if (p < 1) throw UsageError("vertex count must be positive");
    const int max_edges = p * (p - 1) / 2;
    if (e < 0 || e > max_edges)
        throw UsageError("edge count " + std::to_string(e) + " outside 0.." + std::to_string(max_edges));
    std::mt19937_64 rng(seed);

    std::vector<Edge> pairs;
    for (Vertex i = 0; i < p; ++i)
        for (Vertex j = i + 1; j < p; ++j) pairs.emplace_back(i, j);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    pairs.resize(static_cast<std::size_t>(e));
    std::sort(pairs.begin(), pairs.end());
    Matrix coef(static_cast<std::size_t>(p), static_cast<std::size_t>(p));
    for (const auto& [i, j] : pairs) coef(i, j) = draw_coefficient(rng);
    MixedGraph dag(p, pairs);

    std::vector<Vertex> hidden;
    std::bernoulli_distribution coin(opt.hidden_probability);
    for (Vertex v = 0; v < p; ++v) {
        if (!dag.parents(v).empty() || dag.children(v).size() < 2) continue;
        bool hide = coin(rng);
        if (hide && static_cast<int>(hidden.size()) < opt.max_hidden) hidden.push_back(v);
    }

    auto marg = marginalize(dag, hidden, opt.bow_rule);
    const auto q = static_cast<std::size_t>(marg.graph.p());
    LsemSpec spec;
    spec.graph = marg.graph;
    spec.B = Matrix(q, q);
    for (const auto& [i, j] : marg.graph.directed()) spec.B(i, j) = coef(marg.observed[i], marg.observed[j]);
    for (std::size_t k = 0; k < marg.graph.multi().size(); ++k) {
        std::vector<double> load;
        for (Vertex c : marg.graph.multi()[k]) load.push_back(coef(marg.edge_owner[k], marg.observed[c]));
        spec.loadings.push_back(std::move(load));
    }
    spec.noise.assign(q + marg.graph.multi().size(), opt.noise);
    return {std::move(spec), std::move(dag), std::move(marg.observed)};
}

} // namespace mbang
