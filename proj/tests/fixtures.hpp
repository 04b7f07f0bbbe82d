#pragma once

// Small hand-built models shared by the unit and acceptance suites.
// Builders take 1-based labels to keep them readable next to drawings.

#include <mbang/mbang.hpp>

#include <algorithm>
#include <random>
#include <vector>

namespace fixtures {

using namespace mbang;

inline std::vector<Edge> edges1(std::initializer_list<std::pair<int, int>> e)
{
    std::vector<Edge> out;
    for (auto [a, b] : e) out.emplace_back(a - 1, b - 1);
    return out;
}

inline std::vector<VertexSet> sets1(std::initializer_list<std::initializer_list<int>> s)
{
    std::vector<VertexSet> out;
    for (auto h : s) {
        VertexSet v;
        for (int x : h) v.push_back(x - 1);
        out.push_back(v);
    }
    return out;
}

inline std::vector<Vertex> tuple1(std::initializer_list<int> t)
{
    std::vector<Vertex> out;
    for (int x : t) out.push_back(x - 1);
    return out;
}

inline MixedGraph graph1(int p, std::initializer_list<std::pair<int, int>> directed,
                         std::initializer_list<std::initializer_list<int>> multi = {})
{
    return MixedGraph(p, edges1(directed), sets1(multi));
}

// Seven-vertex DAG whose vertices 1 and 5 are hidden: 1 feeds 3, 4, 6 and
// 5 feeds 2, 7; 2 -> 3 and 6 -> 7 stay observed.
inline MixedGraph two_hidden_dag() { return graph1(7, {{1, 3}, {1, 4}, {1, 6}, {5, 2}, {5, 7}, {2, 3}, {6, 7}}); }

// Its canonical mixed graph on observed vertices (2,3,4,6,7) -> (1..5).
inline MixedGraph two_hidden_graph() { return graph1(5, {{1, 2}, {4, 5}}, {{2, 3, 4}, {1, 5}}); }

// Same edges as two_hidden_graph but with only directed and bidirected edges.
inline MixedGraph two_hidden_pairs_graph() { return graph1(5, {{1, 2}, {4, 5}}, {{2, 3}, {2, 4}, {3, 4}, {1, 5}}); }

inline LsemSpec two_hidden_spec()
{
    LsemSpec s;
    s.graph = two_hidden_graph();
    s.B = Matrix(5, 5);
    s.B(0, 1) = 0.7;
    s.B(3, 4) = -0.8;
    // graph.multi() is sorted: {1,5} then {2,3,4} (0-based {0,4}, {1,2,3}).
    s.loadings = {{0.9, -0.75}, {1.0, 0.8, -0.9}};
    s.noise.assign(5 + 2, NoiseSpec::gamma(2, 4));
    return s;
}

// Two hidden causes over {2,3} and {3,4}: no hidden cause shared by all three.
inline LsemSpec split_cause_spec(NoiseSpec hidden = NoiseSpec::chi_squared(2))
{
    LsemSpec s;
    s.graph = graph1(4, {{1, 2}, {1, 4}}, {{2, 3}, {3, 4}});
    s.B = Matrix(4, 4);
    s.B(0, 1) = 0.8;
    s.B(0, 3) = -0.7;
    s.loadings = {{1.0, 1.0}, {1.0, 1.0}};
    s.noise = {NoiseSpec::exponential(1), NoiseSpec::exponential(1), NoiseSpec::exponential(1),
               NoiseSpec::exponential(1), hidden, hidden};
    return s;
}

// One hidden cause over {2,3,4} with unit loadings.
inline LsemSpec shared_cause_spec(NoiseSpec hidden = NoiseSpec::chi_squared(2))
{
    LsemSpec s;
    s.graph = graph1(4, {{1, 2}, {1, 4}}, {{2, 3, 4}});
    s.B = Matrix(4, 4);
    s.B(0, 1) = 0.8;
    s.B(0, 3) = -0.7;
    s.loadings = {{1.0, 1.0, 1.0}};
    s.noise = {NoiseSpec::exponential(1), NoiseSpec::exponential(1), NoiseSpec::exponential(1),
               NoiseSpec::exponential(1), hidden};
    return s;
}

/// Random acyclic mixed graph (bows allowed) with generic coefficients and
/// gamma noises of random shape and rate.
inline LsemSpec random_generic_spec(int p, std::mt19937_64& rng)
{
    std::bernoulli_distribution coin(0.4);
    std::vector<Edge> directed;
    for (Vertex i = 0; i < p; ++i)
        for (Vertex j = i + 1; j < p; ++j)
            if (coin(rng)) directed.emplace_back(i, j);
    std::vector<VertexSet> multi;
    std::uniform_int_distribution<int> edge_count(0, 2);
    std::uniform_int_distribution<int> size(2, std::max(2, p));
    for (int e = edge_count(rng); e > 0; --e) {
        std::vector<Vertex> all(static_cast<std::size_t>(p));
        for (int v = 0; v < p; ++v) all[v] = v;
        std::shuffle(all.begin(), all.end(), rng);
        all.resize(static_cast<std::size_t>(std::min(p, size(rng))));
        if (all.size() >= 2) multi.push_back(all);
    }
    LsemSpec s;
    s.graph = MixedGraph(p, directed, multi);
    s.B = Matrix(static_cast<std::size_t>(p), static_cast<std::size_t>(p));
    for (const auto& [i, j] : s.graph.directed()) s.B(i, j) = draw_coefficient(rng);
    for (const auto& h : s.graph.multi()) {
        std::vector<double> l;
        for (std::size_t k = 0; k < h.size(); ++k) l.push_back(draw_coefficient(rng));
        s.loadings.push_back(l);
    }
    std::uniform_real_distribution<double> shape(1.0, 3.0), rate(0.5, 2.0);
    for (std::size_t k = 0; k < static_cast<std::size_t>(p) + s.graph.multi().size(); ++k)
        s.noise.push_back(NoiseSpec::gamma(shape(rng), rate(rng)));
    return s;
}

/// Every ordered tuple of k distinct vertices from 0..p-1.
inline std::vector<std::vector<Vertex>> distinct_tuples(int p, int k)
{
    std::vector<std::vector<Vertex>> out;
    std::vector<Vertex> cur;
    std::vector<char> used(static_cast<std::size_t>(p), 0);
    auto rec = [&](auto&& self) -> void {
        if (static_cast<int>(cur.size()) == k) {
            out.push_back(cur);
            return;
        }
        for (Vertex v = 0; v < p; ++v) {
            if (used[v]) continue;
            used[v] = 1;
            cur.push_back(v);
            self(self);
            cur.pop_back();
            used[v] = 0;
        }
    };
    rec(rec);
    return out;
}

/// Maximal cliques (size >= 2) by checking every vertex subset.
inline std::vector<VertexSet> brute_force_cliques(const BidirectedGraph& bg)
{
    const int p = bg.p();
    std::vector<unsigned> cliques;
    for (unsigned mask = 0; mask < (1u << p); ++mask) {
        bool ok = true;
        for (int a = 0; a < p && ok; ++a)
            for (int b = a + 1; b < p && ok; ++b)
                if ((mask >> a & 1u) && (mask >> b & 1u) && !bg.adjacent(a, b)) ok = false;
        if (ok) cliques.push_back(mask);
    }
    std::vector<VertexSet> out;
    for (unsigned c : cliques) {
        if (__builtin_popcount(c) < 2) continue;
        bool maximal = std::none_of(cliques.begin(), cliques.end(),
                                    [c](unsigned d) { return d != c && (d & c) == c; });
        if (!maximal) continue;
        VertexSet s;
        for (int v = 0; v < p; ++v)
            if (c >> v & 1u) s.push_back(v);
        out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline BidirectedGraph random_bidirected(int p, double density, std::mt19937_64& rng)
{
    std::bernoulli_distribution coin(density);
    std::vector<Edge> pairs;
    for (Vertex i = 0; i < p; ++i)
        for (Vertex j = i + 1; j < p; ++j)
            if (coin(rng)) pairs.emplace_back(i, j);
    return BidirectedGraph(p, pairs);
}

} // namespace fixtures
