#pragma once

// Acyclic mixed graphs with directed and multidirected edges.
//
// Vertices are 0-based inside the library. Everything that crosses a file or
// console boundary (JSON, DOT, CLI output) uses 1-based labels; see io.hpp.

#include "errors.hpp"

#include <algorithm>
#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace mbang {

using Vertex = int;
using VertexSet = std::vector<Vertex>; // sorted, distinct
using Edge = std::pair<Vertex, Vertex>;

namespace detail {

inline void check_vertex(Vertex v, int p, const char* what)
{
    if (v < 0 || v >= p) {
        std::ostringstream os;
        os << what << ": vertex " << v + 1 << " outside 1.." << p;
        throw ValidationError(os.str());
    }
}

inline VertexSet normalized_set(VertexSet s, int p, const char* what)
{
    for (Vertex v : s) check_vertex(v, p, what);
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
        throw ValidationError(std::string(what) + ": repeated vertex in edge");
    return s;
}

template <typename T>
void sort_unique(std::vector<T>& v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

} // namespace detail

/// Graph G = (V, D, H): directed edges D and multidirected edges H, where each
/// h in H is a set of at least two vertices sharing one hidden parent.
/// Immutable once constructed.
class MixedGraph {
public:
    MixedGraph() = default;

    explicit MixedGraph(int p, std::vector<Edge> directed = {}, std::vector<VertexSet> multi = {})
        : p_(p), directed_(std::move(directed))
    {
        if (p < 0) throw ValidationError("MixedGraph: negative vertex count");
        for (const auto& [from, to] : directed_) {
            detail::check_vertex(from, p, "directed edge");
            detail::check_vertex(to, p, "directed edge");
            if (from == to) throw ValidationError("directed edge: self-loop at vertex " + std::to_string(from + 1));
        }
        detail::sort_unique(directed_);
        multi_.reserve(multi.size());
        for (auto& h : multi) {
            auto s = detail::normalized_set(std::move(h), p, "multidirected edge");
            if (s.size() < 2) throw ValidationError("multidirected edge needs at least two vertices");
            multi_.push_back(std::move(s));
        }
        detail::sort_unique(multi_);
    }

    int p() const noexcept { return p_; }
    const std::vector<Edge>& directed() const noexcept { return directed_; }
    const std::vector<VertexSet>& multi() const noexcept { return multi_; }

    bool has_directed(Vertex from, Vertex to) const
    {
        return std::binary_search(directed_.begin(), directed_.end(), Edge{from, to});
    }

    std::vector<Vertex> parents(Vertex v) const
    {
        std::vector<Vertex> out;
        for (const auto& [from, to] : directed_)
            if (to == v) out.push_back(from);
        return out;
    }

    std::vector<Vertex> children(Vertex v) const
    {
        std::vector<Vertex> out;
        for (const auto& [from, to] : directed_)
            if (from == v) out.push_back(to);
        return out;
    }

    friend bool operator==(const MixedGraph&, const MixedGraph&) = default;

private:
    int p_ = 0;
    std::vector<Edge> directed_;
    std::vector<VertexSet> multi_;
};

/// Undirected graph of bidirected pairs (i <-> j), stored with i < j.
class BidirectedGraph {
public:
    BidirectedGraph() = default;

    explicit BidirectedGraph(int p, std::vector<Edge> pairs = {}) : p_(p), adjacency_(p)
    {
        for (auto& [a, b] : pairs) {
            detail::check_vertex(a, p, "bidirected edge");
            detail::check_vertex(b, p, "bidirected edge");
            if (a == b) throw ValidationError("bidirected edge: self-loop at vertex " + std::to_string(a + 1));
            if (a > b) std::swap(a, b);
        }
        detail::sort_unique(pairs);
        pairs_ = std::move(pairs);
        for (const auto& [a, b] : pairs_) {
            adjacency_[a].push_back(b);
            adjacency_[b].push_back(a);
        }
        for (auto& row : adjacency_) std::sort(row.begin(), row.end());
    }

    int p() const noexcept { return p_; }
    const std::vector<Edge>& pairs() const noexcept { return pairs_; }
    const std::vector<Vertex>& neighbors(Vertex v) const { return adjacency_.at(static_cast<std::size_t>(v)); }
    bool empty() const noexcept { return pairs_.empty(); }

    bool adjacent(Vertex a, Vertex b) const
    {
        if (a > b) std::swap(a, b);
        return std::binary_search(pairs_.begin(), pairs_.end(), Edge{a, b});
    }

    friend bool operator==(const BidirectedGraph& x, const BidirectedGraph& y)
    {
        return x.p_ == y.p_ && x.pairs_ == y.pairs_;
    }

private:
    int p_ = 0;
    std::vector<Edge> pairs_;
    std::vector<std::vector<Vertex>> adjacency_;
};

/// Ordered tuple of k >= 2 distinct vertices.
class VertexTuple {
public:
    VertexTuple(std::vector<Vertex> vertices, int p) : vertices_(std::move(vertices))
    {
        if (vertices_.size() < 2) throw UsageError("vertex tuple needs k >= 2 entries");
        for (Vertex v : vertices_) {
            if (v < 0 || v >= p)
                throw UsageError("vertex tuple: vertex " + std::to_string(v + 1) + " outside 1.." + std::to_string(p));
        }
        auto sorted = vertices_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw UsageError("vertex tuple: repeated vertex");
    }

    std::size_t size() const noexcept { return vertices_.size(); }
    Vertex operator[](std::size_t i) const { return vertices_[i]; }
    const std::vector<Vertex>& vertices() const noexcept { return vertices_; }

private:
    std::vector<Vertex> vertices_;
};

/// Topological order of the directed part, or nullopt if it has a cycle.
inline std::optional<std::vector<Vertex>> topological_order(const MixedGraph& g)
{
    const int p = g.p();
    std::vector<int> indegree(static_cast<std::size_t>(p), 0);
    std::vector<std::vector<Vertex>> out(static_cast<std::size_t>(p));
    for (const auto& [from, to] : g.directed()) {
        out[from].push_back(to);
        ++indegree[to];
    }
    // Smallest ready vertex first, so the order is deterministic.
    std::vector<Vertex> ready;
    for (Vertex v = 0; v < p; ++v)
        if (indegree[v] == 0) ready.push_back(v);
    std::vector<Vertex> order;
    order.reserve(static_cast<std::size_t>(p));
    while (!ready.empty()) {
        auto it = std::min_element(ready.begin(), ready.end());
        Vertex v = *it;
        ready.erase(it);
        order.push_back(v);
        for (Vertex w : out[v])
            if (--indegree[w] == 0) ready.push_back(w);
    }
    if (static_cast<int>(order.size()) != p) return std::nullopt;
    return order;
}

inline bool is_acyclic(const MixedGraph& g) { return topological_order(g).has_value(); }

/// True iff no pair i -> j also lies inside a multidirected edge.
inline bool is_bow_free(const MixedGraph& g)
{
    for (const auto& [from, to] : g.directed()) {
        for (const auto& h : g.multi()) {
            if (std::binary_search(h.begin(), h.end(), from) && std::binary_search(h.begin(), h.end(), to))
                return false;
        }
    }
    return true;
}

/// Replace every multidirected edge by all of its 2-subsets.
inline BidirectedGraph bidirected_subdivision(const MixedGraph& g)
{
    std::vector<Edge> pairs;
    for (const auto& h : g.multi())
        for (std::size_t a = 0; a < h.size(); ++a)
            for (std::size_t b = a + 1; b < h.size(); ++b) pairs.emplace_back(h[a], h[b]);
    return BidirectedGraph(g.p(), std::move(pairs));
}

/// A k-trek certificate: one directed path per sink, all starting at a common
/// vertex or at (possibly repeated) members of one multidirected edge.
struct TrekWitness {
    enum class Kind { common_source, multidirected_edge };
    Kind kind = Kind::common_source;
    std::optional<std::size_t> edge; // index into g.multi() for multidirected_edge
    std::vector<std::vector<Vertex>> paths; // paths[l] runs source -> ... -> t[l]
};

namespace detail {

// For sink t: next[a] is the successor of ancestor a on a shortest path a => t
// (next[t] == t), or -1 if a is not an ancestor of t.
inline std::vector<Vertex> paths_toward(const MixedGraph& g, Vertex t)
{
    std::vector<std::vector<Vertex>> in(static_cast<std::size_t>(g.p()));
    for (const auto& [from, to] : g.directed()) in[to].push_back(from);
    std::vector<Vertex> next(static_cast<std::size_t>(g.p()), -1);
    next[t] = t;
    std::deque<Vertex> queue{t};
    while (!queue.empty()) {
        Vertex v = queue.front();
        queue.pop_front();
        for (Vertex u : in[v]) {
            if (next[u] == -1) {
                next[u] = v;
                queue.push_back(u);
            }
        }
    }
    return next;
}

inline std::vector<Vertex> walk(const std::vector<Vertex>& next, Vertex from)
{
    std::vector<Vertex> path{from};
    while (next[path.back()] != path.back()) path.push_back(next[path.back()]);
    return path;
}

} // namespace detail

/// Search for a k-trek between the tuple's vertices. Length-0 paths are
/// allowed, and sources inside a multidirected edge need not be distinct.
inline std::optional<TrekWitness> find_k_trek(const MixedGraph& g, const VertexTuple& t)
{
    if (!is_acyclic(g)) throw ValidationError("k-trek search requires an acyclic graph");
    for (Vertex v : t.vertices()) detail::check_vertex(v, g.p(), "trek tuple");

    std::vector<std::vector<Vertex>> next;
    next.reserve(t.size());
    for (Vertex v : t.vertices()) next.push_back(detail::paths_toward(g, v));

    for (Vertex s = 0; s < g.p(); ++s) {
        bool reaches_all = std::all_of(next.begin(), next.end(), [s](const auto& nx) { return nx[s] != -1; });
        if (!reaches_all) continue;
        TrekWitness w;
        for (const auto& nx : next) w.paths.push_back(detail::walk(nx, s));
        return w;
    }

    for (std::size_t e = 0; e < g.multi().size(); ++e) {
        const auto& h = g.multi()[e];
        TrekWitness w;
        w.kind = TrekWitness::Kind::multidirected_edge;
        w.edge = e;
        for (const auto& nx : next) {
            auto src = std::find_if(h.begin(), h.end(), [&nx](Vertex s) { return nx[s] != -1; });
            if (src == h.end()) break;
            w.paths.push_back(detail::walk(nx, *src));
        }
        if (w.paths.size() == t.size()) return w;
    }
    return std::nullopt;
}

inline bool has_k_trek(const MixedGraph& g, const VertexTuple& t) { return find_k_trek(g, t).has_value(); }

/// All maximal cliques with at least two vertices (Bron-Kerbosch with
/// Tomita pivoting). Output sorted lexicographically.
inline std::vector<VertexSet> enumerate_cliques(const BidirectedGraph& bg)
{
    std::vector<VertexSet> cliques;
    VertexSet r;
    std::function<void(std::vector<Vertex>, std::vector<Vertex>)> expand =
        [&](std::vector<Vertex> p, std::vector<Vertex> x) {
            if (p.empty() && x.empty()) {
                if (r.size() >= 2) {
                    auto c = r;
                    std::sort(c.begin(), c.end());
                    cliques.push_back(std::move(c));
                }
                return;
            }
            Vertex pivot = -1;
            std::size_t best = 0;
            for (const auto* pool : {&p, &x}) {
                for (Vertex u : *pool) {
                    std::size_t cnt = 0;
                    for (Vertex w : p) cnt += bg.adjacent(u, w) ? 1 : 0;
                    if (pivot == -1 || cnt > best) {
                        pivot = u;
                        best = cnt;
                    }
                }
            }
            std::vector<Vertex> candidates;
            for (Vertex v : p)
                if (!bg.adjacent(pivot, v)) candidates.push_back(v);
            for (Vertex v : candidates) {
                std::vector<Vertex> p2, x2;
                for (Vertex w : p)
                    if (bg.adjacent(v, w)) p2.push_back(w);
                for (Vertex w : x)
                    if (bg.adjacent(v, w)) x2.push_back(w);
                r.push_back(v);
                expand(std::move(p2), std::move(x2));
                r.pop_back();
                p.erase(std::find(p.begin(), p.end(), v));
                x.push_back(v);
            }
        };
    std::vector<Vertex> all;
    for (Vertex v = 0; v < bg.p(); ++v) all.push_back(v);
    expand(std::move(all), {});
    std::sort(cliques.begin(), cliques.end());
    return cliques;
}

/// One-line-per-edge listing with 1-based labels: "i -> j" and
/// "(i1,...,ik) <-*->".
inline std::string to_string(const MixedGraph& g)
{
    std::ostringstream os;
    os << "p = " << g.p() << '\n';
    for (const auto& [from, to] : g.directed()) os << from + 1 << " -> " << to + 1 << '\n';
    for (const auto& h : g.multi()) {
        os << '(';
        for (std::size_t i = 0; i < h.size(); ++i) os << (i ? "," : "") << h[i] + 1;
        os << ") <-*->\n";
    }
    return os.str();
}

/// Graphviz rendering: directed edges solid, each multidirected edge as a
/// dashed star from a synthetic hidden node H1, H2, ...
inline std::string to_dot(const MixedGraph& g)
{
    std::ostringstream os;
    os << "digraph G {\n";
    for (Vertex v = 0; v < g.p(); ++v) os << "  " << v + 1 << ";\n";
    for (const auto& [from, to] : g.directed()) os << "  " << from + 1 << " -> " << to + 1 << ";\n";
    for (std::size_t e = 0; e < g.multi().size(); ++e) {
        os << "  H" << e + 1 << " [shape=point, label=\"H" << e + 1 << "\", xlabel=\"H" << e + 1 << "\"];\n";
        for (Vertex v : g.multi()[e]) os << "  H" << e + 1 << " -> " << v + 1 << " [style=dashed];\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace mbang
