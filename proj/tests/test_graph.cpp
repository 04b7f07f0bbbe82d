#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mbang;
using namespace fixtures;

TEST(MixedGraph, RejectsMalformedEdges)
{
    EXPECT_THROW(graph1(3, {{1, 4}}), ValidationError);
    EXPECT_THROW(graph1(3, {{2, 2}}), ValidationError);
    EXPECT_THROW(graph1(3, {}, {{1}}), ValidationError);
    EXPECT_THROW(graph1(3, {}, {{1, 1}}), ValidationError);
    EXPECT_THROW(graph1(3, {}, {{0, 1}}), ValidationError);
}

TEST(MixedGraph, MultiEdgesAreUnorderedAndDeduplicated)
{
    auto g = graph1(4, {}, {{3, 2, 4}, {4, 3, 2}, {1, 2}});
    ASSERT_EQ(g.multi().size(), 2u);
    EXPECT_EQ(g.multi()[0], tuple1({1, 2}));
    EXPECT_EQ(g.multi()[1], tuple1({2, 3, 4}));
}

TEST(Acyclic, Examples)
{
    EXPECT_TRUE(is_acyclic(two_hidden_dag()));
    EXPECT_FALSE(is_acyclic(graph1(3, {{1, 2}, {2, 3}, {3, 1}})));
    EXPECT_TRUE(is_acyclic(MixedGraph(5)));
}

TEST(Acyclic, TopologicalOrderMakesBStrictlyTriangular)
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        auto spec = random_generic_spec(6, rng);
        auto order = topological_order(spec.graph);
        ASSERT_TRUE(order);
        std::vector<int> pos(6);
        for (int i = 0; i < 6; ++i) pos[(*order)[i]] = i;
        for (const auto& [from, to] : spec.graph.directed()) EXPECT_LT(pos[from], pos[to]);
    }
}

TEST(BowFree, Examples)
{
    EXPECT_FALSE(is_bow_free(graph1(2, {{1, 2}}, {{1, 2}})));
    EXPECT_TRUE(is_bow_free(two_hidden_graph()));
    EXPECT_TRUE(is_bow_free(graph1(3, {{1, 2}, {2, 3}})));
    // A bow through a larger edge.
    EXPECT_FALSE(is_bow_free(graph1(4, {{2, 4}}, {{1, 2, 4}})));
}

TEST(Subdivision, Examples)
{
    EXPECT_EQ(bidirected_subdivision(graph1(4, {}, {{2, 3, 4}})).pairs(), edges1({{2, 3}, {2, 4}, {3, 4}}));
    EXPECT_EQ(bidirected_subdivision(graph1(2, {}, {{1, 2}})).pairs(), edges1({{1, 2}}));
    EXPECT_EQ(bidirected_subdivision(graph1(4, {}, {{1, 2, 3}, {3, 4}})).pairs(),
              edges1({{1, 2}, {1, 3}, {2, 3}, {3, 4}}));
}

TEST(Subdivision, MonotoneUnderAddedEdges)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        auto spec = random_generic_spec(6, rng);
        auto base = bidirected_subdivision(spec.graph);
        auto multi = spec.graph.multi();
        multi.push_back(tuple1({1, 3, 6}));
        auto bigger = bidirected_subdivision(MixedGraph(6, spec.graph.directed(), multi));
        for (const auto& [a, b] : base.pairs()) EXPECT_TRUE(bigger.adjacent(a, b));
    }
}

TEST(KTrek, Examples)
{
    EXPECT_TRUE(has_k_trek(two_hidden_graph(), VertexTuple(tuple1({2, 3, 4}), 5)));
    EXPECT_FALSE(has_k_trek(split_cause_spec().graph, VertexTuple(tuple1({2, 3, 4}), 4)));
    EXPECT_TRUE(has_k_trek(shared_cause_spec().graph, VertexTuple(tuple1({2, 3, 4}), 4)));
    EXPECT_FALSE(has_k_trek(MixedGraph(3), VertexTuple(tuple1({1, 2}), 3)));
}

TEST(KTrek, RejectsBadTuples)
{
    EXPECT_THROW(VertexTuple(tuple1({1}), 3), UsageError);
    EXPECT_THROW(VertexTuple(tuple1({1, 1}), 3), UsageError);
    EXPECT_THROW(VertexTuple(tuple1({1, 4}), 3), UsageError);
}

TEST(KTrek, CommonAncestorWitness)
{
    // 1 -> 2 -> 3 and 1 -> 4: vertex 1 reaches all of (3, 4, 2).
    auto g = graph1(4, {{1, 2}, {2, 3}, {1, 4}});
    auto w = find_k_trek(g, VertexTuple(tuple1({3, 4, 2}), 4));
    ASSERT_TRUE(w);
    EXPECT_EQ(w->kind, TrekWitness::Kind::common_source);
    EXPECT_EQ(w->paths[0], tuple1({1, 2, 3}));
    EXPECT_EQ(w->paths[1], tuple1({1, 4}));
    EXPECT_EQ(w->paths[2], tuple1({1, 2}));
}

TEST(KTrek, SourcesInsideOneEdgeMayRepeat)
{
    // h = {1,2}; 1 -> 3 and 1 -> 4. The 3-trek (3, 4, 2) uses source 1 twice.
    auto g = graph1(4, {{1, 3}, {1, 4}}, {{1, 2}});
    auto w = find_k_trek(g, VertexTuple(tuple1({3, 4, 2}), 4));
    ASSERT_TRUE(w);
    // Vertex 1 is also a common ancestor of 3 and 4 but not of 2.
    EXPECT_EQ(w->kind, TrekWitness::Kind::multidirected_edge);
    EXPECT_EQ(w->paths[2], tuple1({2}));
}

TEST(KTrek, EveryEdgeSubsetHasATrek)
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        auto spec = random_generic_spec(5, rng);
        for (const auto& h : spec.graph.multi())
            for (std::size_t m = 2; m <= h.size(); ++m)
                for (const auto& t : distinct_tuples(static_cast<int>(h.size()), static_cast<int>(m))) {
                    std::vector<Vertex> tup;
                    for (Vertex i : t) tup.push_back(h[i]);
                    EXPECT_TRUE(has_k_trek(spec.graph, VertexTuple(tup, 5)));
                }
    }
}

TEST(Cliques, Examples)
{
    EXPECT_EQ(enumerate_cliques(BidirectedGraph(4, edges1({{2, 3}, {2, 4}, {3, 4}}))), sets1({{2, 3, 4}}));
    EXPECT_EQ(enumerate_cliques(BidirectedGraph(4, edges1({{1, 2}, {3, 4}}))), sets1({{1, 2}, {3, 4}}));
    EXPECT_EQ(enumerate_cliques(BidirectedGraph(4, edges1({{1, 2}, {1, 3}, {2, 3}, {3, 4}}))),
              sets1({{1, 2, 3}, {3, 4}}));
    EXPECT_TRUE(enumerate_cliques(BidirectedGraph(5)).empty());
}

TEST(Cliques, MatchExhaustiveEnumeration)
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        int p = 2 + trial % 7;
        auto bg = random_bidirected(p, 0.2 + 0.6 * (trial % 5) / 4.0, rng);
        EXPECT_EQ(enumerate_cliques(bg), brute_force_cliques(bg)) << "trial " << trial;
    }
}

TEST(Printing, EdgeListing)
{
    EXPECT_EQ(to_string(two_hidden_graph()), "p = 5\n1 -> 2\n4 -> 5\n(1,5) <-*->\n(2,3,4) <-*->\n");
}

TEST(Printing, DotUsesDashedHiddenStars)
{
    auto dot = to_dot(graph1(3, {{1, 2}}, {{1, 3}}));
    EXPECT_NE(dot.find("1 -> 2;"), std::string::npos);
    EXPECT_NE(dot.find("H1 -> 1 [style=dashed];"), std::string::npos);
    EXPECT_NE(dot.find("H1 -> 3 [style=dashed];"), std::string::npos);
}
