#include <gtest/gtest.h>

#include <array>
#include <set>

#include "generators.h"
#include "hdcml/graph.h"

namespace hdcml {
namespace {

using testing::case_stream;

// Brute-force Tower of Hanoi move enumeration over peg triples. Ring 0 is
// the largest; a ring may move when no smaller ring shares its peg and no
// smaller ring sits on the destination.
std::set<std::pair<std::string, std::string>> brute_force_toh_edges() {
  std::set<std::pair<std::string, std::string>> edges;
  auto label = [](const std::array<int, 3>& p) {
    return std::to_string(p[0]) + std::to_string(p[1]) + std::to_string(p[2]);
  };
  for (int a = 1; a <= 3; ++a) {
    for (int b = 1; b <= 3; ++b) {
      for (int c = 1; c <= 3; ++c) {
        const std::array<int, 3> pegs{a, b, c};
        for (int ring = 0; ring < 3; ++ring) {
          bool covered = false;
          for (int smaller = ring + 1; smaller < 3; ++smaller) covered |= pegs[smaller] == pegs[ring];
          if (covered) continue;
          for (int dest = 1; dest <= 3; ++dest) {
            if (dest == pegs[ring]) continue;
            bool blocked = false;
            for (int smaller = ring + 1; smaller < 3; ++smaller) blocked |= pegs[smaller] == dest;
            if (blocked) continue;
            auto next = pegs;
            next[ring] = dest;
            edges.insert({label(pegs), label(next)});
          }
        }
      }
    }
  }
  return edges;
}

TEST(TohGraph, MatchesBruteForceEnumerator) {
  const GraphTopology g = toh_graph();
  ASSERT_EQ(g.node_count(), 27);
  ASSERT_EQ(g.edge_count(), 78);
  std::set<std::pair<std::string, std::string>> got;
  for (const Edge& e : g.edges()) got.insert({g.label(e.source), g.label(e.target)});
  EXPECT_EQ(got, brute_force_toh_edges());
}

TEST(TohGraph, LabelsFollowIndexOrder) {
  const GraphTopology g = toh_graph();
  EXPECT_EQ(g.label(0), "111");
  EXPECT_EQ(g.label(13), "222");
  EXPECT_EQ(g.label(26), "333");
  for (int i = 0; i < 27; ++i) {
    EXPECT_EQ(TohState::from_index(i).index(), i);
    EXPECT_EQ(TohState::from_index(i).label(), g.label(i));
    EXPECT_EQ(g.find_label(g.label(i)), i);
  }
  EXPECT_FALSE(TohState::parse("141"));
  EXPECT_FALSE(TohState::parse("11"));
}

TEST(TohGraph, CornerAndInteriorDegrees) {
  const GraphTopology g = toh_graph();
  // the three all-on-one-peg states have two moves; every other state three
  for (int i = 0; i < 27; ++i) {
    const std::string l = g.label(i);
    const bool corner = l[0] == l[1] && l[1] == l[2];
    EXPECT_EQ(g.out_degree(i), corner ? 2 : 3) << l;
  }
  EXPECT_TRUE(g.strongly_connected());
  // optimal 3-ring solution is 7 moves
  EXPECT_EQ(g.bfs_distances(0)[13], 7);
}

TEST(Graph, EdgesSortedAndOutEdgesConsistent) {
  for (int c = 0; c < 30; ++c) {
    Rng rng = case_stream("graph-sorted", c);
    const GraphTopology g = testing::gen_digraph(rng, 2, 12);
    EXPECT_TRUE(std::is_sorted(g.edges().begin(), g.edges().end()));
    int total = 0;
    for (int v = 0; v < g.node_count(); ++v) {
      for (int c2 : g.out_edges(v)) {
        EXPECT_EQ(g.edge(c2).source, v);
        EXPECT_EQ(g.find_edge(v, g.edge(c2).target), c2);
      }
      total += g.out_degree(v);
    }
    EXPECT_EQ(total, g.edge_count());
  }
}

TEST(Graph, RejectsMalformedEdges) {
  EXPECT_THROW(GraphTopology(3, {{0, 0}}), std::invalid_argument);
  EXPECT_THROW(GraphTopology(3, {{0, 1}, {0, 1}}), std::invalid_argument);
  EXPECT_THROW(GraphTopology(3, {{0, 3}}), std::invalid_argument);
  EXPECT_THROW(GraphTopology(3, {{0, 1}}, {"a", "b"}), std::invalid_argument);
  EXPECT_THROW(GraphTopology(0, {}), std::invalid_argument);
}

TEST(Graph, BfsMatchesReference) {
  for (int c = 0; c < 30; ++c) {
    Rng rng = case_stream("graph-bfs", c);
    const GraphTopology g = testing::gen_digraph(rng, 2, 15);
    for (int s = 0; s < g.node_count(); ++s) {
      EXPECT_EQ(g.bfs_distances(s), testing::reference_distances(g, s));
    }
  }
}

TEST(Graph, WeakComponentsAndStrongConnectivity) {
  const GraphTopology split(4, {{0, 1}, {1, 0}, {2, 3}, {3, 2}});
  EXPECT_EQ(split.weak_component_count(), 2);
  EXPECT_FALSE(split.strongly_connected());
  const GraphTopology one_way(3, {{0, 1}, {1, 2}});
  EXPECT_EQ(one_way.weak_component_count(), 1);
  EXPECT_FALSE(one_way.strongly_connected());
  const GraphTopology cycle(3, {{0, 1}, {1, 2}, {2, 0}});
  EXPECT_TRUE(cycle.strongly_connected());
}

TEST(RandomGraph, ConnectedSymmetricWithRequestedSize) {
  for (int c = 0; c < 40; ++c) {
    Rng rng = case_stream("random-graph", c);
    const int n = testing::uniform_int(rng, 2, 30);
    const int m = testing::uniform_int(rng, n - 1, n * (n - 1) / 2);
    const GraphTopology g = random_connected_graph(n, m, rng);
    EXPECT_EQ(g.node_count(), n);
    EXPECT_EQ(g.edge_count(), 2 * m);
    EXPECT_TRUE(g.strongly_connected());
    for (const Edge& e : g.edges()) EXPECT_TRUE(g.find_edge(e.target, e.source)) << e.source << "-" << e.target;
  }
}

TEST(RandomGraph, RejectsImpossibleEdgeCounts) {
  Rng rng = case_stream("random-graph-err", 0);
  EXPECT_THROW(random_connected_graph(5, 3, rng), std::invalid_argument);
  EXPECT_THROW(random_connected_graph(5, 11, rng), std::invalid_argument);
  EXPECT_NO_THROW(random_connected_graph(5, 10, rng));
  EXPECT_NO_THROW(random_connected_graph(1, 0, rng));
}

TEST(Gating, OneEntryPerEdgeAtItsSource) {
  for (int c = 0; c < 20; ++c) {
    Rng rng = case_stream("gating", c);
    const GraphTopology g = testing::gen_digraph(rng, 2, 10);
    const Matrix G = gating_matrix(g);
    ASSERT_EQ(G.rows(), g.edge_count());
    ASSERT_EQ(G.cols(), g.node_count());
    for (int e = 0; e < g.edge_count(); ++e) {
      for (int v = 0; v < g.node_count(); ++v) {
        EXPECT_EQ(G(e, v), g.edge(e).source == v ? 1.0 : 0.0);
      }
    }
  }
}

TEST(EdgeList, RoundTrip) {
  for (int c = 0; c < 20; ++c) {
    Rng rng = case_stream("edge-list", c);
    const GraphTopology g = testing::gen_digraph(rng, 1, 12);
    const GraphTopology back = parse_edge_list(to_edge_list(g));
    EXPECT_EQ(back.node_count(), g.node_count());
    EXPECT_EQ(back.edges(), g.edges());
  }
}

TEST(EdgeList, RejectsMalformedText) {
  EXPECT_THROW(parse_edge_list(""), std::invalid_argument);
  EXPECT_THROW(parse_edge_list("3\n0 1\n2"), std::invalid_argument);
  EXPECT_THROW(parse_edge_list("3\n0 x\n"), std::invalid_argument);
  EXPECT_THROW(parse_edge_list("2\n0 5\n"), std::invalid_argument);
}

}  // namespace
}  // namespace hdcml
