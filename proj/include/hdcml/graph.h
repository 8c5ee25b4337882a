#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hdcml/hypervector.h"
#include "hdcml/random.h"

namespace hdcml {

struct Edge {
  int source;
  int target;
  auto operator<=>(const Edge&) const = default;
};

// Directed graph with edges kept in lexicographic (source, target) order;
// an edge's position in that order is its action column index.
class GraphTopology {
 public:
  GraphTopology() = default;
  // Throws std::invalid_argument on self-loops, duplicates or out-of-range
  // indices. Edges are sorted; labels, when given, must number n.
  GraphTopology(int n, std::vector<Edge> edges, std::vector<std::string> labels = {});

  int node_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int c) const { return edges_[c]; }

  // Indices of edges leaving `node`, ascending.
  std::span<const int> out_edges(int node) const;
  int out_degree(int node) const { return static_cast<int>(out_edges(node).size()); }
  std::optional<int> find_edge(int source, int target) const;

  bool has_labels() const { return !labels_.empty(); }
  std::string label(int node) const;
  std::optional<int> find_label(std::string_view label) const;

  bool strongly_connected() const;
  int weak_component_count() const;
  // Hop distances from `source`; -1 where unreachable.
  std::vector<int> bfs_distances(int source) const;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::string> labels_;
  std::vector<int> out_offsets_;
  std::vector<int> out_index_;
};

// Tower of Hanoi configuration: the peg (1..3) of each ring. Label "ijk" is
// large, medium, small.
struct TohState {
  int large = 1;
  int medium = 1;
  int small = 1;

  auto operator<=>(const TohState&) const = default;

  int peg(int ring) const { return ring == 0 ? large : (ring == 1 ? medium : small); }
  void set_peg(int ring, int peg);
  std::string label() const;
  int index() const { return (large - 1) * 9 + (medium - 1) * 3 + (small - 1); }
  static TohState from_index(int index);
  static std::optional<TohState> parse(std::string_view label);
};

// States reachable by moving one top ring onto an empty peg or a larger ring.
std::vector<TohState> legal_toh_moves(const TohState& s);

// 27 nodes labelled "111".."333" in index order, 78 directed edges.
GraphTopology toh_graph();

// Connected undirected graph with m edges, sampled uniformly by rejection,
// returned as 2m directed edges. Throws if m is outside [n-1, n(n-1)/2].
GraphTopology random_connected_graph(int n, int m, Rng& rng);

// e x n matrix with entry (c, v) = 1 iff edge c leaves node v.
Matrix gating_matrix(const GraphTopology& g);

// Plain-text edge list: node count on the first line, then "src dst" lines.
std::string to_edge_list(const GraphTopology& g);
GraphTopology parse_edge_list(std::string_view text);

}  // namespace hdcml
