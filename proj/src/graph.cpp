#include "hdcml/graph.h"

#include <algorithm>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace hdcml {

GraphTopology::GraphTopology(int n, std::vector<Edge> edges, std::vector<std::string> labels)
    : n_(n), edges_(std::move(edges)), labels_(std::move(labels)) {
  if (n_ < 1) throw std::invalid_argument("GraphTopology: node count must be >= 1");
  if (!labels_.empty() && static_cast<int>(labels_.size()) != n_) {
    throw std::invalid_argument("GraphTopology: label count does not match node count");
  }
  for (const Edge& e : edges_) {
    if (e.source < 0 || e.source >= n_ || e.target < 0 || e.target >= n_) {
      throw std::invalid_argument("GraphTopology: edge index out of range");
    }
    if (e.source == e.target) throw std::invalid_argument("GraphTopology: self-loop");
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw std::invalid_argument("GraphTopology: duplicate directed edge");
  }
  out_offsets_.assign(n_ + 1, 0);
  for (const Edge& e : edges_) ++out_offsets_[e.source + 1];
  std::partial_sum(out_offsets_.begin(), out_offsets_.end(), out_offsets_.begin());
  out_index_.resize(edges_.size());
  // Sorted by source, so the edge order is already grouped.
  std::iota(out_index_.begin(), out_index_.end(), 0);
}

std::span<const int> GraphTopology::out_edges(int node) const {
  return std::span<const int>(out_index_).subspan(out_offsets_[node],
                                                  out_offsets_[node + 1] - out_offsets_[node]);
}

std::optional<int> GraphTopology::find_edge(int source, int target) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{source, target});
  if (it == edges_.end() || *it != Edge{source, target}) return std::nullopt;
  return static_cast<int>(it - edges_.begin());
}

std::string GraphTopology::label(int node) const {
  return labels_.empty() ? std::to_string(node) : labels_[node];
}

std::optional<int> GraphTopology::find_label(std::string_view label) const {
  for (int i = 0; i < n_; ++i) {
    if (this->label(i) == label) return i;
  }
  return std::nullopt;
}

std::vector<int> GraphTopology::bfs_distances(int source) const {
  std::vector<int> dist(n_, -1);
  std::queue<int> q;
  dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int c : out_edges(v)) {
      const int w = edges_[c].target;
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push(w);
      }
    }
  }
  return dist;
}

bool GraphTopology::strongly_connected() const {
  for (int v = 0; v < n_; ++v) {
    const auto d = bfs_distances(v);
    if (std::find(d.begin(), d.end(), -1) != d.end()) return false;
  }
  return true;
}

int GraphTopology::weak_component_count() const {
  std::vector<int> parent(n_);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = n_;
  for (const Edge& e : edges_) {
    const int a = find(e.source), b = find(e.target);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components;
}

void TohState::set_peg(int ring, int peg) {
  if (ring == 0) large = peg;
  else if (ring == 1) medium = peg;
  else small = peg;
}

std::string TohState::label() const {
  return std::to_string(large) + std::to_string(medium) + std::to_string(small);
}

TohState TohState::from_index(int index) {
  if (index < 0 || index >= 27) throw std::out_of_range("TohState::from_index");
  return {index / 9 + 1, (index / 3) % 3 + 1, index % 3 + 1};
}

std::optional<TohState> TohState::parse(std::string_view label) {
  if (label.size() != 3) return std::nullopt;
  for (char c : label) {
    if (c < '1' || c > '3') return std::nullopt;
  }
  return TohState{label[0] - '0', label[1] - '0', label[2] - '0'};
}

std::vector<TohState> legal_toh_moves(const TohState& s) {
  // Ring 0 is the largest; a ring is blocked by any smaller ring (higher
  // index) on the same peg, at the source or at the destination.
  auto smaller_on_peg = [&s](int ring, int peg) {
    for (int r = ring + 1; r < 3; ++r) {
      if (s.peg(r) == peg) return true;
    }
    return false;
  };
  std::vector<TohState> out;
  for (int ring = 0; ring < 3; ++ring) {
    const int from = s.peg(ring);
    if (smaller_on_peg(ring, from)) continue;
    for (int to = 1; to <= 3; ++to) {
      if (to == from || smaller_on_peg(ring, to)) continue;
      TohState next = s;
      next.set_peg(ring, to);
      out.push_back(next);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

GraphTopology toh_graph() {
  std::vector<Edge> edges;
  std::vector<std::string> labels;
  for (int i = 0; i < 27; ++i) {
    const TohState s = TohState::from_index(i);
    labels.push_back(s.label());
    for (const TohState& t : legal_toh_moves(s)) edges.push_back({i, t.index()});
  }
  return GraphTopology(27, std::move(edges), std::move(labels));
}

GraphTopology random_connected_graph(int n, int m, Rng& rng) {
  if (n < 1) throw std::invalid_argument("random_connected_graph: n must be >= 1");
  const long max_edges = static_cast<long>(n) * (n - 1) / 2;
  if (m < n - 1 || m > max_edges) {
    throw std::invalid_argument("random_connected_graph: m = " + std::to_string(m) +
                                " infeasible for n = " + std::to_string(n));
  }
  std::vector<Edge> pairs;
  pairs.reserve(max_edges);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
  }
  constexpr int kMaxAttempts = 1'000'000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    // Partial Fisher-Yates: the first m slots are a uniform m-subset.
    for (int k = 0; k < m; ++k) {
      std::uniform_int_distribution<long> pick(k, max_edges - 1);
      std::swap(pairs[k], pairs[pick(rng)]);
    }
    std::vector<Edge> directed;
    directed.reserve(2 * m);
    for (int k = 0; k < m; ++k) {
      directed.push_back(pairs[k]);
      directed.push_back({pairs[k].target, pairs[k].source});
    }
    GraphTopology g(n, std::move(directed));
    if (g.weak_component_count() == 1) return g;
  }
  throw std::runtime_error("random_connected_graph: no connected sample after retries");
}

Matrix gating_matrix(const GraphTopology& g) {
  Matrix G = Matrix::Zero(g.edge_count(), g.node_count());
  for (int c = 0; c < g.edge_count(); ++c) G(c, g.edge(c).source) = 1.0;
  return G;
}

std::string to_edge_list(const GraphTopology& g) {
  std::ostringstream out;
  out << g.node_count() << '\n';
  for (const Edge& e : g.edges()) out << e.source << ' ' << e.target << '\n';
  return out.str();
}

GraphTopology parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  int n = 0;
  if (!(in >> n)) throw std::invalid_argument("edge list: missing node count");
  std::vector<Edge> edges;
  int s = 0, t = 0;
  while (in >> s) {
    if (!(in >> t)) throw std::invalid_argument("edge list: dangling source index");
    edges.push_back({s, t});
  }
  if (!in.eof()) throw std::invalid_argument("edge list: malformed entry");
  return GraphTopology(n, std::move(edges));
}

}  // namespace hdcml
