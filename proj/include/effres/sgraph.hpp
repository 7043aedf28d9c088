#pragma once

#include <optional>
#include <string>
#include <vector>

#include "effres/numerics.hpp"

namespace effres::sgraph {

using numerics::Matrix;
using numerics::SymMatrix;

/// One undirected edge with a signed nonzero weight. Stored in canonical
/// order u < v.
struct Edge {
  int u;
  int v;
  double weight;
};

/// Signed weighted undirected graph. No self loops, no duplicate edges,
/// every weight nonzero. Connectivity is not required at construction;
/// analysis entry points check it.
class SignedGraph {
 public:
  SignedGraph(int node_count, std::vector<Edge> edges,
              std::optional<std::vector<std::string>> labels = std::nullopt);

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::optional<std::vector<std::string>>& labels() const { return labels_; }

  bool is_connected() const;

  /// Throws GraphError when the underlying topology is disconnected.
  void require_connected(const char* who) const;

 private:
  int node_count_;
  std::vector<Edge> edges_;
  std::optional<std::vector<std::string>> labels_;
};

/// Two disjoint nonempty node sets; the complement is derived on demand.
class NodeSetPair {
 public:
  NodeSetPair(std::vector<int> set_a, std::vector<int> set_b, int node_count);

  const std::vector<int>& set_a() const { return set_a_; }
  const std::vector<int>& set_b() const { return set_b_; }
  const std::vector<int>& set_c() const { return set_c_; }
  int node_count() const { return node_count_; }

  NodeSetPair swapped() const { return NodeSetPair(set_b_, set_a_, node_count_); }

 private:
  std::vector<int> set_a_, set_b_, set_c_;
  int node_count_;
};

/// Node-incidence matrix with the fixed low-to-high orientation: column k
/// has +1 at the lower endpoint of edge k and -1 at the higher one.
Matrix incidence_matrix(const SignedGraph& g);

/// L = E W E^T; zero row sums by construction.
SymMatrix laplacian(const SignedGraph& g);

/// Eliminates `eliminate` via the Schur complement of the matching
/// Laplacian block and rebuilds a graph on the retained nodes (ascending
/// original order). Edges with |w| below 1e-12 are dropped.
SignedGraph kron_reduce(const SignedGraph& g, const std::vector<int>& eliminate);

/// Laplacian of the graph with V_a and V_b each merged into one node.
/// Ordering: cluster a, cluster b, then V_c ascending.
SymMatrix cluster_laplacian(const SignedGraph& g, const NodeSetPair& pair);

/// Endpoints of negative-weight edges, ascending.
std::vector<int> negative_nodes(const SignedGraph& g);

/// Count of negative-weight edges.
int negative_edge_count(const SignedGraph& g);

}  // namespace effres::sgraph
