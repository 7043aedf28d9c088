#include "effres/sgraph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "effres/errors.hpp"

namespace effres::sgraph {

SignedGraph::SignedGraph(int node_count, std::vector<Edge> edges,
                         std::optional<std::vector<std::string>> labels)
    : node_count_(node_count), edges_(std::move(edges)), labels_(std::move(labels)) {
  if (node_count_ < 1) throw GraphError("SignedGraph: node count must be >= 1");
  if (labels_ && static_cast<int>(labels_->size()) != node_count_) {
    throw GraphError("SignedGraph: label count does not match node count");
  }
  std::set<std::pair<int, int>> seen;
  for (Edge& e : edges_) {
    if (e.u == e.v) throw GraphError("SignedGraph: self loop rejected");
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.u < 0 || e.v >= node_count_) {
      throw GraphError("SignedGraph: edge endpoint out of range");
    }
    if (e.weight == 0.0 || !std::isfinite(e.weight)) {
      throw GraphError("SignedGraph: edge weight must be finite and nonzero");
    }
    if (!seen.insert({e.u, e.v}).second) {
      throw GraphError("SignedGraph: duplicate edge rejected");
    }
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::make_pair(a.u, a.v) < std::make_pair(b.u, b.v);
  });
}

bool SignedGraph::is_connected() const {
  if (node_count_ == 1) return true;
  std::vector<std::vector<int>> adj(node_count_);
  for (const Edge& e : edges_) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<bool> visited(node_count_, false);
  std::vector<int> stack{0};
  visited[0] = true;
  int count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[u]) {
      if (!visited[v]) {
        visited[v] = true;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == node_count_;
}

void SignedGraph::require_connected(const char* who) const {
  if (!is_connected()) {
    throw GraphError(std::string(who) + ": graph must be connected");
  }
}

NodeSetPair::NodeSetPair(std::vector<int> set_a, std::vector<int> set_b,
                         int node_count)
    : set_a_(std::move(set_a)), set_b_(std::move(set_b)), node_count_(node_count) {
  if (set_a_.empty() || set_b_.empty()) {
    throw InvalidPairError("NodeSetPair: both sets must be nonempty");
  }
  std::sort(set_a_.begin(), set_a_.end());
  std::sort(set_b_.begin(), set_b_.end());
  auto check = [&](const std::vector<int>& s, const char* name) {
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] < 0 || s[i] >= node_count_) {
        throw InvalidPairError(std::string("NodeSetPair: ") + name +
                               " index out of range");
      }
      if (i > 0 && s[i] == s[i - 1]) {
        throw InvalidPairError(std::string("NodeSetPair: duplicate node in ") + name);
      }
    }
  };
  check(set_a_, "set_a");
  check(set_b_, "set_b");
  std::vector<int> overlap;
  std::set_intersection(set_a_.begin(), set_a_.end(), set_b_.begin(), set_b_.end(),
                        std::back_inserter(overlap));
  if (!overlap.empty()) {
    throw InvalidPairError("NodeSetPair: sets overlap");
  }
  std::vector<bool> used(node_count_, false);
  for (int i : set_a_) used[i] = true;
  for (int i : set_b_) used[i] = true;
  for (int i = 0; i < node_count_; ++i) {
    if (!used[i]) set_c_.push_back(i);
  }
}

Matrix incidence_matrix(const SignedGraph& g) {
  Matrix e = Matrix::Zero(g.node_count(), g.edge_count());
  int k = 0;
  for (const Edge& edge : g.edges()) {
    e(edge.u, k) = 1.0;
    e(edge.v, k) = -1.0;
    ++k;
  }
  return e;
}

SymMatrix laplacian(const SignedGraph& g) {
  Matrix l = Matrix::Zero(g.node_count(), g.node_count());
  for (const Edge& e : g.edges()) {
    l(e.u, e.u) += e.weight;
    l(e.v, e.v) += e.weight;
    l(e.u, e.v) -= e.weight;
    l(e.v, e.u) -= e.weight;
  }
  return SymMatrix(l);
}

SignedGraph kron_reduce(const SignedGraph& g, const std::vector<int>& eliminate) {
  std::vector<bool> gone(g.node_count(), false);
  for (int i : eliminate) {
    if (i < 0 || i >= g.node_count()) {
      throw GraphError("kron_reduce: eliminate index out of range");
    }
    gone[i] = true;
  }
  std::vector<int> keep;
  for (int i = 0; i < g.node_count(); ++i) {
    if (!gone[i]) keep.push_back(i);
  }
  if (keep.size() < 2) {
    throw GraphError("kron_reduce: at least two nodes must be retained");
  }
  if (eliminate.empty()) return g;

  SymMatrix reduced = [&] {
    try {
      return numerics::schur_complement(laplacian(g), keep);
    } catch (const SingularBlockError&) {
      throw SingularBlockError(
          "kron_reduce: eliminated block is singular; the reduction is not "
          "physically meaningful (nonsingular-block assumption violated)");
    }
  }();

  std::vector<Edge> edges;
  const int m = static_cast<int>(keep.size());
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double w = -reduced(i, j);
      if (std::abs(w) > 1e-12) edges.push_back({i, j, w});
    }
  }
  std::optional<std::vector<std::string>> labels;
  if (g.labels()) {
    labels.emplace();
    for (int i : keep) labels->push_back((*g.labels())[i]);
  }
  return SignedGraph(m, std::move(edges), std::move(labels));
}

SymMatrix cluster_laplacian(const SignedGraph& g, const NodeSetPair& pair) {
  if (pair.node_count() != g.node_count()) {
    throw InvalidPairError("cluster_laplacian: pair built for a different graph");
  }
  const int n = g.node_count();
  const int c = static_cast<int>(pair.set_c().size());
  Matrix p = Matrix::Zero(n, c + 2);
  for (int i : pair.set_a()) p(i, 0) = 1.0;
  for (int i : pair.set_b()) p(i, 1) = 1.0;
  for (int k = 0; k < c; ++k) p(pair.set_c()[k], k + 2) = 1.0;
  const Matrix l = laplacian(g).mat();
  return SymMatrix(p.transpose() * l * p);
}

std::vector<int> negative_nodes(const SignedGraph& g) {
  std::set<int> nodes;
  for (const Edge& e : g.edges()) {
    if (e.weight < 0.0) {
      nodes.insert(e.u);
      nodes.insert(e.v);
    }
  }
  return {nodes.begin(), nodes.end()};
}

int negative_edge_count(const SignedGraph& g) {
  int count = 0;
  for (const Edge& e : g.edges()) {
    if (e.weight < 0.0) ++count;
  }
  return count;
}

}  // namespace effres::sgraph
