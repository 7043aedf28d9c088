#include "effres/definiteness.hpp"

#include <algorithm>

#include "effres/errors.hpp"

namespace effres::definiteness {

using effective::EffectiveValue;
using sgraph::NodeSetPair;

bool is_psd_one_zero(const SymMatrix& l) {
  const Inertia in = numerics::inertia(l);
  return in.n_minus == 0 && in.n_zero == 1;
}

DefinitenessVerdict check_sequential(const SignedGraph& g) {
  g.require_connected("check_sequential");
  DefinitenessVerdict verdict;
  verdict.oracle_inertia = numerics::inertia(sgraph::laplacian(g));

  std::vector<int> remaining = sgraph::negative_nodes(g);
  if (remaining.size() <= 1) {
    // No negative edges (a single negative-incident node cannot occur):
    // a connected positive graph is PSD with one zero eigenvalue.
    verdict.psd_one_zero = true;
    return verdict;
  }

  // Grow V_b one negative-incident node at a time, ascending order,
  // requiring positive conductance at every inclusion.
  std::vector<int> vb{remaining.front()};
  verdict.witness.push_back(remaining.front());
  for (size_t k = 1; k < remaining.size(); ++k) {
    const int j = remaining[k];
    double value = 0.0;
    try {
      const EffectiveValue ev = effective::geff(g, NodeSetPair({j}, vb, g.node_count()));
      value = ev.geff;
    } catch (const SingularBlockError& err) {
      verdict.psd_one_zero = false;
      verdict.violation = Violation{j, vb, 0.0, err.what()};
      return verdict;
    }
    if (value <= 0.0) {
      verdict.psd_one_zero = false;
      verdict.violation = Violation{j, vb, value, "non-positive step conductance"};
      return verdict;
    }
    vb.push_back(j);
    verdict.witness.push_back(j);
  }
  verdict.psd_one_zero = true;
  return verdict;
}

bool check_corollary2(const SignedGraph& g, int max_n) {
  g.require_connected("check_corollary2");
  const int n = g.node_count();
  if (n > max_n) {
    throw TooLargeError("check_corollary2: graph larger than the enumeration gate");
  }
  const SymMatrix l = sgraph::laplacian(g);

  // Ternary partition sweep: every node is in a, in b, or in neither.
  // The symmetry geff(a,b) == geff(b,a) halves the work: only visit
  // assignments where the smallest assigned node is in a.
  std::vector<int> assign(n, 0);
  long total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  for (long code = 0; code < total; ++code) {
    long c = code;
    std::vector<int> a, b;
    int first_assigned = -1;
    for (int i = 0; i < n; ++i) {
      const int d = static_cast<int>(c % 3);
      c /= 3;
      if (d == 1) a.push_back(i);
      if (d == 2) b.push_back(i);
      if (d != 0 && first_assigned < 0) first_assigned = d;
    }
    if (a.empty() || b.empty()) continue;
    if (first_assigned != 1) continue;  // mirrored pair already visited
    try {
      if (effective::geff_of_laplacian(l, NodeSetPair(a, b, n)).geff <= 0.0) {
        return false;
      }
    } catch (const SingularBlockError&) {
      return false;
    }
  }
  return true;
}

NegativeBound negative_eigenvalue_bound(const SignedGraph& g) {
  const Inertia in = numerics::inertia(sgraph::laplacian(g));
  return {in.n_minus, sgraph::negative_edge_count(g)};
}

}  // namespace effres::definiteness
