#pragma once

#include <optional>
#include <string>

#include "effres/effective.hpp"

namespace effres::definiteness {

using numerics::Inertia;
using numerics::SymMatrix;
using sgraph::SignedGraph;

/// One failed step of the sequential-inclusion check.
struct Violation {
  int node;                    // node whose inclusion failed
  std::vector<int> set_b;      // set it was checked against
  double geff_value;           // the non-positive (or undefined) conductance
  std::string detail;          // diagnostic, e.g. singular-block note
};

/// Outcome of the sequential-inclusion definiteness check. The spectral
/// inertia is always attached so every verdict is self-auditing.
struct DefinitenessVerdict {
  bool psd_one_zero = false;
  std::vector<int> witness;            // visiting order over V_- when true
  std::optional<Violation> violation;  // first failure when false
  Inertia oracle_inertia;
};

/// Direct spectral test: inertia == (n-1, 0, 1).
bool is_psd_one_zero(const SymMatrix& l);

/// Sequential-inclusion conductance check over the negative-incident nodes,
/// visiting them in ascending index order. A singular eliminated block
/// mid-check yields a definitive negative verdict (PSD-one-zero Laplacians
/// have no singular principal submatrices).
DefinitenessVerdict check_sequential(const SignedGraph& g);

/// Exhaustive check that every disjoint nonempty pair has positive
/// conductance. Refuses graphs larger than max_n (enumeration is
/// exponential). A singular block anywhere counts as failure.
bool check_corollary2(const SignedGraph& g, int max_n = 10);

/// Negative-eigenvalue count of the Laplacian and negative-edge count; the
/// former never exceeds the latter.
struct NegativeBound {
  int n_minus;
  int negative_edges;
};
NegativeBound negative_eigenvalue_bound(const SignedGraph& g);

}  // namespace effres::definiteness
