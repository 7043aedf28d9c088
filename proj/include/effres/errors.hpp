#pragma once

#include <stdexcept>
#include <string>

namespace effres {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A matrix contained NaN or Inf entries.
class NonFiniteError : public Error {
 public:
  explicit NonFiniteError(const std::string& what) : Error(what) {}
};

/// A block that must be inverted is singular (or numerically close to it).
/// For Laplacian blocks this signals a violation of the nonsingular-L_cc
/// assumption underlying the extended effective conductance.
class SingularBlockError : public Error {
 public:
  explicit SingularBlockError(const std::string& what) : Error(what) {}
};

/// A complex matrix handed to the realification routine is not Hermitian.
class NotHermitianError : public Error {
 public:
  explicit NotHermitianError(const std::string& what) : Error(what) {}
};

/// Node-set pair is empty, overlapping, or out of range.
class InvalidPairError : public Error {
 public:
  explicit InvalidPairError(const std::string& what) : Error(what) {}
};

/// Graph construction or validation failure (self loop, zero weight, ...).
class GraphError : public Error {
 public:
  explicit GraphError(const std::string& what) : Error(what) {}
};

/// An operation required a Laplacian that is PSD with exactly one zero
/// eigenvalue, and the input is not.
class NotPsdOneZeroError : public Error {
 public:
  explicit NotPsdOneZeroError(const std::string& what) : Error(what) {}
};

/// Brute-force enumeration refused because the graph is too large.
class TooLargeError : public Error {
 public:
  explicit TooLargeError(const std::string& what) : Error(what) {}
};

/// Newton power flow failed to converge.
class NoConvergenceError : public Error {
 public:
  explicit NoConvergenceError(const std::string& what) : Error(what) {}
};

/// The reduced power-flow Jacobian is singular at an iterate.
class SingularJacobianError : public Error {
 public:
  explicit SingularJacobianError(const std::string& what) : Error(what) {}
};

/// Ill-formed optimization problem (inverted bounds, bad pair, ...).
class InvalidProblemError : public Error {
 public:
  explicit InvalidProblemError(const std::string& what) : Error(what) {}
};

/// Interior-point scaling or factorization broke down.
class NumericalFailureError : public Error {
 public:
  explicit NumericalFailureError(const std::string& what) : Error(what) {}
};

/// Rank-one recovery failed even after the penalty retries.
class RankRecoveryError : public Error {
 public:
  explicit RankRecoveryError(const std::string& what) : Error(what) {}
};

/// Malformed input file.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

}  // namespace effres
