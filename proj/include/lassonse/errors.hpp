#pragma once

#include <stdexcept>
#include <string>

namespace lassonse {

/// Base class for domain failures: the inputs are well formed but the
/// requested quantity does not exist for this geometry.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// m <= min_tau D(tau): the region R is empty and the NSE is unbounded.
class BelowPhaseTransition : public DomainError {
 public:
  explicit BelowPhaseTransition(const std::string& what)
      : DomainError("below phase transition (m <= min_tau D(tau)): " + what) {}
};

class OutOfRegion : public DomainError {
 public:
  explicit OutOfRegion(const std::string& what)
      : DomainError("tau outside region R: " + what) {}
};

/// D never turns upward before tau = 1e6.
class NoInteriorMinimum : public DomainError {
 public:
  explicit NoInteriorMinimum(const std::string& what)
      : DomainError("no interior minimum of D(tau): " + what) {}
};

/// D(lambda_beta) >= m, so the inner minimization over alpha has no
/// finite stationary point.
class InnerMinimizerUnbounded : public DomainError {
 public:
  explicit InnerMinimizerUnbounded(const std::string& what)
      : DomainError("inner minimizer unbounded: " + what) {}
};

class CapTooSmall : public DomainError {
 public:
  explicit CapTooSmall(const std::string& what)
      : DomainError("search cap too small: " + what) {}
};

}  // namespace lassonse
