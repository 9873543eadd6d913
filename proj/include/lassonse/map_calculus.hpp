#pragma once

#include <cstddef>

#include "lassonse/gaussian_distance.hpp"
#include "lassonse/regularizer.hpp"

namespace lassonse {

/// Problem dimensions paired with a regularizer. The measurement count m is
/// stored as a real number so phase-transition sweeps can approach
/// min D continuously; callers building real instances pass integers.
class Geometry {
 public:
  Geometry(DistanceModel distances, double m);

  /// l1 geometry with a k-sparse x0 (closed-form distances).
  static Geometry l1_sparse(std::size_t n, std::size_t k, double m);

  const DistanceModel& distances() const { return distances_; }
  const RegularizerSpec& spec() const { return distances_.spec(); }
  double m() const { return m_; }
  std::size_t n() const { return distances_.n(); }
  double delta() const { return delta_; }

  DistancePair at(double tau) const { return distances_(tau); }

  /// min_tau D(tau) and its minimizer, computed once at construction.
  const DistanceMinimum& minimum() const { return minimum_; }

  /// m > min_tau D(tau).
  bool above_transition() const { return m_ > minimum_.d_min; }

 private:
  DistanceModel distances_;
  double m_;
  double delta_;
  DistanceMinimum minimum_;
};

DistanceMinimum d_min(const Geometry& geometry);

/// Endpoints of the open interval R = {tau > 0 : m - D > max(0, C)}.
struct Region {
  double tau_lo;
  double tau_hi;

  bool contains(double tau) const { return tau > tau_lo && tau < tau_hi; }
};

/// Throws BelowPhaseTransition when m <= min D.
Region region(const Geometry& geometry);

/// True iff tau satisfies the defining inequality of R.
bool in_region(const Geometry& geometry, double tau);

/// map(tau) = tau (m - D - C) / sqrt(m - D). Throws OutOfRegion off R.
double map_tau(const Geometry& geometry, double tau);

/// The unique tau in R with map(tau) = lambda, to relative tolerance 1e-12.
/// Evaluation is clamped to [tau_lo + eps, tau_hi - eps] with
/// eps = 1e-12 (tau_hi - tau_lo); lambdas beyond the clamped range return
/// the clamp point.
double map_inverse(const Geometry& geometry, double lambda);

struct Prediction {
  double lambda = 0.0;
  double tau = 0.0;
  double eta = 0.0;
  /// Monte Carlo standard error propagated through D / (m - D); zero for
  /// closed-form geometries.
  double stderr_eta = 0.0;
  Region region{};
  /// tau sits at the clamp next to an endpoint of R.
  bool low_confidence = false;
};

/// eta(lambda) = D(tau) / (m - D(tau)) at tau = map^{-1}(lambda).
Prediction predict_nse(const Geometry& geometry, double lambda);

struct Tuning {
  double lambda_best;
  double tau_best;
  double eta_min;
};

/// lambda_best = tau_best sqrt(m - D(tau_best)), eta_min = eta(lambda_best).
Tuning tune(const Geometry& geometry);

struct PhaseDiagnostics {
  double d_star;
  bool robust;
  /// d_star / (m - d_star), or +infinity when not robust.
  double minimax_nse;
};

PhaseDiagnostics phase_diagnostics(const Geometry& geometry);

}  // namespace lassonse
