#include "lassonse/map_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lassonse/errors.hpp"
#include "lassonse/scalar_search.hpp"

namespace lassonse {

namespace {

constexpr double kTauTol = 1e-10;
constexpr double kSmallTau = 1e-12;

// m - D - max(0, C); positive exactly on R
double region_margin(const Geometry& g, double tau) {
  const auto dc = g.at(tau);
  return g.m() - dc.D - std::max(0.0, dc.C);
}

double map_unchecked(const Geometry& g, double tau) {
  const auto dc = g.at(tau);
  const double slack = g.m() - dc.D;
  return tau * (slack - dc.C) / std::sqrt(slack);
}

void require_above_transition(const Geometry& g) {
  if (!g.above_transition()) {
    throw BelowPhaseTransition(
        "m = " + std::to_string(g.m()) +
        ", min D = " + std::to_string(g.minimum().d_min));
  }
}

}  // namespace

Geometry::Geometry(DistanceModel distances, double m)
    : distances_(std::move(distances)), m_(m) {
  if (!(m >= 1.0) || !std::isfinite(m)) {
    throw std::invalid_argument("geometry: m must be >= 1");
  }
  delta_ = m_ / static_cast<double>(distances_.n());
  minimum_ = lassonse::d_min(distances_);
}

Geometry Geometry::l1_sparse(std::size_t n, std::size_t k, double m) {
  return Geometry(DistanceModel(RegularizerSpec::l1_sparse(n, k)), m);
}

DistanceMinimum d_min(const Geometry& geometry) { return geometry.minimum(); }

bool in_region(const Geometry& geometry, double tau) {
  return tau > 0.0 && std::isfinite(tau) && region_margin(geometry, tau) > 0.0;
}

Region region(const Geometry& geometry) {
  require_above_transition(geometry);
  const double inside = geometry.minimum().tau_best;
  auto inside_pred = [&](double t) { return region_margin(geometry, t) > 0.0; };

  double tau_lo = 0.0;
  if (!inside_pred(kSmallTau)) {
    const auto [out, in] = search::bisect(
        [&](double t) { return !inside_pred(t); }, kSmallTau, inside, kTauTol);
    tau_lo = 0.5 * (out + in);
  }

  double outside = std::max(2.0 * inside, 1.0);
  while (inside_pred(outside)) outside *= 2.0;
  const auto [in, out] = search::bisect(inside_pred, inside, outside, kTauTol);
  return {tau_lo, 0.5 * (in + out)};
}

double map_tau(const Geometry& geometry, double tau) {
  if (!in_region(geometry, tau)) {
    throw OutOfRegion("tau = " + std::to_string(tau));
  }
  return map_unchecked(geometry, tau);
}

namespace {

struct Inverse {
  double tau;
  Region region;
  bool clamped;
};

Inverse invert(const Geometry& geometry, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("map_inverse: lambda must be finite and > 0");
  }
  const Region r = region(geometry);
  const double eps = 1e-12 * (r.tau_hi - r.tau_lo);
  double a = r.tau_lo + eps;
  double b = r.tau_hi - eps;
  // the bisected endpoints carry 1e-10 slack; walk inward until both clamp
  // points satisfy the defining inequality
  while (!in_region(geometry, a)) a += 0.5 * kTauTol;
  while (!in_region(geometry, b)) b -= 0.5 * kTauTol;

  if (lambda <= map_unchecked(geometry, a)) return {a, r, true};
  if (lambda >= map_unchecked(geometry, b)) return {b, r, true};
  const auto [lo, hi] = search::bisect(
      [&](double t) { return map_unchecked(geometry, t) < lambda; }, a, b, 0.0,
      1e-12);
  return {0.5 * (lo + hi), r, false};
}

}  // namespace

double map_inverse(const Geometry& geometry, double lambda) {
  return invert(geometry, lambda).tau;
}

Prediction predict_nse(const Geometry& geometry, double lambda) {
  const Inverse inv = invert(geometry, lambda);
  const auto dc = geometry.at(inv.tau);
  const double slack = geometry.m() - dc.D;
  Prediction p;
  p.lambda = lambda;
  p.tau = inv.tau;
  p.eta = dc.D / slack;
  p.stderr_eta = geometry.m() / (slack * slack) * dc.stderr_D;
  p.region = inv.region;
  p.low_confidence = inv.clamped;
  return p;
}

Tuning tune(const Geometry& geometry) {
  require_above_transition(geometry);
  const auto& best = geometry.minimum();
  const double lambda_best = best.tau_best * std::sqrt(geometry.m() - best.d_min);
  return {lambda_best, best.tau_best, predict_nse(geometry, lambda_best).eta};
}

PhaseDiagnostics phase_diagnostics(const Geometry& geometry) {
  const double d_star = geometry.minimum().d_min;
  const bool robust = geometry.m() > d_star;
  const double minimax = robust ? d_star / (geometry.m() - d_star)
                                : std::numeric_limits<double>::infinity();
  return {d_star, robust, minimax};
}

}  // namespace lassonse
