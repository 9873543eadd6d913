#pragma once

#include <string_view>

#include "lassonse/map_calculus.hpp"

namespace lassonse {

// Deterministic scalar min-max obtained from the Gaussian comparison
// reduction of the l2^2-LASSO in the sigma -> 0 normalization:
//
//   d~(alpha, beta) = sqrt(alpha^2 + 1) beta
//                     - alpha beta sqrt(D(lambda_beta) / m) - beta^2 / 2,
//   lambda_beta     = lambda / (beta sqrt(m)).
//
// alpha plays the role of ||x_hat - x0|| / sigma, so the saddle alpha_* is
// sqrt(eta(lambda)). d~ is convex in alpha and concave in beta.

enum class SaddleMethod { ClosedForm, NestedSearch };
enum class SearchOrder { MinMax, MaxMin };

std::string_view to_string(SaddleMethod method);

struct SaddlePoint {
  double alpha_star = 0.0;
  /// alpha_star^2 as computed (bit-identical to eta for the closed form).
  double alpha_sq = 0.0;
  double beta_star = 0.0;
  double objective_value = 0.0;
  SaddleMethod method = SaddleMethod::ClosedForm;
};

/// Throws std::invalid_argument for beta <= 0. For beta small enough that
/// lambda_beta overflows, the large-tau asymptote D ~ k tau^2 is used.
double d_tilde(const Geometry& geometry, double lambda, double alpha, double beta);

/// alpha_*(beta) = sqrt(D(lambda_beta) / (m - D(lambda_beta))).
/// Throws InnerMinimizerUnbounded when D(lambda_beta) >= m.
double inner_alpha_star(const Geometry& geometry, double lambda, double beta);

/// Nested golden-section search on [0, alpha_cap] x (0, beta_cap], both to
/// absolute tolerance 1e-9. The beta cap doubles while the inner maximum
/// sits on it; an alpha optimum on alpha_cap throws CapTooSmall.
SaddlePoint solve_saddle_numeric(const Geometry& geometry, double lambda,
                                 double alpha_cap, double beta_cap,
                                 SearchOrder order = SearchOrder::MinMax);

/// alpha_* = sqrt(eta(lambda)), beta_* = lambda / (map^{-1}(lambda) sqrt(m)).
SaddlePoint closed_form_saddle(const Geometry& geometry, double lambda);

}  // namespace lassonse
