#include "lassonse/gordon.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lassonse/errors.hpp"
#include "lassonse/scalar_search.hpp"

namespace lassonse {

namespace {

constexpr double kTol = 1e-9;
constexpr double kBetaFloor = 1e-8;
constexpr int kMaxCapDoublings = 60;

// beta * sqrt(D(lambda_beta)), finite for every beta > 0
double beta_sqrt_d(const Geometry& g, double lambda, double beta) {
  const double sqrt_m = std::sqrt(g.m());
  const double lambda_beta = lambda / (beta * sqrt_m);
  if (!std::isfinite(lambda_beta) || lambda_beta > 1e100) {
    // D(t) ~ k t^2 as t -> infinity, so beta sqrt(D) -> lambda sqrt(k / m)
    return lambda / sqrt_m *
           std::sqrt(static_cast<double>(g.spec().support_size()));
  }
  return beta * std::sqrt(g.at(lambda_beta).D);
}

struct InnerMax {
  double beta;
  double value;
};

// max over beta in [kBetaFloor, cap] of f(beta), doubling cap while the
// maximizer sits on it
template <class F>
InnerMax maximize_beta(F&& f, double cap) {
  for (int i = 0; i < kMaxCapDoublings; ++i) {
    const auto r = search::golden_section_max(f, kBetaFloor, cap, kTol);
    if (r.x < cap - 10.0 * kTol) return {r.x, r.value};
    cap *= 2.0;
  }
  throw CapTooSmall("beta maximizer kept hitting the cap after doubling");
}

}  // namespace

std::string_view to_string(SaddleMethod method) {
  return method == SaddleMethod::ClosedForm ? "closed_form" : "nested_search";
}

double d_tilde(const Geometry& geometry, double lambda, double alpha,
               double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("d_tilde: beta must be > 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("d_tilde: lambda must be > 0");
  const double dist_term = beta_sqrt_d(geometry, lambda, beta) / std::sqrt(geometry.m());
  return std::sqrt(alpha * alpha + 1.0) * beta - alpha * dist_term -
         0.5 * beta * beta;
}

double inner_alpha_star(const Geometry& geometry, double lambda, double beta) {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("inner_alpha_star: beta must be > 0");
  }
  const double lambda_beta = lambda / (beta * std::sqrt(geometry.m()));
  const double d = geometry.at(lambda_beta).D;
  if (!(d < geometry.m())) {
    throw InnerMinimizerUnbounded("D(lambda_beta) = " + std::to_string(d) +
                                  " >= m = " + std::to_string(geometry.m()));
  }
  return std::sqrt(d / (geometry.m() - d));
}

SaddlePoint solve_saddle_numeric(const Geometry& geometry, double lambda,
                                 double alpha_cap, double beta_cap,
                                 SearchOrder order) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("solve_saddle_numeric: lambda must be > 0");
  }
  if (!(alpha_cap > 0.0) || !(beta_cap > kBetaFloor)) {
    throw std::invalid_argument("solve_saddle_numeric: caps must be positive");
  }
  auto dt = [&](double a, double b) { return d_tilde(geometry, lambda, a, b); };

  SaddlePoint out;
  out.method = SaddleMethod::NestedSearch;
  if (order == SearchOrder::MinMax) {
    auto outer = [&](double a) {
      return maximize_beta([&](double b) { return dt(a, b); }, beta_cap).value;
    };
    const auto best = search::golden_section_min(outer, 0.0, alpha_cap, kTol);
    out.alpha_star = best.x;
    out.beta_star =
        maximize_beta([&](double b) { return dt(best.x, b); }, beta_cap).beta;
  } else {
    auto inner_min = [&](double b) {
      return search::golden_section_min([&](double a) { return dt(a, b); }, 0.0,
                                        alpha_cap, kTol);
    };
    const auto best =
        maximize_beta([&](double b) { return inner_min(b).value; }, beta_cap);
    out.beta_star = best.beta;
    out.alpha_star = inner_min(best.beta).x;
  }
  if (out.alpha_star > alpha_cap - 10.0 * kTol) {
    throw CapTooSmall("alpha optimum on alpha_cap = " + std::to_string(alpha_cap));
  }
  out.alpha_sq = out.alpha_star * out.alpha_star;
  out.objective_value = dt(out.alpha_star, out.beta_star);
  return out;
}

SaddlePoint closed_form_saddle(const Geometry& geometry, double lambda) {
  const Prediction p = predict_nse(geometry, lambda);
  SaddlePoint out;
  out.method = SaddleMethod::ClosedForm;
  out.alpha_sq = p.eta;
  out.alpha_star = std::sqrt(p.eta);
  out.beta_star = lambda / (p.tau * std::sqrt(geometry.m()));
  out.objective_value =
      d_tilde(geometry, lambda, out.alpha_star, out.beta_star);
  return out;
}

}  // namespace lassonse
