#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>

#include "lassonse/regularizer.hpp"

namespace lassonse {

/// Q(t) = P(N(0,1) > t).
double q_tail(double t);

enum class DistanceSource { ClosedForm, MonteCarlo };

std::string_view to_string(DistanceSource source);

/// Gaussian squared distance D(tau) = E dist^2(h, tau df(x0)) and the
/// correlation term C(tau) = E (h - pi(h))' pi(h), with standard errors for
/// Monte Carlo estimates (zero for closed form).
struct DistancePair {
  double tau = 0.0;
  double D = 0.0;
  double C = 0.0;
  double stderr_D = 0.0;
  double stderr_C = 0.0;
  DistanceSource source = DistanceSource::ClosedForm;
};

/// Closed forms for the l1 norm at a k-sparse x0 in R^n:
///   D = k(1+t^2) + (n-k)[2(1+t^2)Q(t) - sqrt(2/pi) t exp(-t^2/2)]
///   C = -k t^2   + (n-k)[sqrt(2/pi) t exp(-t^2/2) - 2 t^2 Q(t)]
/// Requires 0 < k < n. See docs/math_notes.md for how these were checked.
DistancePair dc_closed_l1(std::size_t n, std::size_t k, double tau);

/// Sample means over `samples` standard Gaussian draws. Samples are split
/// into fixed chunks, each with its own substream of `seed`, and merged in
/// chunk order, so the output is bit-identical for any thread count.
DistancePair dc_monte_carlo(const RegularizerSpec& spec, double tau,
                            std::size_t samples, std::uint64_t seed);

struct MonteCarloOptions {
  std::size_t samples = 20000;
  std::uint64_t seed = 0;
};

/// Evaluates (D, C) for one regularizer: closed form for l1, Monte Carlo
/// (with common random numbers across tau) otherwise or when forced.
/// Copies share a thread-safe memo of Monte Carlo evaluations.
class DistanceModel {
 public:
  explicit DistanceModel(RegularizerSpec spec,
                         std::optional<MonteCarloOptions> force_mc = {});

  DistancePair operator()(double tau) const;
  double D(double tau) const { return (*this)(tau).D; }
  double C(double tau) const { return (*this)(tau).C; }

  const RegularizerSpec& spec() const { return spec_; }
  std::size_t n() const { return spec_.n(); }
  bool is_closed_form() const { return !mc_.has_value(); }
  const std::optional<MonteCarloOptions>& monte_carlo() const { return mc_; }

 private:
  struct Memo {
    std::mutex mutex;
    std::map<double, DistancePair> values;
  };

  RegularizerSpec spec_;
  std::optional<MonteCarloOptions> mc_;
  std::shared_ptr<Memo> memo_;
};

struct DistanceMinimum {
  double tau_best;
  double d_min;
};

/// argmin_{tau >= 0} D(tau). Golden-section on D brackets the minimizer,
/// then the sign change of C (D' = -(2/tau) C) pins it to `tol`. Default
/// tolerance is 1e-10 for closed form and 1e-4 for Monte Carlo.
/// Throws NoInteriorMinimum if D is still decreasing at tau = 1e6.
DistanceMinimum d_min(const DistanceModel& model,
                      std::optional<double> tol = {});

}  // namespace lassonse
