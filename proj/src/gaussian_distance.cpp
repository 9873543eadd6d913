#include "lassonse/gaussian_distance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lassonse/errors.hpp"
#include "lassonse/parallel.hpp"
#include "lassonse/random.hpp"
#include "lassonse/scalar_search.hpp"

namespace lassonse {

double q_tail(double t) { return 0.5 * std::erfc(t / std::numbers::sqrt2); }

std::string_view to_string(DistanceSource source) {
  return source == DistanceSource::ClosedForm ? "closed_form" : "monte_carlo";
}

DistancePair dc_closed_l1(std::size_t n, std::size_t k, double tau) {
  if (k == 0 || k >= n) {
    throw std::invalid_argument("dc_closed_l1: need 0 < k < n (got n = " +
                                std::to_string(n) + ", k = " +
                                std::to_string(k) + ")");
  }
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("dc_closed_l1: tau must be finite and >= 0");
  }
  const double kk = static_cast<double>(k);
  const double off = static_cast<double>(n - k);
  const double t2 = tau * tau;
  const double q = q_tail(tau);
  // sqrt(2/pi) t exp(-t^2/2) == 2 t phi(t)
  const double g = std::sqrt(2.0 / std::numbers::pi) * tau * std::exp(-0.5 * t2);
  DistancePair out;
  out.tau = tau;
  out.D = kk * (1.0 + t2) + off * (2.0 * (1.0 + t2) * q - g);
  out.C = -kk * t2 + off * (g - 2.0 * t2 * q);
  out.source = DistanceSource::ClosedForm;
  return out;
}

namespace {

constexpr std::size_t kChunk = 1024;

struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    count += 1.0;
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }

  // Chan et al. pairwise update
  void merge(const Moments& o) {
    if (o.count == 0.0) return;
    const double total = count + o.count;
    const double delta = o.mean - mean;
    mean += delta * o.count / total;
    m2 += o.m2 + delta * delta * count * o.count / total;
    count = total;
  }

  double stderr_of_mean() const {
    if (count < 2.0) return 0.0;
    return std::sqrt(m2 / (count - 1.0) / count);
  }
};

}  // namespace

DistancePair dc_monte_carlo(const RegularizerSpec& spec, double tau,
                            std::size_t samples, std::uint64_t seed) {
  if (samples == 0) {
    throw std::invalid_argument("dc_monte_carlo: samples must be >= 1");
  }
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("dc_monte_carlo: tau must be finite and >= 0");
  }
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<Moments> dist_parts(chunks), cross_parts(chunks);
  const auto n = static_cast<Eigen::Index>(spec.n());

  parallel_for(chunks, [&](std::size_t c) {
    auto gen = substream(seed, {c});
    std::normal_distribution<double> normal;
    Eigen::VectorXd h(n), proj(n);
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(samples, begin + kChunk);
    Moments dist, cross;
    for (std::size_t s = begin; s < end; ++s) {
      for (Eigen::Index i = 0; i < n; ++i) h[i] = normal(gen);
      project_subdiff_into(spec, h, tau, proj);
      h -= proj;
      dist.add(h.squaredNorm());
      cross.add(h.dot(proj));
    }
    dist_parts[c] = dist;
    cross_parts[c] = cross;
  });

  Moments dist, cross;
  for (std::size_t c = 0; c < chunks; ++c) {
    dist.merge(dist_parts[c]);
    cross.merge(cross_parts[c]);
  }
  DistancePair out;
  out.tau = tau;
  out.D = dist.mean;
  out.C = cross.mean;
  out.stderr_D = dist.stderr_of_mean();
  out.stderr_C = cross.stderr_of_mean();
  out.source = DistanceSource::MonteCarlo;
  return out;
}

DistanceModel::DistanceModel(RegularizerSpec spec,
                             std::optional<MonteCarloOptions> force_mc)
    : spec_(std::move(spec)), mc_(force_mc), memo_(std::make_shared<Memo>()) {
  if (!mc_ && spec_.kind() != RegularizerKind::L1) mc_ = MonteCarloOptions{};
  if (!mc_ && spec_.support_size() >= spec_.n()) {
    throw std::invalid_argument(
        "distance model: closed form needs k < n; every coordinate is in the "
        "support");
  }
}

DistancePair DistanceModel::operator()(double tau) const {
  if (!mc_) return dc_closed_l1(spec_.n(), spec_.support_size(), tau);
  {
    std::lock_guard lock(memo_->mutex);
    if (auto it = memo_->values.find(tau); it != memo_->values.end()) {
      return it->second;
    }
  }
  // computed outside the lock; a racing duplicate computes the same value
  DistancePair value = dc_monte_carlo(spec_, tau, mc_->samples, mc_->seed);
  std::lock_guard lock(memo_->mutex);
  memo_->values.emplace(tau, value);
  return value;
}

DistanceMinimum d_min(const DistanceModel& model, std::optional<double> tol) {
  const double tolerance = tol.value_or(model.is_closed_form() ? 1e-10 : 1e-4);
  constexpr double kMaxTau = 1e6;

  double hi = 1.0;
  while (model.D(hi) <= model.D(0.5 * hi)) {
    hi *= 2.0;
    if (hi > kMaxTau) {
      throw NoInteriorMinimum("D(tau) still decreasing at tau = " +
                              std::to_string(hi));
    }
  }
  const auto coarse = search::golden_section_min(
      [&](double t) { return model.D(t); }, 0.0, hi, tolerance);

  // D is flat near its minimum, so golden-section alone resolves tau only to
  // about sqrt(machine eps). C changes sign from + to - at the minimizer.
  double step = std::max(1e-6 * hi, 1e-9);
  double lo_t = coarse.x, hi_t = coarse.x;
  while (lo_t > 0.0 && model.C(lo_t) <= 0.0) {
    lo_t = std::max(0.0, lo_t - step);
    step *= 2.0;
  }
  step = std::max(1e-6 * hi, 1e-9);
  while (model.C(hi_t) > 0.0) {
    hi_t += step;
    step *= 2.0;
    if (hi_t > kMaxTau) throw NoInteriorMinimum("C(tau) never turns negative");
  }
  if (lo_t == 0.0 && model.C(std::max(hi_t * 1e-12, 1e-300)) <= 0.0) {
    throw NoInteriorMinimum("D(tau) is increasing from tau = 0");
  }
  const auto [a, b] = search::bisect(
      [&](double t) { return t == 0.0 || model.C(t) > 0.0; }, lo_t, hi_t,
      std::min(tolerance, 1e-10), 1e-15);
  const double tau_best = 0.5 * (a + b);
  return {tau_best, model.D(tau_best)};
}

}  // namespace lassonse
