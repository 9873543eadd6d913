#include "lassonse/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lassonse {

namespace {

void check_length(const RegularizerSpec& spec, const Eigen::VectorXd& v,
                  const char* what) {
  if (static_cast<std::size_t>(v.size()) != spec.n()) {
    throw std::invalid_argument(std::string(what) + ": vector length " +
                                std::to_string(v.size()) +
                                " does not match n = " +
                                std::to_string(spec.n()));
  }
}

void check_scale(double s, const char* what) {
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument(std::string(what) +
                                ": scale must be finite and nonnegative");
  }
}

}  // namespace

RegularizerSpec RegularizerSpec::l1(std::size_t n,
                                    std::vector<std::size_t> support,
                                    std::vector<double> signs) {
  RegularizerSpec s;
  s.kind_ = RegularizerKind::L1;
  s.n_ = n;
  s.block_size_ = 1;
  s.support_ = std::move(support);
  s.signs_ = std::move(signs);
  s.validate();
  return s;
}

RegularizerSpec RegularizerSpec::l1_sparse(std::size_t n, std::size_t k) {
  std::vector<std::size_t> support(k);
  for (std::size_t i = 0; i < k; ++i) support[i] = i;
  return l1(n, std::move(support), std::vector<double>(k, 1.0));
}

RegularizerSpec RegularizerSpec::block_l12(
    std::size_t n, std::size_t block_size, std::vector<std::size_t> support,
    std::vector<Eigen::VectorXd> directions) {
  RegularizerSpec s;
  s.kind_ = RegularizerKind::BlockL12;
  s.n_ = n;
  s.block_size_ = block_size;
  s.support_ = std::move(support);
  s.directions_ = std::move(directions);
  s.validate();
  return s;
}

void RegularizerSpec::validate() {
  if (n_ == 0) throw std::invalid_argument("regularizer: n must be positive");
  if (block_size_ == 0) {
    throw std::invalid_argument("regularizer: block_size must be positive");
  }
  if (n_ % block_size_ != 0) {
    throw std::invalid_argument(
        "regularizer: n must be a multiple of block_size");
  }
  if (support_.empty()) {
    throw std::invalid_argument(
        "regularizer: support must be nonempty (x0 may not minimize f)");
  }
  if (!std::is_sorted(support_.begin(), support_.end()) ||
      std::adjacent_find(support_.begin(), support_.end()) != support_.end()) {
    throw std::invalid_argument(
        "regularizer: support must be sorted with distinct entries");
  }
  const std::size_t units = n_ / block_size_;
  if (support_.back() >= units) {
    throw std::invalid_argument("regularizer: support index out of range");
  }
  if (kind_ == RegularizerKind::L1) {
    if (signs_.size() != support_.size()) {
      throw std::invalid_argument(
          "regularizer: need one sign per support coordinate");
    }
    for (double s : signs_) {
      if (s != 1.0 && s != -1.0) {
        throw std::invalid_argument("regularizer: signs must be +1 or -1");
      }
    }
  } else {
    if (directions_.size() != support_.size()) {
      throw std::invalid_argument(
          "regularizer: need one direction per active block");
    }
    for (const auto& d : directions_) {
      if (static_cast<std::size_t>(d.size()) != block_size_) {
        throw std::invalid_argument(
            "regularizer: block direction has wrong length");
      }
      if (std::abs(d.norm() - 1.0) > 1e-12) {
        throw std::invalid_argument(
            "regularizer: block direction must have unit norm");
      }
    }
  }
  slot_.assign(units, -1);
  for (std::size_t j = 0; j < support_.size(); ++j) {
    slot_[support_[j]] = static_cast<long>(j);
  }
}

bool RegularizerSpec::operator==(const RegularizerSpec& other) const {
  if (kind_ != other.kind_ || n_ != other.n_ ||
      block_size_ != other.block_size_ || support_ != other.support_ ||
      signs_ != other.signs_ || directions_.size() != other.directions_.size()) {
    return false;
  }
  for (std::size_t j = 0; j < directions_.size(); ++j) {
    if (directions_[j] != other.directions_[j]) return false;
  }
  return true;
}

double RegularizerSpec::value(const Eigen::VectorXd& x) const {
  check_length(*this, x, "regularizer value");
  if (kind_ == RegularizerKind::L1) return x.lpNorm<1>();
  double total = 0.0;
  const auto b = static_cast<Eigen::Index>(block_size_);
  for (std::size_t blk = 0; blk < num_blocks(); ++blk) {
    total += x.segment(static_cast<Eigen::Index>(blk) * b, b).norm();
  }
  return total;
}

void project_subdiff_into(const RegularizerSpec& spec, const Eigen::VectorXd& h,
                          double tau, Eigen::VectorXd& out) {
  check_length(spec, h, "project_subdiff");
  check_scale(tau, "project_subdiff");
  out.resize(h.size());
  if (spec.kind() == RegularizerKind::L1) {
    const auto& signs = spec.signs();
    for (Eigen::Index i = 0; i < h.size(); ++i) {
      const long s = spec.slot(static_cast<std::size_t>(i));
      out[i] = s >= 0 ? tau * signs[static_cast<std::size_t>(s)]
                      : std::clamp(h[i], -tau, tau);
    }
    return;
  }
  const auto b = static_cast<Eigen::Index>(spec.block_size());
  for (std::size_t blk = 0; blk < spec.num_blocks(); ++blk) {
    const Eigen::Index off = static_cast<Eigen::Index>(blk) * b;
    const long s = spec.slot(blk);
    if (s >= 0) {
      out.segment(off, b) = tau * spec.directions()[static_cast<std::size_t>(s)];
    } else {
      const double norm = h.segment(off, b).norm();
      const double scale = norm > tau ? tau / norm : 1.0;
      out.segment(off, b) = scale * h.segment(off, b);
    }
  }
}

Eigen::VectorXd project_subdiff(const RegularizerSpec& spec,
                                const Eigen::VectorXd& h, double tau) {
  Eigen::VectorXd out;
  project_subdiff_into(spec, h, tau, out);
  return out;
}

Eigen::VectorXd prox(const RegularizerSpec& spec, const Eigen::VectorXd& z,
                     double gamma) {
  check_length(spec, z, "prox");
  check_scale(gamma, "prox");
  Eigen::VectorXd out(z.size());
  if (spec.kind() == RegularizerKind::L1) {
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double mag = std::abs(z[i]) - gamma;
      out[i] = mag > 0.0 ? std::copysign(mag, z[i]) : 0.0;
    }
    return out;
  }
  const auto b = static_cast<Eigen::Index>(spec.block_size());
  for (std::size_t blk = 0; blk < spec.num_blocks(); ++blk) {
    const Eigen::Index off = static_cast<Eigen::Index>(blk) * b;
    const double norm = z.segment(off, b).norm();
    const double shrink = norm > gamma ? 1.0 - gamma / norm : 0.0;
    out.segment(off, b) = shrink * z.segment(off, b);
  }
  return out;
}

double dist_to_subdiff(const RegularizerSpec& spec, const Eigen::VectorXd& h,
                       double tau) {
  return (h - project_subdiff(spec, h, tau)).norm();
}

nlohmann::json spec_to_json(const RegularizerSpec& spec) {
  nlohmann::json j;
  j["n"] = spec.n();
  j["support"] = spec.support();
  if (spec.kind() == RegularizerKind::L1) {
    j["kind"] = "l1";
    j["signs"] = spec.signs();
  } else {
    j["kind"] = "block_l12";
    j["block_size"] = spec.block_size();
    auto dirs = nlohmann::json::array();
    for (const auto& d : spec.directions()) {
      dirs.push_back(std::vector<double>(d.data(), d.data() + d.size()));
    }
    j["signs"] = std::move(dirs);
  }
  return j;
}

RegularizerSpec spec_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const auto n = j.at("n").get<std::size_t>();
    auto support = j.at("support").get<std::vector<std::size_t>>();
    if (kind == "l1") {
      return RegularizerSpec::l1(n, std::move(support),
                                 j.at("signs").get<std::vector<double>>());
    }
    if (kind == "block_l12") {
      const auto block_size = j.at("block_size").get<std::size_t>();
      std::vector<Eigen::VectorXd> dirs;
      for (const auto& d : j.at("signs")) {
        const auto v = d.get<std::vector<double>>();
        dirs.emplace_back(Eigen::Map<const Eigen::VectorXd>(
            v.data(), static_cast<Eigen::Index>(v.size())));
      }
      return RegularizerSpec::block_l12(n, block_size, std::move(support),
                                        std::move(dirs));
    }
    throw std::invalid_argument("regularizer: unknown kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("regularizer json: ") + e.what());
  }
}

}  // namespace lassonse
