#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace lassonse {

enum class RegularizerKind { L1, BlockL12 };

/// Structure of the regularizer f together with the support and sign
/// pattern of the true signal x0. Signal magnitudes are never stored: the
/// subdifferential at x0 depends only on this pattern.
///
/// For L1 the support lists coordinates and `signs` holds one +-1 per
/// support entry. For BlockL12 the support lists block indices and
/// `directions` holds one unit vector (length block_size) per active block.
class RegularizerSpec {
 public:
  static RegularizerSpec l1(std::size_t n, std::vector<std::size_t> support,
                            std::vector<double> signs);
  /// k-sparse L1 spec with support {0, ..., k-1} and all signs +1.
  static RegularizerSpec l1_sparse(std::size_t n, std::size_t k);
  static RegularizerSpec block_l12(std::size_t n, std::size_t block_size,
                                   std::vector<std::size_t> support,
                                   std::vector<Eigen::VectorXd> directions);

  RegularizerKind kind() const { return kind_; }
  std::size_t n() const { return n_; }
  std::size_t block_size() const { return block_size_; }
  std::size_t num_blocks() const { return n_ / block_size_; }
  const std::vector<std::size_t>& support() const { return support_; }
  const std::vector<double>& signs() const { return signs_; }
  const std::vector<Eigen::VectorXd>& directions() const { return directions_; }

  /// Number of active atoms: nonzero coordinates (L1) or blocks (BlockL12).
  std::size_t support_size() const { return support_.size(); }

  /// f(x): the l1 norm or the sum of block Euclidean norms.
  double value(const Eigen::VectorXd& x) const;

  /// Position of coordinate/block `i` within support(), or -1.
  long slot(std::size_t i) const { return slot_[i]; }

  bool operator==(const RegularizerSpec& other) const;

 private:
  RegularizerSpec() = default;
  void validate();

  RegularizerKind kind_ = RegularizerKind::L1;
  std::size_t n_ = 0;
  std::size_t block_size_ = 1;
  std::vector<std::size_t> support_;
  std::vector<double> signs_;
  std::vector<Eigen::VectorXd> directions_;
  // per-coordinate (L1) or per-block lookup into support_, -1 off support
  std::vector<long> slot_;
};

/// Euclidean projection of h onto tau * subdiff f(x0).
Eigen::VectorXd project_subdiff(const RegularizerSpec& spec,
                                const Eigen::VectorXd& h, double tau);

/// Same as project_subdiff, writing into `out` (resized as needed).
void project_subdiff_into(const RegularizerSpec& spec, const Eigen::VectorXd& h,
                          double tau, Eigen::VectorXd& out);

/// argmin_x 0.5 ||x - z||^2 + gamma f(x).
Eigen::VectorXd prox(const RegularizerSpec& spec, const Eigen::VectorXd& z,
                     double gamma);

double dist_to_subdiff(const RegularizerSpec& spec, const Eigen::VectorXd& h,
                       double tau);

nlohmann::json spec_to_json(const RegularizerSpec& spec);
RegularizerSpec spec_from_json(const nlohmann::json& j);

}  // namespace lassonse

template <>
struct nlohmann::adl_serializer<lassonse::RegularizerSpec> {
  static lassonse::RegularizerSpec from_json(const json& j) {
    return lassonse::spec_from_json(j);
  }
  static void to_json(json& j, const lassonse::RegularizerSpec& spec) {
    j = lassonse::spec_to_json(spec);
  }
};
