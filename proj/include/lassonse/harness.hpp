#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lassonse/gaussian_distance.hpp"
#include "lassonse/lasso_solver.hpp"
#include "lassonse/map_calculus.hpp"

namespace lassonse {

inline constexpr const char* kVersion = "0.1.0";

enum class AmplitudeLaw { UnitSigns, GaussianAmplitudes };

/// Monte Carlo sweep over (sigma, lambda, trial).
struct ExperimentConfig {
  RegularizerSpec spec;
  double m;
  std::vector<double> sigma_grid;
  std::vector<double> lambda_grid;
  std::size_t trials = 25;
  std::uint64_t master_seed = 0;
  AmplitudeLaw amplitude_law = AmplitudeLaw::UnitSigns;
  double solver_tol = 1e-12;
  int solver_max_iter = 50000;
  /// Distance model settings for regularizers without closed forms.
  MonteCarloOptions distance_mc{};

  /// Throws std::invalid_argument on empty/unsorted/nonpositive grids,
  /// zero trials, or a non-integer m.
  void validate() const;

  Geometry geometry() const;
};

/// Reads the JSON config schema documented in docs/config_schema.md.
/// "lambda_grid" may be a list, the string "best", or
/// {"best_times": [c1, c2, ...]}; the last two resolve against lambda_best.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);

struct TrialResult {
  double sigma = 0.0;
  double lambda = 0.0;
  std::size_t trial_index = 0;
  double nse = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct CellSummary {
  double sigma = 0.0;
  double lambda = 0.0;
  double mean_nse = 0.0;
  double stderr_nse = 0.0;
  /// eta(lambda), NaN when m <= min D.
  double eta_pred = 0.0;
  std::size_t n_converged = 0;
  std::size_t trials = 0;
  /// More than 20% of trials failed to converge.
  bool unreliable = false;
};

struct ExperimentSummary {
  std::vector<CellSummary> cells;  // sigma-major, lambda-minor
  std::vector<TrialResult> trials;  // only for cells computed in this run
  bool prediction_available = false;
  double d_star = 0.0;
  double tau_best = 0.0;
  double lambda_best = 0.0;
  double eta_min = 0.0;
};

/// Deterministic instance for cell (sigma_index, lambda_index) and trial.
ProblemInstance make_instance(const ExperimentConfig& config,
                              std::size_t sigma_index, std::size_t lambda_index,
                              std::size_t trial_index);

/// Aggregates converged trials (unconverged ones are counted, not averaged).
CellSummary summarize_cell(double sigma, double lambda, double eta_pred,
                           const std::vector<TrialResult>& trials);

struct RunOptions {
  /// When set, cells are appended to this CSV as they complete, and a JSON
  /// sidecar (path + ".json") records the config. An existing CSV written
  /// for the same config is resumed after its last complete cell.
  std::optional<std::filesystem::path> output_csv;
  std::size_t threads = 0;  // 0: default_threads()
};

ExperimentSummary run_experiment(const ExperimentConfig& config,
                                 const RunOptions& options = {});

inline constexpr const char* kSummaryCsvHeader =
    "sigma,lambda,mean_nse,stderr_nse,eta_pred,n_converged,trials";

std::string summary_csv_row(const CellSummary& cell);
std::string summary_csv(const ExperimentSummary& summary);
nlohmann::json summary_sidecar(const ExperimentConfig& config,
                               const ExperimentSummary& summary);

}  // namespace lassonse
