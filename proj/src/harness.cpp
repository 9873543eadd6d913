#include "lassonse/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "lassonse/parallel.hpp"
#include "lassonse/random.hpp"

namespace lassonse {

namespace {

void check_grid(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) {
    throw std::invalid_argument(std::string(name) + " must be nonempty");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) {
      throw std::invalid_argument(std::string(name) +
                                  " entries must be finite and positive");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw std::invalid_argument(std::string(name) +
                                  " must be sorted strictly ascending");
    }
  }
}

std::string law_name(AmplitudeLaw law) {
  return law == AmplitudeLaw::UnitSigns ? "unit_signs" : "gaussian_amplitudes";
}

AmplitudeLaw law_from_name(const std::string& name) {
  if (name == "unit_signs") return AmplitudeLaw::UnitSigns;
  if (name == "gaussian_amplitudes") return AmplitudeLaw::GaussianAmplitudes;
  throw std::invalid_argument("unknown amplitude_law '" + name + "'");
}

std::string fmt_num(double x) { return fmt::format("{:.17g}", x); }

}  // namespace

void ExperimentConfig::validate() const {
  if (!(m >= 1.0) || m != std::floor(m)) {
    throw std::invalid_argument("experiment: m must be a positive integer");
  }
  check_grid(sigma_grid, "sigma_grid");
  check_grid(lambda_grid, "lambda_grid");
  if (trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
  if (!(solver_tol > 0.0)) throw std::invalid_argument("experiment: solver_tol must be > 0");
  if (solver_max_iter < 1) {
    throw std::invalid_argument("experiment: solver_max_iter must be >= 1");
  }
}

Geometry ExperimentConfig::geometry() const {
  std::optional<MonteCarloOptions> mc;
  if (spec.kind() != RegularizerKind::L1) mc = distance_mc;
  return Geometry(DistanceModel(spec, mc), m);
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    const auto& geo = j.at("geometry");
    const double m = geo.at("m").get<double>();
    std::optional<RegularizerSpec> spec;
    if (geo.contains("spec")) {
      if (geo.contains("n") || geo.contains("k")) {
        throw std::invalid_argument(
            "geometry: give either spec or n/k, not both");
      }
      spec = spec_from_json(geo.at("spec"));
    } else {
      spec = RegularizerSpec::l1_sparse(geo.at("n").get<std::size_t>(),
                                        geo.at("k").get<std::size_t>());
    }
    ExperimentConfig cfg{*spec, m, j.at("sigma_grid").get<std::vector<double>>(), {}};
    if (j.contains("trials")) cfg.trials = j["trials"].get<std::size_t>();
    if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("amplitude_law")) {
      cfg.amplitude_law = law_from_name(j["amplitude_law"].get<std::string>());
    }
    if (j.contains("solver_tol")) cfg.solver_tol = j["solver_tol"].get<double>();
    if (j.contains("solver_max_iter")) cfg.solver_max_iter = j["solver_max_iter"].get<int>();
    if (j.contains("distance_mc")) {
      const auto& mc = j["distance_mc"];
      cfg.distance_mc.samples = mc.value("samples", cfg.distance_mc.samples);
      cfg.distance_mc.seed = mc.value("seed", cfg.distance_mc.seed);
    }

    const auto& lg = j.at("lambda_grid");
    if (lg.is_array()) {
      cfg.lambda_grid = lg.get<std::vector<double>>();
    } else {
      std::vector<double> multipliers{1.0};
      if (lg.is_object()) {
        multipliers = lg.at("best_times").get<std::vector<double>>();
      } else if (!(lg.is_string() && lg.get<std::string>() == "best")) {
        throw std::invalid_argument(
            "lambda_grid must be a list, \"best\", or {\"best_times\": [...]}");
      }
      const double best = tune(cfg.geometry()).lambda_best;
      for (double c : multipliers) cfg.lambda_grid.push_back(c * best);
    }
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("experiment config: ") + e.what());
  }
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  return {
      {"geometry", {{"spec", spec_to_json(config.spec)}, {"m", config.m}}},
      {"sigma_grid", config.sigma_grid},
      {"lambda_grid", config.lambda_grid},
      {"trials", config.trials},
      {"master_seed", config.master_seed},
      {"amplitude_law", law_name(config.amplitude_law)},
      {"solver_tol", config.solver_tol},
      {"solver_max_iter", config.solver_max_iter},
      {"distance_mc",
       {{"samples", config.distance_mc.samples}, {"seed", config.distance_mc.seed}}},
  };
}

ProblemInstance make_instance(const ExperimentConfig& config,
                              std::size_t sigma_index, std::size_t lambda_index,
                              std::size_t trial_index) {
  const auto& spec = config.spec;
  const auto n = static_cast<Eigen::Index>(spec.n());
  const auto m = static_cast<Eigen::Index>(config.m);
  auto gen = substream(config.master_seed, {sigma_index, lambda_index, trial_index});
  std::normal_distribution<double> normal;

  Eigen::MatrixXd A(m, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < m; ++r) A(r, c) = normal(gen);
  }
  Eigen::VectorXd v(m);
  for (Eigen::Index r = 0; r < m; ++r) v[r] = normal(gen);

  auto amplitude = [&] {
    return config.amplitude_law == AmplitudeLaw::UnitSigns ? 1.0
                                                           : std::abs(normal(gen));
  };
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  for (std::size_t j = 0; j < spec.support_size(); ++j) {
    const auto idx = static_cast<Eigen::Index>(spec.support()[j]);
    if (spec.kind() == RegularizerKind::L1) {
      x0[idx] = spec.signs()[j] * amplitude();
    } else {
      const auto b = static_cast<Eigen::Index>(spec.block_size());
      x0.segment(idx * b, b) = amplitude() * spec.directions()[j];
    }
  }

  const double sigma = config.sigma_grid.at(sigma_index);
  Eigen::VectorXd y = A * x0 + sigma * v;
  return ProblemInstance{std::move(A), std::move(y), sigma,
                         config.lambda_grid.at(lambda_index), spec, std::move(x0)};
}

CellSummary summarize_cell(double sigma, double lambda, double eta_pred,
                           const std::vector<TrialResult>& trials) {
  CellSummary cell;
  cell.sigma = sigma;
  cell.lambda = lambda;
  cell.eta_pred = eta_pred;
  cell.trials = trials.size();
  double sum = 0.0;
  for (const auto& t : trials) {
    if (!t.converged) continue;
    ++cell.n_converged;
    sum += t.nse;
  }
  if (cell.n_converged == 0) {
    cell.mean_nse = std::numeric_limits<double>::quiet_NaN();
    cell.stderr_nse = std::numeric_limits<double>::quiet_NaN();
  } else {
    const double count = static_cast<double>(cell.n_converged);
    cell.mean_nse = sum / count;
    double ss = 0.0;
    for (const auto& t : trials) {
      if (t.converged) ss += (t.nse - cell.mean_nse) * (t.nse - cell.mean_nse);
    }
    cell.stderr_nse = cell.n_converged > 1 ? std::sqrt(ss / (count - 1.0) / count) : 0.0;
  }
  // strictly more than 20% of trials unconverged
  cell.unreliable = 5 * (cell.trials - cell.n_converged) > cell.trials;
  return cell;
}

std::string summary_csv_row(const CellSummary& c) {
  return fmt::format("{},{},{},{},{},{},{}", fmt_num(c.sigma), fmt_num(c.lambda),
                     fmt_num(c.mean_nse), fmt_num(c.stderr_nse),
                     fmt_num(c.eta_pred), c.n_converged, c.trials);
}

std::string summary_csv(const ExperimentSummary& summary) {
  std::string out = std::string(kSummaryCsvHeader) + "\n";
  for (const auto& c : summary.cells) out += summary_csv_row(c) + "\n";
  return out;
}

nlohmann::json summary_sidecar(const ExperimentConfig& config,
                               const ExperimentSummary& summary) {
  auto nan_to_null = [](double x) -> nlohmann::json {
    if (std::isfinite(x)) return x;
    return nullptr;
  };
  nlohmann::json unreliable = nlohmann::json::array();
  for (const auto& c : summary.cells) {
    if (c.unreliable) unreliable.push_back({c.sigma, c.lambda});
  }
  return {
      {"config", config_to_json(config)},
      {"prediction_available", summary.prediction_available},
      {"d_star", summary.d_star},
      {"tau_best", nan_to_null(summary.tau_best)},
      {"lambda_best", nan_to_null(summary.lambda_best)},
      {"eta_min", nan_to_null(summary.eta_min)},
      {"unreliable_cells", unreliable},
      {"complete", summary.cells.size() ==
                       config.sigma_grid.size() * config.lambda_grid.size()},
      {"version", kVersion},
  };
}

namespace {

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  return std::filesystem::path(csv.string() + ".json");
}

CellSummary parse_row(const std::string& line, std::size_t trials) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
  if (fields.size() != 7) throw std::runtime_error("malformed summary row: " + line);
  CellSummary c;
  c.sigma = std::stod(fields[0]);
  c.lambda = std::stod(fields[1]);
  c.mean_nse = std::stod(fields[2]);
  c.stderr_nse = std::stod(fields[3]);
  c.eta_pred = std::stod(fields[4]);
  c.n_converged = std::stoul(fields[5]);
  c.trials = std::stoul(fields[6]);
  if (c.trials != trials) throw std::runtime_error("summary row trial count mismatch");
  c.unreliable = 5 * (c.trials - c.n_converged) > c.trials;
  return c;
}

// Completed cells from an earlier run of the same config.
std::vector<CellSummary> load_partial(const ExperimentConfig& config,
                                      const std::filesystem::path& csv) {
  if (!std::filesystem::exists(csv)) return {};
  const auto side = sidecar_path(csv);
  if (!std::filesystem::exists(side)) {
    throw std::runtime_error("cannot resume " + csv.string() + ": sidecar missing");
  }
  std::ifstream side_in(side);
  const auto meta = nlohmann::json::parse(side_in);
  if (meta.at("config") != config_to_json(config)) {
    throw std::runtime_error("cannot resume " + csv.string() +
                             ": written for a different config");
  }
  std::ifstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != kSummaryCsvHeader) {
    throw std::runtime_error("cannot resume " + csv.string() + ": bad header");
  }
  std::vector<CellSummary> cells;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    cells.push_back(parse_row(line, config.trials));
  }
  const std::size_t nl = config.lambda_grid.size();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].sigma != config.sigma_grid.at(i / nl) ||
        cells[i].lambda != config.lambda_grid.at(i % nl)) {
      throw std::runtime_error("cannot resume " + csv.string() +
                               ": cell order does not match config");
    }
  }
  return cells;
}

void write_sidecar(const std::filesystem::path& csv, const ExperimentConfig& config,
                   const ExperimentSummary& summary) {
  std::ofstream out(sidecar_path(csv));
  out << summary_sidecar(config, summary).dump(2) << "\n";
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& config,
                                 const RunOptions& options) {
  config.validate();
  const std::size_t threads = options.threads ? options.threads : default_threads();
  const Geometry geometry = config.geometry();

  ExperimentSummary summary;
  const auto phase = phase_diagnostics(geometry);
  summary.d_star = phase.d_star;
  summary.prediction_available = phase.robust;
  std::vector<double> eta(config.lambda_grid.size(),
                          std::numeric_limits<double>::quiet_NaN());
  if (phase.robust) {
    const auto best = tune(geometry);
    summary.tau_best = best.tau_best;
    summary.lambda_best = best.lambda_best;
    summary.eta_min = best.eta_min;
    for (std::size_t l = 0; l < eta.size(); ++l) {
      eta[l] = predict_nse(geometry, config.lambda_grid[l]).eta;
    }
  } else {
    summary.tau_best = summary.lambda_best = summary.eta_min =
        std::numeric_limits<double>::quiet_NaN();
  }

  std::ofstream csv_out;
  if (options.output_csv) {
    summary.cells = load_partial(config, *options.output_csv);
    const bool fresh = summary.cells.empty();
    csv_out.open(*options.output_csv, fresh ? std::ios::trunc : std::ios::app);
    if (!csv_out) {
      throw std::runtime_error("cannot open " + options.output_csv->string());
    }
    if (fresh) csv_out << kSummaryCsvHeader << "\n" << std::flush;
    write_sidecar(*options.output_csv, config, summary);
  }

  const std::size_t nl = config.lambda_grid.size();
  const std::size_t n_cells = config.sigma_grid.size() * nl;
  for (std::size_t cell = summary.cells.size(); cell < n_cells; ++cell) {
    const std::size_t si = cell / nl;
    const std::size_t li = cell % nl;
    std::vector<TrialResult> results(config.trials);
    parallel_for(
        config.trials,
        [&](std::size_t t) {
          const ProblemInstance inst = make_instance(config, si, li, t);
          const SolverReport rep =
              solve(inst, config.solver_tol, config.solver_max_iter);
          TrialResult& r = results[t];
          r.sigma = inst.sigma;
          r.lambda = inst.lambda;
          r.trial_index = t;
          r.nse = nse(rep.x_hat, inst.x0, inst.sigma);
          r.converged = rep.converged && std::isfinite(r.nse);
          r.iterations = rep.iterations;
        },
        threads);
    summary.cells.push_back(summarize_cell(config.sigma_grid[si],
                                           config.lambda_grid[li], eta[li], results));
    summary.trials.insert(summary.trials.end(), results.begin(), results.end());
    if (csv_out.is_open()) {
      csv_out << summary_csv_row(summary.cells.back()) << "\n" << std::flush;
    }
  }
  if (options.output_csv) write_sidecar(*options.output_csv, config, summary);
  return summary;
}

}  // namespace lassonse
