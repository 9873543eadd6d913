#include "lassonse/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "lassonse/errors.hpp"
#include "lassonse/gordon.hpp"
#include "lassonse/harness.hpp"
#include "lassonse/map_calculus.hpp"

namespace lassonse::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::optional<std::size_t> n, k;
  std::optional<double> m;
  std::string spec_path;
  std::uint64_t seed = 0;
  std::size_t mc_samples = 20000;
  std::string out_path;
  std::string format;
};

void add_common(CLI::App* app, Common& c, const std::string& default_format,
                bool needs_m) {
  auto* n = app->add_option("--n", c.n, "ambient dimension (k-sparse l1 geometry)");
  auto* k = app->add_option("--k", c.k, "sparsity level");
  auto* spec = app->add_option("--spec", c.spec_path, "regularizer spec JSON file")
                   ->check(CLI::ExistingFile);
  n->excludes(spec);
  k->excludes(spec);
  if (needs_m) app->add_option("--m", c.m, "number of measurements")->required();
  app->add_option("--seed", c.seed, "Monte Carlo seed")->capture_default_str();
  app->add_option("--mc-samples", c.mc_samples,
                  "Monte Carlo samples per tau (block regularizers, dist rows)")
      ->capture_default_str();
  app->add_option("--out", c.out_path, "write output to this file");
  c.format = default_format;
  app->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

RegularizerSpec load_spec(const Common& c) {
  if (!c.spec_path.empty()) {
    std::ifstream in(c.spec_path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError(std::string("cannot parse spec file: ") + e.what());
    }
    return spec_from_json(j);
  }
  if (!c.n || !c.k) throw UsageError("need --n and --k, or --spec");
  return RegularizerSpec::l1_sparse(*c.n, *c.k);
}

DistanceModel load_model(const Common& c) {
  RegularizerSpec spec = load_spec(c);
  std::optional<MonteCarloOptions> mc;
  if (spec.kind() != RegularizerKind::L1) mc = MonteCarloOptions{c.mc_samples, c.seed};
  return DistanceModel(std::move(spec), mc);
}

Geometry load_geometry(const Common& c) { return Geometry(load_model(c), *c.m); }

std::string num(double x) { return fmt::format("{:.17g}", x); }

json json_num(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
}

std::vector<double> linear_grid(double lo, double hi, std::size_t steps) {
  if (steps < 2) return {lo};
  std::vector<double> g(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  return g;
}

std::vector<double> log_grid(double lo, double hi, std::size_t steps) {
  auto g = linear_grid(std::log(lo), std::log(hi), steps);
  for (auto& v : g) v = std::exp(v);
  return g;
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output file " + path);
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

// dist --------------------------------------------------------------------

struct DistArgs {
  Common common;
  std::vector<double> taus;
  double tau_min = 0.0, tau_max = 5.0;
  std::size_t tau_steps = 51;
  bool monte_carlo = false;
};

int run_dist(DistArgs& a, std::ostream& out) {
  const DistanceModel model = load_model(a.common);
  const auto taus = a.taus.empty() ? linear_grid(a.tau_min, a.tau_max, a.tau_steps) : a.taus;
  std::vector<DistancePair> rows;
  for (double t : taus) {
    rows.push_back(model(t));
    if (a.monte_carlo && model.is_closed_form()) {
      rows.push_back(dc_monte_carlo(model.spec(), t, a.common.mc_samples, a.common.seed));
    }
  }
  Sink sink(a.common.out_path, out);
  if (a.common.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"tau", r.tau}, {"D", r.D}, {"C", r.C}, {"stderr_D", r.stderr_D},
                     {"stderr_C", r.stderr_C}, {"source", to_string(r.source)}});
    }
    *sink << json{{"rows", arr}}.dump(2) << "\n";
  } else {
    *sink << "tau,D,C,stderr_D,stderr_C,source\n";
    for (const auto& r : rows) {
      *sink << num(r.tau) << ',' << num(r.D) << ',' << num(r.C) << ','
            << num(r.stderr_D) << ',' << num(r.stderr_C) << ',' << to_string(r.source)
            << '\n';
    }
  }
  return kExitOk;
}

// map ---------------------------------------------------------------------

struct MapArgs {
  Common common;
  std::size_t points = 100;
};

int run_map(MapArgs& a, std::ostream& out) {
  const Geometry g = load_geometry(a.common);
  const Region r = region(g);
  const Tuning best = tune(g);
  struct Row {
    double tau, D, C, map;
  };
  std::vector<Row> rows;
  for (std::size_t i = 1; i <= a.points; ++i) {
    const double t = r.tau_lo + (r.tau_hi - r.tau_lo) * static_cast<double>(i) /
                                    static_cast<double>(a.points + 1);
    if (!in_region(g, t)) continue;
    const auto dc = g.at(t);
    rows.push_back({t, dc.D, dc.C, map_tau(g, t)});
  }
  Sink sink(a.common.out_path, out);
  if (a.common.format == "json") {
    json arr = json::array();
    for (const auto& row : rows) {
      arr.push_back({{"tau", row.tau}, {"D", row.D}, {"C", row.C}, {"map", row.map}});
    }
    *sink << json{{"tau_lo", r.tau_lo}, {"tau_hi", r.tau_hi}, {"tau_best", best.tau_best},
                  {"lambda_best", best.lambda_best}, {"m", g.m()}, {"rows", arr}}
                 .dump(2)
          << "\n";
  } else {
    *sink << "tau,D,C,map,tau_lo,tau_hi\n";
    for (const auto& row : rows) {
      *sink << num(row.tau) << ',' << num(row.D) << ',' << num(row.C) << ','
            << num(row.map) << ',' << num(r.tau_lo) << ',' << num(r.tau_hi) << '\n';
    }
  }
  return kExitOk;
}

// predict -----------------------------------------------------------------

struct PredictArgs {
  Common common;
  std::vector<double> lambdas;
  std::optional<double> lambda_min, lambda_max;
  std::size_t lambda_steps = 50;
};

int run_predict(PredictArgs& a, std::ostream& out) {
  const Geometry g = load_geometry(a.common);
  std::vector<double> lambdas = a.lambdas;
  if (lambdas.empty()) {
    const double best = tune(g).lambda_best;
    lambdas = log_grid(a.lambda_min.value_or(best / 10.0),
                       a.lambda_max.value_or(best * 10.0), a.lambda_steps);
  }
  std::vector<Prediction> preds;
  for (double l : lambdas) preds.push_back(predict_nse(g, l));
  Sink sink(a.common.out_path, out);
  if (a.common.format == "json") {
    json arr = json::array();
    for (const auto& p : preds) {
      arr.push_back({{"lambda", p.lambda}, {"tau", p.tau}, {"eta", p.eta},
                     {"stderr_eta", p.stderr_eta}, {"tau_lo", p.region.tau_lo},
                     {"tau_hi", p.region.tau_hi}, {"low_confidence", p.low_confidence}});
    }
    *sink << json{{"rows", arr}}.dump(2) << "\n";
  } else {
    *sink << "lambda,tau,eta,stderr_eta,tau_lo,tau_hi,low_confidence\n";
    for (const auto& p : preds) {
      *sink << num(p.lambda) << ',' << num(p.tau) << ',' << num(p.eta) << ','
            << num(p.stderr_eta) << ',' << num(p.region.tau_lo) << ','
            << num(p.region.tau_hi) << ',' << (p.low_confidence ? 1 : 0) << '\n';
    }
  }
  return kExitOk;
}

// tune / phase ------------------------------------------------------------

int run_tune(Common& c, std::ostream& out) {
  const Geometry g = load_geometry(c);
  const Tuning t = tune(g);
  Sink sink(c.out_path, out);
  if (c.format == "json") {
    *sink << json{{"lambda_best", t.lambda_best}, {"tau_best", t.tau_best},
                  {"eta_min", t.eta_min}, {"d_star", g.minimum().d_min}}
                 .dump(2)
          << "\n";
  } else {
    *sink << "lambda_best,tau_best,eta_min,d_star\n"
          << num(t.lambda_best) << ',' << num(t.tau_best) << ',' << num(t.eta_min)
          << ',' << num(g.minimum().d_min) << '\n';
  }
  return kExitOk;
}

int run_phase(Common& c, std::ostream& out, std::ostream& err) {
  const Geometry g = load_geometry(c);
  const PhaseDiagnostics p = phase_diagnostics(g);
  {
    Sink sink(c.out_path, out);
    if (c.format == "json") {
      *sink << json{{"m", g.m()}, {"d_star", p.d_star}, {"robust", p.robust},
                    {"minimax_nse", json_num(p.minimax_nse)}}
                   .dump(2)
            << "\n";
    } else {
      *sink << "m,d_star,robust,minimax_nse\n"
            << num(g.m()) << ',' << num(p.d_star) << ',' << (p.robust ? 1 : 0) << ','
            << num(p.minimax_nse) << '\n';
    }
  }
  if (!p.robust) {
    err << "error: below phase transition: m = " << num(g.m())
        << " <= min_tau D(tau) = " << num(p.d_star)
        << "; recovery is not robust and the NSE is unbounded\n";
    return kExitDomain;
  }
  return kExitOk;
}

// gordon ------------------------------------------------------------------

struct GordonArgs {
  Common common;
  std::optional<double> lambda, alpha_cap, beta_cap;
};

json saddle_json(const SaddlePoint& s) {
  return {{"alpha_star", s.alpha_star}, {"beta_star", s.beta_star},
          {"objective_value", s.objective_value}, {"method", to_string(s.method)}};
}

int run_gordon(GordonArgs& a, std::ostream& out) {
  const Geometry g = load_geometry(a.common);
  const double lambda = a.lambda.value_or(tune(g).lambda_best);
  const SaddlePoint closed = closed_form_saddle(g, lambda);
  const SaddlePoint numeric =
      solve_saddle_numeric(g, lambda, a.alpha_cap.value_or(4.0 * closed.alpha_star + 1.0),
                           a.beta_cap.value_or(4.0 * closed.beta_star));
  const json doc{{"lambda", lambda},
                 {"closed_form", saddle_json(closed)},
                 {"numeric", saddle_json(numeric)},
                 {"delta_alpha", numeric.alpha_star - closed.alpha_star},
                 {"delta_beta", numeric.beta_star - closed.beta_star},
                 {"delta_objective", numeric.objective_value - closed.objective_value}};
  Sink sink(a.common.out_path, out);
  if (a.common.format == "csv") {
    *sink << "method,alpha_star,beta_star,objective_value\n";
    for (const auto* s : {&closed, &numeric}) {
      *sink << to_string(s->method) << ',' << num(s->alpha_star) << ','
            << num(s->beta_star) << ',' << num(s->objective_value) << '\n';
    }
  } else {
    *sink << doc.dump(2) << "\n";
  }
  return kExitOk;
}

// validate ----------------------------------------------------------------

struct ValidateArgs {
  std::string config_path;
  std::string out_path;
  std::size_t threads = 0;
};

int run_validate(ValidateArgs& a, std::ostream& out) {
  std::ifstream in(a.config_path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("cannot parse config: ") + e.what());
  }
  const ExperimentConfig cfg = config_from_json(j);
  RunOptions opts;
  opts.threads = a.threads;
  if (!a.out_path.empty()) opts.output_csv = a.out_path;
  const ExperimentSummary s = run_experiment(cfg, opts);
  if (a.out_path.empty()) {
    out << summary_csv(s);
  } else {
    out << summary_sidecar(cfg, s).dump(2) << "\n";
  }
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Asymptotic NSE prediction and Monte Carlo validation for the "
               "l2^2-LASSO",
               "lassonse"};
  app.require_subcommand(1);

  DistArgs dist;
  auto* dist_cmd = app.add_subcommand("dist", "D(tau), C(tau) table");
  add_common(dist_cmd, dist.common, "csv", false);
  auto* tau_opt = dist_cmd->add_option("--tau", dist.taus, "explicit tau values");
  dist_cmd->add_option("--tau-min", dist.tau_min)->excludes(tau_opt)->capture_default_str();
  dist_cmd->add_option("--tau-max", dist.tau_max)->excludes(tau_opt)->capture_default_str();
  dist_cmd->add_option("--tau-steps", dist.tau_steps)->excludes(tau_opt)->capture_default_str();
  dist_cmd->add_flag("--monte-carlo", dist.monte_carlo,
                     "also emit Monte Carlo rows next to closed-form rows");

  MapArgs map;
  auto* map_cmd = app.add_subcommand("map", "map(tau) over the region R");
  add_common(map_cmd, map.common, "csv", true);
  map_cmd->add_option("--points", map.points, "interior grid points")->capture_default_str();

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "eta(lambda) over a lambda grid");
  add_common(predict_cmd, predict.common, "csv", true);
  auto* lam_opt = predict_cmd->add_option("--lambda", predict.lambdas, "explicit lambdas");
  predict_cmd->add_option("--lambda-min", predict.lambda_min)->excludes(lam_opt);
  predict_cmd->add_option("--lambda-max", predict.lambda_max)->excludes(lam_opt);
  predict_cmd->add_option("--lambda-steps", predict.lambda_steps)
      ->excludes(lam_opt)
      ->capture_default_str();

  Common tune_args;
  auto* tune_cmd = app.add_subcommand("tune", "optimal lambda and minimal NSE");
  add_common(tune_cmd, tune_args, "json", true);

  Common phase_args;
  auto* phase_cmd = app.add_subcommand("phase", "phase-transition diagnostics");
  add_common(phase_cmd, phase_args, "json", true);

  GordonArgs gordon;
  auto* gordon_cmd = app.add_subcommand("gordon", "closed-form vs numeric saddle point");
  add_common(gordon_cmd, gordon.common, "json", true);
  gordon_cmd->add_option("--lambda", gordon.lambda, "LASSO parameter (default lambda_best)");
  gordon_cmd->add_option("--alpha-cap", gordon.alpha_cap);
  gordon_cmd->add_option("--beta-cap", gordon.beta_cap);

  ValidateArgs validate;
  auto* validate_cmd = app.add_subcommand("validate", "run a Monte Carlo experiment");
  validate_cmd->add_option("--config", validate.config_path, "experiment JSON")
      ->required()
      ->check(CLI::ExistingFile);
  validate_cmd->add_option("--out", validate.out_path,
                           "summary CSV (resumable; sidecar at <out>.json)");
  validate_cmd->add_option("--threads", validate.threads, "worker threads (0: default)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (dist_cmd->parsed()) return run_dist(dist, out);
    if (map_cmd->parsed()) return run_map(map, out);
    if (predict_cmd->parsed()) return run_predict(predict, out);
    if (tune_cmd->parsed()) return run_tune(tune_args, out);
    if (phase_cmd->parsed()) return run_phase(phase_args, out, err);
    if (gordon_cmd->parsed()) return run_gordon(gordon, out);
    if (validate_cmd->parsed()) return run_validate(validate, out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  err << "usage error: no subcommand\n";
  return kExitUsage;
}

}  // namespace lassonse::cli
