#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "lassonse/cli.hpp"
#include "lassonse/harness.hpp"
#include "oracles.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = lassonse::cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) {
    std::vector<std::string> fields;
    std::stringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / "lassonse_cli_tests";
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Exit status of the installed binary.
int exit_status(const std::string& args) {
  const std::string cmd = std::string(LASSONSE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("tune reports the optimal tuning as JSON") {
  const auto r = run({"tune", "--n", "1000", "--m", "500", "--k", "100"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  for (const char* key : {"lambda_best", "tau_best", "eta_min", "d_star"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["eta_min"].get<double>() > 0.0);
  const auto t = lassonse::tune(lassonse::Geometry::l1_sparse(1000, 100, 500));
  CHECK(j["lambda_best"].get<double>() == t.lambda_best);
  CHECK(j["eta_min"].get<double>() == t.eta_min);
}

TEST_CASE("phase below the transition exits with a domain error") {
  // precondition from an independent grid scan: d_star > 100 here
  const auto grid = oracle::grid_min(
      [](double t) { return oracle::l1_closed(1000, 100, t).D; }, 0.0, 10.0, 1e-3);
  REQUIRE(grid.value > 100.0);

  const auto r = run({"phase", "--n", "1000", "--m", "100", "--k", "100"});
  CHECK(r.code == lassonse::cli::kExitDomain);
  CHECK(r.err.find("phase transition") != std::string::npos);
  const auto j = json::parse(r.out);
  CHECK(j["robust"] == false);
  CHECK(j["minimax_nse"] == "inf");

  const auto ok = run({"phase", "--n", "1000", "--m", "500", "--k", "100"});
  CHECK(ok.code == 0);
  CHECK(json::parse(ok.out)["robust"] == true);
}

TEST_CASE("dist at tau = 0") {
  const auto r = run({"dist", "--n", "100", "--k", "10", "--tau", "0"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"tau", "D", "C", "stderr_D", "stderr_C", "source"});
  CHECK(std::stod(rows[1][1]) == 100.0);
  CHECK(std::stod(rows[1][2]) == 0.0);
  CHECK(rows[1][5] == "closed_form");
}

TEST_CASE("csv outputs have consistent columns and exact numbers") {
  const std::vector<std::vector<std::string>> commands = {
      {"dist", "--n", "100", "--k", "10", "--tau-steps", "7"},
      {"map", "--n", "100", "--k", "10", "--m", "50", "--points", "9"},
      {"predict", "--n", "100", "--k", "10", "--m", "50", "--lambda-steps", "6"},
      {"tune", "--n", "100", "--k", "10", "--m", "50", "--format", "csv"},
      {"phase", "--n", "100", "--k", "10", "--m", "50", "--format", "csv"},
      {"gordon", "--n", "100", "--k", "10", "--m", "50", "--format", "csv"},
  };
  for (const auto& args : commands) {
    CAPTURE(args[0]);
    const auto r = run(args);
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() >= 2);
    for (const auto& row : rows) CHECK(row.size() == rows[0].size());
  }

  const auto p = run({"predict", "--n", "100", "--k", "10", "--m", "50", "--lambda", "3.5"});
  const auto rows = parse_csv(p.out);
  const auto g = lassonse::Geometry::l1_sparse(100, 10, 50);
  CHECK(std::stod(rows[1][2]) == lassonse::predict_nse(g, 3.5).eta);
}

TEST_CASE("json outputs are single valid documents") {
  const std::vector<std::vector<std::string>> commands = {
      {"dist", "--n", "100", "--k", "10", "--format", "json"},
      {"map", "--n", "100", "--k", "10", "--m", "50", "--format", "json"},
      {"predict", "--n", "100", "--k", "10", "--m", "50", "--format", "json"},
      {"tune", "--n", "100", "--k", "10", "--m", "50"},
      {"phase", "--n", "100", "--k", "10", "--m", "50"},
      {"gordon", "--n", "100", "--k", "10", "--m", "50"},
  };
  for (const auto& args : commands) {
    CAPTURE(args[0]);
    const auto r = run(args);
    REQUIRE(r.code == 0);
    CHECK(json::accept(r.out));
  }
  const auto m = json::parse(run(commands[1]).out);
  CHECK(m["rows"].size() == 100);
  CHECK(m["tau_lo"].get<double>() < m["tau_hi"].get<double>());

  const auto gj = json::parse(run(commands[5]).out);
  CHECK(std::abs(gj["delta_alpha"].get<double>()) <= 1e-6);
  CHECK(gj["closed_form"]["method"] == "closed_form");
  CHECK(gj["numeric"]["method"] == "nested_search");
}

TEST_CASE("seed determines Monte Carlo output") {
  const std::vector<std::string> base = {"dist", "--n", "50", "--k", "5", "--tau", "1",
                                         "--monte-carlo", "--mc-samples", "2000"};
  auto with_seed = [&](const char* seed) {
    auto args = base;
    args.insert(args.end(), {"--seed", seed});
    return run(args);
  };
  const auto a = with_seed("3"), b = with_seed("3"), c = with_seed("4");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
  const auto rows = parse_csv(a.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[2][5] == "monte_carlo");
}

TEST_CASE("spec files") {
  const auto path = scratch_dir() / "block.json";
  write_file(path, R"({"kind": "block_l12", "n": 20, "block_size": 2,
                       "support": [1], "signs": [[0.6, 0.8]]})");
  const auto r = run({"tune", "--spec", path.string(), "--m", "15", "--mc-samples", "2000"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out).contains("lambda_best"));

  CHECK(run({"tune", "--spec", path.string(), "--n", "20", "--m", "15"}).code == 2);
  CHECK(run({"tune", "--spec", (scratch_dir() / "missing.json").string(), "--m", "15"}).code ==
        2);
  const auto broken = scratch_dir() / "broken.json";
  write_file(broken, "{not json");
  CHECK(run({"tune", "--spec", broken.string(), "--m", "15"}).code == 2);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"tune", "--n", "100", "--k", "10"}).code == 2);
  CHECK(run({"tune", "--n", "100", "--k", "10", "--m", "50", "--bogus"}).code == 2);
  CHECK(run({"tune", "--n", "100", "--k", "10", "--m", "50", "--format", "xml"}).code == 2);
  CHECK(run({"tune", "--n", "100", "--m", "50"}).code == 2);
  CHECK(run({"predict", "--n", "100", "--k", "10", "--m", "50", "--lambda", "-1"}).code == 2);
  CHECK(run({"tune", "--n", "100", "--k", "100", "--m", "50"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("domain errors") {
  CHECK(run({"tune", "--n", "100", "--k", "10", "--m", "5"}).code == 1);
  CHECK(run({"predict", "--n", "100", "--k", "10", "--m", "5", "--lambda", "1"}).code == 1);
  const auto g = run({"gordon", "--n", "100", "--k", "10", "--m", "5"});
  CHECK(g.code == 1);
  CHECK(g.err.find("below phase transition") != std::string::npos);
}

TEST_CASE("--out writes to a file") {
  const auto path = scratch_dir() / "tune.json";
  fs::remove(path);
  const auto r = run({"tune", "--n", "100", "--k", "10", "--m", "50", "--out", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(json::parse(slurp(path)).contains("eta_min"));
}

TEST_CASE("validate writes the summary CSV and sidecar") {
  const auto dir = scratch_dir();
  const auto cfg = dir / "config.json";
  const auto csv = dir / "summary.csv";
  fs::remove(csv);
  fs::remove(csv.string() + ".json");
  write_file(cfg, R"({"geometry": {"n": 40, "k": 4, "m": 30}, "sigma_grid": [0.1],
                      "lambda_grid": {"best_times": [0.5, 1, 2]}, "trials": 3})");
  const auto r = run({"validate", "--config", cfg.string(), "--out", csv.string()});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(slurp(csv));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"sigma", "lambda", "mean_nse", "stderr_nse",
                                            "eta_pred", "n_converged", "trials"});
  const auto side = json::parse(slurp(csv.string() + ".json"));
  for (const char* key : {"config", "lambda_best", "tau_best", "d_star", "version"}) {
    CHECK(side.contains(key));
  }
  CHECK(side == json::parse(r.out));
  CHECK(std::stod(rows[2][1]) == side["lambda_best"].get<double>());

  const auto to_stdout = run({"validate", "--config", cfg.string()});
  CHECK(to_stdout.out == slurp(csv));

  write_file(cfg, R"({"geometry": {"n": 40, "k": 4, "m": 30}, "sigma_grid": [],
                      "lambda_grid": [1]})");
  CHECK(run({"validate", "--config", cfg.string()}).code == 2);
}

TEST_CASE("binary exit codes") {
  CHECK(exit_status("tune --n 100 --k 10 --m 50") == 0);
  CHECK(exit_status("phase --n 1000 --m 100 --k 100") == 1);
  CHECK(exit_status("tune --n 100 --k 10 --m 50 --no-such-flag") == 2);
  CHECK(exit_status("") == 2);
}

}
