#include "doctest.h"

#include "lrcs/config.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("lrcs_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// exit status of the CLI; stdout and stderr go to files in the scratch dir
int cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + LRCS_CLI_PATH + " " + args + " >" + (scratch() / "stdout").string() + " 2>" +
                          (scratch() / "stderr").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

const char* small_run = R"({
  "model": {"family": "gaussian", "sigma": 0.1},
  "methods": ["lr_weighted", "ay2011"],
  "environment": {"kind": "linear", "dim": 2, "n_actions": 6, "theta_norm": 0.8, "seed": 1},
  "B": 1.0,
  "horizon": 12,
  "seeds": {"base": 3, "count": 2}
})";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("run writes one row per seed, method and round") {
    const fs::path cfg = write_file("run.json", small_run);
    const fs::path out = scratch() / "run.csv";
    REQUIRE(cli("run --config " + cfg.string() + " --out " + out.string()) == 0);
    const std::string csv = slurp(out);
    CHECK(csv.rfind("seed,round,method,action,regret,cum_regret,threshold,weight,covered\n", 0) == 0);
    CHECK(count_lines(csv) == 1 + 2 * 2 * 12);
    CHECK(csv.find("\r") == std::string::npos);
    CHECK(csv.find('"') == std::string::npos);

    // identical config and seeds give identical bytes, also with more jobs
    const fs::path again = scratch() / "run_again.csv";
    REQUIRE(cli("run --config " + cfg.string() + " --out " + again.string() + " --jobs 3") == 0);
    CHECK(slurp(again) == csv);
  }

  TEST_CASE("bound columns on request") {
    const fs::path cfg = write_file("bounds.json", small_run);
    REQUIRE(cli("run --report-bounds --config " + cfg.string()) == 0);
    const std::string csv = slurp(scratch() / "stdout");
    CHECK(csv.rfind("seed,round,method,action,regret,cum_regret,threshold,weight,covered,bound_t4,bound_t6\n", 0) == 0);
    CHECK(count_lines(csv) == 1 + 2 * 2 * 12);
  }

  TEST_CASE("LRCS_SEED overrides the base seed") {
    const fs::path cfg = write_file("seeded.json", small_run);
    REQUIRE(cli("run --config " + cfg.string(), "LRCS_SEED=40") == 0);
    const std::string csv = slurp(scratch() / "stdout");
    CHECK(csv.find("\n40,1,lr_weighted,") != std::string::npos);
    CHECK(csv.find("\n41,12,ay2011,") != std::string::npos);
    CHECK(csv.find("\n3,1,") == std::string::npos);
    CHECK(cli("run --config " + cfg.string(), "LRCS_SEED=abc") == 2);
  }

  TEST_CASE("calibrate writes one row per method, alpha and scenario") {
    const fs::path cfg = write_file("cal.json", R"({
      "model": {"family": "gaussian", "sigma": 0.1},
      "methods": ["lr_weighted", "ay2011"],
      "B": 1.0,
      "calibration": {"runs": 5, "horizon": 4, "alphas": [0.1, 0.5],
                      "scenarios": ["iid_theta_zero", "adaptive_theta_random"]}
    })");
    const fs::path out = scratch() / "cal.csv";
    REQUIRE(cli("calibrate --config " + cfg.string() + " --out " + out.string()) == 0);
    const std::string csv = slurp(out);
    CHECK(csv.rfind("method,alpha,scenario,runs,covered_fraction\n", 0) == 0);
    CHECK(count_lines(csv) == 1 + 2 * 2 * 2);
    CHECK(csv.find("lr_weighted,0.5,adaptive_theta_random,5,") != std::string::npos);
  }

  TEST_CASE("config problems exit with code 2") {
    CHECK(cli("run --config " + (scratch() / "missing.json").string()) == 2);
    CHECK(slurp(scratch() / "stderr").find("missing.json") != std::string::npos);

    const fs::path zero_runs = write_file("zero.json", R"({"calibration": {"runs": 0}})");
    CHECK(cli("calibrate --config " + zero_runs.string()) == 2);
    CHECK(slurp(scratch() / "stderr").find("calibration.runs") != std::string::npos);

    const fs::path typo = write_file("typo.json", R"({"alpah": 0.1})");
    CHECK(cli("run --config " + typo.string()) == 2);
    CHECK(slurp(scratch() / "stderr").find("unknown config key 'alpah'") != std::string::npos);

    const fs::path nested = write_file("nested.json", R"({"model": {"family": "gaussian", "sigmaa": 1}})");
    CHECK(cli("run --config " + nested.string()) == 2);
    CHECK(slurp(scratch() / "stderr").find("model.sigmaa") != std::string::npos);

    const fs::path bad_alpha = write_file("alpha.json", R"({"alpha": 1.5})");
    CHECK(cli("run --config " + bad_alpha.string()) == 2);

    const fs::path not_json = write_file("broken.json", "{ horizon = 3 }");
    CHECK(cli("run --config " + not_json.string()) == 2);

    CHECK(cli("run") == 2);
    CHECK(cli("frobnicate") == 2);
  }

  TEST_CASE("selftest exit codes") {
    CHECK(cli("selftest") == 0);
    const std::string ok = slurp(scratch() / "stdout");
    CHECK(ok.find("FAIL") == std::string::npos);
    CHECK(ok.find("PASS exponential-family assembly") != std::string::npos);

    CHECK(cli("selftest --inject-fault wrong-sufficient-statistic") == 1);
    const std::string bad = slurp(scratch() / "stdout");
    CHECK(bad.find("FAIL exponential-family assembly") != std::string::npos);
  }

  TEST_CASE("shipped example configs parse") {
    for (const auto& entry : fs::directory_iterator(LRCS_CONFIG_DIR)) {
      CAPTURE(entry.path().string());
      CHECK_NOTHROW(lrcs::load_config(entry.path().string()));
    }
  }
}
