#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "hinv");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = hinv::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "hinv_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kConfigs = HINV_CONFIG_DIR;

}  // namespace

TEST_CASE("synth writes N+1 rows") {
  const auto out = scratch("series.csv");
  const auto r = run({"synth", "--config", kConfigs + "/model_k2.json", "--out", out.string()});
  REQUIRE(r.code == 0);
  const auto text = read(out);
  CHECK(std::count(text.begin(), text.end(), '\n') == 12);  // header + 11
}

TEST_CASE("invert produces k_detected") {
  const auto series = scratch("series2.csv");
  const auto result = scratch("result.json");
  REQUIRE(run({"synth", "--config", kConfigs + "/model_k2.json", "--out", series.string()}).code == 0);
  const auto r = run({"invert", "--series", series.string(), "--eta", "1e-7", "--out", result.string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(read(result));
  CHECK(j.at("k_detected") == 2);
  CHECK(j.contains("certainty"));
}

TEST_CASE("bound prints the ingredients") {
  const auto r = run({"bound", "--config", kConfigs + "/model_k2.json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("bound_total").get<double>() == doctest::Approx(742.73269220569147997).epsilon(1e-12));
  const auto a = run({"bound", "--config", kConfigs + "/model_k2.json", "--lambda-source", "analytic"});
  CHECK(nlohmann::json::parse(a.out).at("lambda_source") == "analytic");
  CHECK(run({"bound", "--config", kConfigs + "/model_k2.json", "--lambda-source", "guess"}).code == 1);
}

TEST_CASE("usage errors exit 1 and name the field") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"synth"}).code == 1);
  const auto bad = scratch("bad.json");
  write(bad, R"({"model": {"omegas": [0, 1], "amps": [0.5, 0.5]}, "grid": {"delta_t": -1, "n_steps": 4}})");
  const auto r = run({"synth", "--config", bad.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("grid") != std::string::npos);
  CHECK(run({"synth", "--config", "/nonexistent.json"}).code == 1);
}

TEST_CASE("numerical failure exits 2") {
  const auto series = scratch("series3.csv");
  REQUIRE(run({"synth", "--config", kConfigs + "/model_k2.json", "--out", series.string()}).code == 0);
  // A ceiling this large leaves no eigenvalue above the rank threshold.
  const auto r = run({"invert", "--series", series.string(), "--eta", "10"});
  CHECK(r.code == 2);
}

TEST_CASE("threshold failure exits 3") {
  const auto cfg = scratch("vander_fail.json");
  write(cfg, R"({"cases": [{"omegas": [0, 1, 2], "n_steps": 6}],
                 "sweep": {"parameter": "dt_dw_max", "values": [1.0]}})");
  CHECK(run({"check-vandermonde", "--config", cfg.string()}).code == 3);
}

TEST_CASE("experiment on the reference scenario") {
  const auto out = scratch("bv.csv");
  const auto r = run({"experiment", "--config", kConfigs + "/bound_validation.json", "--out", out.string(),
                      "--jobs", "4"});
  REQUIRE(r.code == 0);
  const auto summary = nlohmann::json::parse(read(scratch("bv.summary.json")));
  CHECK(summary.at("violation_rate").get<double>() <= 0.01);
  CHECK(summary.at("trials") == 1000);
}

TEST_CASE("inadmissible experiment needs --force") {
  const auto cfg = scratch("bv_hot.json");
  write(cfg, R"({"kind": "bound-validation", "model": {"omegas": [0, 1], "amps": [0.5, 0.5]},
                 "grid": {"delta_t": 1e-3, "n_steps": 10}, "noise": {"eta_max": 5e-6}, "trials": 10})");
  CHECK(run({"experiment", "--config", cfg.string()}).code == 1);
  CHECK(run({"experiment", "--config", cfg.string(), "--force"}).code != 1);
}

TEST_CASE("seed and trials overrides") {
  const auto a = run({"experiment", "--config", kConfigs + "/bound_validation.json", "--trials", "20", "--seed", "9"});
  const auto b = run({"experiment", "--config", kConfigs + "/bound_validation.json", "--trials", "20", "--seed", "9",
                      "--jobs", "3"});
  const auto c = run({"experiment", "--config", kConfigs + "/bound_validation.json", "--trials", "20", "--seed", "10"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
  CHECK(nlohmann::json::parse(a.out).at("trials") == 20);
}
