#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "aoi/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "aoi_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = aoi::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Runs the installed binary through the shell; returns the exit status.
int run_binary(const std::string& args, std::string* captured = nullptr) {
  const std::string cmd = std::string(AOI_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string text;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) text += buf;
  const int status = pclose(pipe);
  if (captured) *captured = text;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

// Row as column name -> cell.
std::map<std::string, std::string> record(const std::string& header, const std::string& row) {
  const auto h = split(header);
  const auto r = split(row);
  REQUIRE(h.size() == r.size());
  std::map<std::string, std::string> m;
  for (std::size_t i = 0; i < h.size(); ++i) m[h[i]] = r[i];
  return m;
}

double num(const std::map<std::string, std::string>& rec, const std::string& key) {
  REQUIRE(rec.count(key) == 1);
  return std::stod(rec.at(key));
}

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("aoi_cli_" + name); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("analytic: one point at the optimal exponents") {
  const auto r = run({"analytic", "--n", "1e6", "--h", "1"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == aoi::cli::kAnalyticHeader);
  const auto rec = record(ls[0], ls[1]);
  CHECK(num(rec, "delta") > 0.0);
  CHECK(num(rec, "a") == doctest::Approx(1.0 / 7.0).epsilon(1e-2));
  CHECK(num(rec, "predicted_exponent") == doctest::Approx(1.0 / 7.0).epsilon(1e-3));
  CHECK(num(rec, "session_mean") == doctest::Approx(num(rec, "phase1_mean") +
                                                     num(rec, "phase2_mean") +
                                                     num(rec, "phase3_mean")));
}

TEST_CASE("analytic rows follow the sweep order and leave a blank at depth 0") {
  const auto r = run({"analytic", "--n", "1e6,1e8", "--h", "0,1"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 5);
  const auto first = record(ls[0], ls[1]);
  CHECK(first.at("h") == "0");
  CHECK(first.at("a").empty());
  CHECK(record(ls[0], ls[2]).at("n") == "100000000");
  CHECK(record(ls[0], ls[3]).at("h") == "1");
  for (std::size_t i = 1; i < ls.size(); ++i) {
    for (const auto& cell : split(ls[i])) {
      if (cell.empty() || cell == "large-n" || cell == "exact") continue;
      CHECK(std::isfinite(std::stod(cell)));
    }
  }
}

TEST_CASE("sweep slope fits recover the scaling exponents") {
  const auto fits = temp_file("fits.csv");
  const auto r = run({"sweep", "--h", "0,1", "--n", "1e6,1e7,1e8,1e9,1e10,1e11,1e12", "--fit-out",
                      fits.string()});
  REQUIRE(r.code == 0);
  const auto ls = lines(slurp(fits));
  REQUIRE(ls.size() == 3);
  CHECK(ls[0] == aoi::cli::kFitHeader);
  const auto h0 = record(ls[0], ls[1]);
  const auto h1 = record(ls[0], ls[2]);
  CHECK(std::abs(num(h0, "slope") - 0.25) <= 0.02);
  CHECK(std::abs(num(h1, "slope") - 1.0 / 7.0) <= 0.02);
  CHECK(num(h1, "r_squared") > 0.99);
  CHECK(num(h1, "points") == 7);
  fs::remove(fits);

  // The same fit through the library.
  aoi::cli::SweepSpec spec;
  spec.n_values = {1e6, 1e8, 1e10, 1e12};
  spec.h_values = {0, 1};
  const auto direct = aoi::cli::fit_slopes(spec, false);
  REQUIRE(direct.size() == 2);
  CHECK(std::abs(direct[0].fit.slope - 0.25) <= 0.02);
  CHECK(std::abs(direct[1].fit.slope - 1.0 / 7.0) <= 0.02);
}

TEST_CASE("simulate: Phase II column at the worked plan") {
  const auto r = run({"simulate", "--n", "16", "--h", "0", "--b", "0.5", "--trials", "100000",
                      "--seed", "3"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == aoi::cli::kSimulateHeader);
  const auto rec = record(ls[0], ls[1]);
  const double m = num(rec, "phase2_mean");
  const double se = std::sqrt((num(rec, "phase2_second_moment") - m * m) / 1e5);
  CHECK(std::abs(m - 25.0 / 48.0) <= 4.0 * se);
  CHECK(num(rec, "analytic_phase2_mean") == doctest::Approx(25.0 / 48.0));
  CHECK(num(rec, "cells") == 4);
}

TEST_CASE("simulate: analytic age inside the empirical interval") {
  const auto r = run({"simulate", "--n", "4096", "--h", "1", "--a", "0.142857142857", "--b",
                      "0.285714285714", "--trials", "100000", "--seed", "2"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  const auto rec = record(ls[0], ls[1]);
  CHECK(std::abs(num(rec, "analytic_age") - num(rec, "age")) <= num(rec, "age_ci_half_width"));
}

TEST_CASE("simulate output is byte-identical across invocations") {
  const std::vector<std::string> args = {"simulate", "--n", "2000", "--h", "1", "--trials", "500",
                                         "--seed", "9", "--variant", "exact"};
  const auto a = run(args);
  const auto b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  auto other = args;
  other[8] = "10";
  CHECK(run(other).out != a.out);
}

TEST_CASE("optimize rows") {
  const auto r = run({"optimize", "--h", "0,1,2", "--lambda0", "10", "--lambda2", "0.1"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 4);
  CHECK(ls[0] == aoi::cli::kOptimizeHeader);
  const auto h0 = record(ls[0], ls[1]);
  CHECK(h0.at("a").empty());
  CHECK(num(h0, "b") == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(num(h0, "exponent") == doctest::Approx(0.25).epsilon(1e-3));
  const auto h1 = record(ls[0], ls[2]);
  CHECK(std::abs(num(h1, "a") - 1.0 / 7.0) < 0.01);
  CHECK(std::abs(num(h1, "b") - 2.0 / 7.0) < 0.01);
  CHECK(std::abs(num(h1, "exponent") - 1.0 / 7.0) < 0.01);
  CHECK(std::abs(num(record(ls[0], ls[3]), "exponent") - 1.0 / 13.0) < 0.01);
}

TEST_CASE("validate-tdma verdicts") {
  auto r = run({"validate-tdma", "--grid", "6", "--gamma", "0.41"});
  REQUIRE(r.code == 0);
  CHECK(r.err.find("PASS") != std::string::npos);
  auto ls = lines(r.out);
  CHECK(ls[0] == aoi::cli::kTdmaHeader);
  CHECK(ls.size() == 10);
  for (std::size_t i = 1; i < ls.size(); ++i) CHECK(record(ls[0], ls[i]).at("verdict") == "PASS");

  const auto viol = temp_file("violations.csv");
  r = run({"validate-tdma", "--grid", "6", "--gamma", "10", "--violations", viol.string()});
  CHECK(r.code == 0);
  CHECK(r.err.find("FAIL") != std::string::npos);
  ls = lines(r.out);
  CHECK(record(ls[0], ls[1]).at("verdict") == "FAIL");
  CHECK(num(record(ls[0], ls[1]), "violations") > 0);
  CHECK(lines(slurp(viol)).size() > 1);
  fs::remove(viol);

  r = run({"validate-tdma", "--grid", "1"});
  CHECK(r.code == 0);
  CHECK(r.err.find("PASS") != std::string::npos);

  r = run({"validate-tdma", "--grid", "6", "--actual", "--nodes", "3000", "--seed", "4"});
  CHECK(r.code == 0);
  CHECK(r.err.find("PASS") != std::string::npos);
}

TEST_CASE("JSON config with command-line overrides") {
  const auto cfg = temp_file("config.json");
  {
    std::ofstream f(cfg);
    f << R"({"n": [4096], "h": 1, "mode": "fixed", "a": 0.15, "b": 0.3,
             "lambda0": 2, "trials": 300, "seed": 4, "variant": "exact"})";
  }
  const auto from_file = run({"simulate", "--config", cfg.string()});
  REQUIRE(from_file.code == 0);
  const auto rec = record(lines(from_file.out)[0], lines(from_file.out)[1]);
  CHECK(num(rec, "a") == doctest::Approx(0.15));
  CHECK(rec.at("variant") == "exact");
  CHECK(num(rec, "trials") == 300);
  const auto same = run({"simulate", "--n", "4096", "--h", "1", "--a", "0.15", "--b", "0.3",
                         "--lambda0", "2", "--trials", "300", "--seed", "4", "--variant", "exact"});
  CHECK(same.out == from_file.out);

  const auto overridden = run({"simulate", "--config", cfg.string(), "--seed", "5"});
  REQUIRE(overridden.code == 0);
  CHECK(num(record(lines(overridden.out)[0], lines(overridden.out)[1]), "seed") == 5);

  {
    std::ofstream f(cfg);
    f << R"({"n": 4096, "colour": "blue"})";
  }
  CHECK(run({"analytic", "--config", cfg.string()}).code == aoi::cli::kInvalidConfig);
  {
    std::ofstream f(cfg);
    f << "{ not json";
  }
  CHECK(run({"analytic", "--config", cfg.string()}).code == aoi::cli::kInvalidConfig);
  fs::remove(cfg);
}

TEST_CASE("output path") {
  const auto path = temp_file("out.csv");
  const auto r = run({"analytic", "--n", "1e6", "--out", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  CHECK(lines(slurp(path)).size() == 2);
  fs::remove(path);
}

TEST_CASE("invalid configurations exit with code 2") {
  using aoi::cli::kInvalidConfig;
  CHECK(run({"analytic", "--h", "-1"}).code == kInvalidConfig);
  CHECK(run({"analytic", "--h", "2"}).code == kInvalidConfig);
  CHECK(run({"analytic", "--n", "0"}).code == kInvalidConfig);
  CHECK(run({"analytic", "--a", "0.3", "--b", "0.2"}).code == kInvalidConfig);
  CHECK(run({"analytic", "--lambda1", "-1"}).code == kInvalidConfig);
  CHECK(run({"analytic", "--mode", "sideways"}).code == kInvalidConfig);
  CHECK(run({"simulate", "--n", "4096", "--trials", "50"}).code == kInvalidConfig);
  CHECK(run({"simulate", "--n", "1e6", "--h", "2"}).code == kInvalidConfig);
  CHECK(run({"nonsense"}).code == kInvalidConfig);
  CHECK(run({}).code == kInvalidConfig);
}

TEST_CASE("non-finite results exit with code 3") {
  const auto r = run({"analytic", "--n", "1e6", "--lambda0", "1e-320"});
  CHECK(r.code == aoi::cli::kNumericFailure);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("binary: exit codes and the seed environment fallback") {
  std::string text;
  CHECK(run_binary("optimize --h 1", &text) == 0);
  CHECK(lines(text).size() == 2);
  CHECK(run_binary("analytic --h -3") == 2);
  CHECK(run_binary("analytic --n 1e6 --lambda0 1e-320") == 3);

  std::string explicit_seed;
  std::string env_seed;
  std::string default_seed;
  REQUIRE(run_binary("simulate --n 3000 --trials 200 --seed 17", &explicit_seed) == 0);
  REQUIRE(run_binary("simulate --n 3000 --trials 200", &default_seed) == 0);
  ::setenv("AOI_SEED", "17", 1);
  REQUIRE(run_binary("simulate --n 3000 --trials 200", &env_seed) == 0);
  std::string flag_wins;
  REQUIRE(run_binary("simulate --n 3000 --trials 200 --seed 1", &flag_wins) == 0);
  ::setenv("AOI_SEED", "not-a-number", 1);
  CHECK(run_binary("simulate --n 3000 --trials 200") == 2);
  ::unsetenv("AOI_SEED");
  CHECK(env_seed == explicit_seed);
  CHECK(default_seed != explicit_seed);
  CHECK(flag_wins == default_seed);
}
