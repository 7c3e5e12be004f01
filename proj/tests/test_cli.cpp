#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "crnzero/cli.hpp"

namespace {

const std::string kData = CRNZERO_DATA_DIR;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  Result r;
  r.code = crnzero::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string data(const std::string& name) { return kData + "/" + name; }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("crnzero_test_" + name);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("validate the proofreading file") {
    const Result r = run({"validate", data("mckeithan_n2.crn")});
    CHECK(r.code == crnzero::cli::kOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["schema"] == 1);
    CHECK(j["report"]["overall"] == "pass");
    CHECK(j.contains("tolerances"));
  }

  TEST_CASE("validation failure exits 1") {
    const auto path = temp_file("reducible.crn");
    std::ofstream(path) << "species X Y\ncomplex a = X\ncomplex b = Y\nrate a -> b : 1\n";
    const Result r = run({"validate", path.string()});
    CHECK(r.code == crnzero::cli::kFailed);
    CHECK(nlohmann::json::parse(r.out)["report"]["overall"] == "fail");
    std::filesystem::remove(path);
  }

  TEST_CASE("boundary witness") {
    const Result r = run({"boundary", data("example24.crn"), "--class", "0.5,2"});
    CHECK(r.code == crnzero::cli::kOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["has_boundary_equilibria"] == true);
    CHECK(std::abs(j["witness"][0].get<double>()) < 1e-12);
    CHECK(std::abs(j["witness"][1].get<double>() - 2.0) < 1e-9);
  }

  TEST_CASE("equilibrium text and json") {
    const Result text = run({"equilibrium", data("example24.crn"), "--class", "0.5,2"});
    CHECK(text.code == crnzero::cli::kOk);
    CHECK(text.out.find("X1 = ") != std::string::npos);
    const Result r = run({"equilibrium", data("example24.crn"), "--class", "0.5,2", "--json"});
    CHECK(r.code == crnzero::cli::kOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["x_bar"][0].get<double>() - 1.0) < 1e-9);
    CHECK(std::abs(j["x_bar"][1].get<double>() - 2.0) < 1e-9);
    CHECK(j["tolerances"].contains("field_tol"));
  }

  TEST_CASE("class without positive points exits 1") {
    const Result r = run({"equilibrium", data("example24.crn"), "--class", "0.5,0"});
    CHECK(r.code == crnzero::cli::kFailed);
    CHECK_FALSE(r.err.empty());
  }

  TEST_CASE("simulate writes csv") {
    const Result r = run({"simulate", data("example24.crn"), "--x0", "0.5,2", "--t-end", "5", "--samples", "4"});
    CHECK(r.code == crnzero::cli::kOk);
    std::istringstream in(r.out);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,x_1,x_2,drift,V");
    int rows = 0;
    std::string line;
    std::string last;
    while (std::getline(in, line)) {
      ++rows;
      last = line;
    }
    CHECK(rows > 5);
    CHECK(last.rfind("5,", 0) == 0);

    const auto path = temp_file("traj.csv");
    const Result s = run({"simulate", data("example24.crn"), "--x0", "0.5,2", "--t-end", "5", "--out", path.string()});
    CHECK(s.code == crnzero::cli::kOk);
    const auto j = nlohmann::json::parse(s.out);
    CHECK(j["schema"] == 1);
    CHECK(std::filesystem::exists(path));
    std::filesystem::remove(path);
  }

  TEST_CASE("lyapunov certificate and its failure") {
    const Result ok = run({"lyapunov", data("example24.crn"), "--x0", "3,1", "--t-end", "100", "--probes", "1000"});
    CHECK(ok.code == crnzero::cli::kOk);
    const auto j = nlohmann::json::parse(ok.out);
    CHECK(j["pass"] == true);
    CHECK(std::abs(j["attraction_level"].get<double>() - 1.0) < 1e-9);
    const Result bad = run({"lyapunov", data("example24.crn"), "--x0", "0.1,1", "--t-end", "100", "--probes", "1000"});
    CHECK(bad.code == crnzero::cli::kFailed);
    CHECK(nlohmann::json::parse(bad.out)["pass"] == false);
  }

  TEST_CASE("kappa report") {
    const Result r = run({"kappa", data("example24.crn"), "--probes", "1000"});
    CHECK(r.code == crnzero::cli::kOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["kappa0"].get<double>() - 2.0) < 1e-12);
    CHECK(j["violations"] == 0);
  }

  TEST_CASE("output is deterministic") {
    const std::vector<std::string> a = {"kappa", data("mckeithan_n2.crn"), "--probes", "5000", "--seed", "3"};
    CHECK(run(a).out == run(a).out);
    const std::vector<std::string> b = {"lyapunov", data("mckeithan_n2.crn"), "--x0", "1,1,0,0,0",
                                        "--t-end", "20", "--probes", "2000"};
    CHECK(run(b).out == run(b).out);
    const std::vector<std::string> c = {"proofread", "--n", "2", "--k1", "1", "--kminus", "0.5,0.5,0.5",
                                        "--kp", "2,2", "--tstar", "1", "--mstar", "1", "--probes", "2000"};
    const Result rc = run(c);
    CHECK(rc.code == crnzero::cli::kOk);
    CHECK(rc.out == run(c).out);
  }

  TEST_CASE("proofread emits a parseable file") {
    const auto path = temp_file("chain.crn");
    const Result r = run({"proofread", "--n", "2", "--k1", "1", "--kminus", "0.5,0.5,0.5", "--kp", "2,2",
                          "--emit", path.string()});
    CHECK(r.code == crnzero::cli::kOk);
    const Result v = run({"validate", path.string()});
    CHECK(v.code == crnzero::cli::kOk);
    const Result v2 = run({"validate", data("mckeithan_n2.crn")});
    CHECK(nlohmann::json::parse(v.out)["report"] == nlohmann::json::parse(v2.out)["report"]);
    std::filesystem::remove(path);
  }

  TEST_CASE("usage errors exit 2") {
    CHECK(run({}).code == crnzero::cli::kUsage);
    CHECK(run({"frobnicate"}).code == crnzero::cli::kUsage);
    CHECK(run({"validate"}).code == crnzero::cli::kUsage);
    CHECK(run({"validate", data("no_such_file.crn")}).code == crnzero::cli::kUsage);
    CHECK(run({"equilibrium", data("example24.crn"), "--class", "1,2,3"}).code == crnzero::cli::kUsage);
    CHECK(run({"equilibrium", data("example24.crn"), "--class", "1,x"}).code == crnzero::cli::kUsage);
    CHECK(run({"simulate", data("example24.crn"), "--x0", "1,1", "--t-end", "-1"}).code == crnzero::cli::kUsage);
    CHECK(run({"proofread", "--n", "2", "--k1", "1", "--kminus", "1,1"}).code == crnzero::cli::kUsage);
  }

  TEST_CASE("parse errors report the line") {
    const auto path = temp_file("bad.crn");
    std::ofstream(path) << "species X\ncomplex a = X\ncomplex b = 0.5*X\n";
    const Result r = run({"validate", path.string()});
    CHECK(r.code == crnzero::cli::kUsage);
    CHECK(r.err.find("line 3") != std::string::npos);
    std::filesystem::remove(path);
  }

  TEST_CASE("help documents the grammar") {
    const Result r = run({"--help"});
    CHECK(r.code == crnzero::cli::kOk);
    CHECK(r.out.find(crnzero::cli::grammar_text()) != std::string::npos);
  }
}
