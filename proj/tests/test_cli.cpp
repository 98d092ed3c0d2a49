#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace {

using nlohmann::json;

const std::string kDir = "/tmp/secretprot_cli_test";

int run_cli(const std::string& args) {
  std::string cmd = std::string(CLI_BIN) + " " + args + " > " + kDir +
                    "/stdout.txt 2> " + kDir + "/stderr.txt";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_fixtures() {
  std::system(("mkdir -p " + kDir).c_str());
  std::ofstream manifest(kDir + "/data.jsonl");
  for (int i = 0; i < 12; ++i) {
    manifest << "{\"id\": \"e" << i << "\", \"secrets\": [";
    if (i < 8) manifest << "\"s0\"";
    if (i < 8 && i % 2 == 0) manifest << ", \"s1\"";
    if (i >= 8) manifest << "\"s1\"";
    manifest << "], \"payload\": [" << 0.1 * i << ", " << 1.0 - 0.05 * i
             << ", " << 0.3 * i << "]}\n";
  }
  std::ofstream secrets(kDir + "/secrets.json");
  secrets << R"([{"id": "s0", "p": 0.01, "r": 0.4},
                 {"id": "s1", "p": 0.01, "r": 0.6}])";
  std::ofstream config(kDir + "/config.json");
  config << R"({"batch_target": 1.5, "rounds": 10, "clip_norm": 1.0,
                "lp_constant": 1.0, "seed": 5, "drop_secretless": false})";
}

}  // namespace

TEST_CASE("cli workflow") {
  write_fixtures();
  const std::string io = " --dataset " + kDir + "/data.jsonl --secrets " +
                         kDir + "/secrets.json";

  SUBCASE("solve-lp writes weights and objective") {
    REQUIRE(run_cli("solve-lp" + io + " --c 100 --out " + kDir + "/lp.json") ==
            0);
    json lp = json::parse(slurp(kDir + "/lp.json"));
    CHECK(lp.at("weights").size() == 12);
    CHECK(lp.at("objective").get<double>() == doctest::Approx(12.0));
  }

  SUBCASE("calibrate then report round-trips, and tampering is caught") {
    REQUIRE(run_cli("calibrate" + io + " --config " + kDir +
                    "/config.json --out-plan " + kDir +
                    "/plan.json --out-report " + kDir + "/report.json") == 0);
    json plan = json::parse(slurp(kDir + "/plan.json"));
    CHECK(plan.at("sigma").get<double>() > 0.0);

    CHECK(run_cli("report --plan " + kDir + "/plan.json --report " + kDir +
                  "/report.json") == 0);

    json report = json::parse(slurp(kDir + "/report.json"));
    report["secrets"][0]["achieved_posterior"] = 0.99;
    std::ofstream(kDir + "/tampered.json") << report.dump();
    CHECK(run_cli("report --plan " + kDir + "/plan.json --report " + kDir +
                  "/tampered.json") == 1);
    CHECK(slurp(kDir + "/stdout.txt").find("VIOLATION") != std::string::npos);
  }

  SUBCASE("account recomputes guarantees from a plan") {
    REQUIRE(run_cli("calibrate" + io + " --config " + kDir +
                    "/config.json --out-plan " + kDir +
                    "/plan.json --out-report " + kDir + "/report.json") == 0);
    REQUIRE(run_cli("account" + io + " --plan " + kDir + "/plan.json --out " +
                    kDir + "/account.json") == 0);
    json acct = json::parse(slurp(kDir + "/account.json"));
    for (const auto& s : acct.at("secrets"))
      CHECK(s.at("achieved_kl").get<double>() <= s.at("mu").get<double>());
  }

  SUBCASE("train emits a trace and a loss csv") {
    REQUIRE(run_cli("calibrate" + io + " --config " + kDir +
                    "/config.json --out-plan " + kDir +
                    "/plan.json --out-report " + kDir + "/report.json") == 0);
    REQUIRE(run_cli("train" + io + " --config " + kDir + "/config.json" +
                    " --plan " + kDir + "/plan.json --model linreg --lr 0.1" +
                    " --seed 5 --out " + kDir + "/trace.json --losses " +
                    kDir + "/losses.csv") == 0);
    json trace = json::parse(slurp(kDir + "/trace.json"));
    CHECK(trace.at("batch_sizes").size() == 10);
    std::string csv = slurp(kDir + "/losses.csv");
    CHECK(csv.rfind("round,loss", 0) == 0);
  }

  SUBCASE("sweep rows are ordered and consistent with calibrate") {
    REQUIRE(run_cli("sweep" + io + " --config " + kDir +
                    "/config.json --c-values 0.25,4.0 --out " + kDir +
                    "/sweep.csv") == 0);
    std::string csv = slurp(kDir + "/sweep.csv");
    CHECK(csv.rfind("c,fraction_retained,sigma,noiseless_loss,noisy_loss", 0) ==
          0);
    // deterministic rerun produces byte-identical output
    REQUIRE(run_cli("sweep" + io + " --config " + kDir +
                    "/config.json --c-values 0.25,4.0 --out " + kDir +
                    "/sweep2.csv") == 0);
    CHECK(slurp(kDir + "/sweep2.csv") == csv);
  }

  SUBCASE("attack validates the bound") {
    CHECK(run_cli("attack --p 0.125 --r 0.5 --group 1.0 --T 2 --k 8 "
                  "--trials 20000 --seed 3 --out " +
                  kDir + "/attack.json") == 0);
    json res = json::parse(slurp(kDir + "/attack.json"));
    CHECK(res.at("empirical_success").get<double>() <=
          res.at("certified_bound").get<double>() +
              3.0 * res.at("stderr").get<double>());
  }

  SUBCASE("input errors exit with code 2") {
    CHECK(run_cli("calibrate --dataset /nonexistent --secrets " + kDir +
                  "/secrets.json --config " + kDir + "/config.json") == 2);
  }
}
