// End-to-end checks that drive the hbound binary and parse what it writes.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "hbound/bounds.hpp"
#include "hbound/json_io.hpp"

namespace {

using nlohmann::json;

struct CliResult {
  int exit_code = -1;
  json output;
};

std::string temp_path(const std::string& tag) {
  return std::string("cli_test_") + tag + ".json";
}

CliResult run_cli(const std::string& args, const std::string& tag) {
  const std::string path = temp_path(tag);
  const std::string command =
      std::string(HBOUND_CLI_PATH) + " " + args + " --format json --out " + path +
      " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WEXITSTATUS(status);
  std::ifstream file(path);
  if (file) {
    std::stringstream buffer;
    buffer << file.rdbuf();
    if (!buffer.str().empty()) result.output = json::parse(buffer.str());
  }
  std::remove(path.c_str());
  return result;
}

int run_cli_status(const std::string& args) {
  const std::string command =
      std::string(HBOUND_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  return WEXITSTATUS(std::system(command.c_str()));
}

}  // namespace

TEST_CASE("bound subcommand reproduces the worked example") {
  const CliResult result =
      run_cli("bound --mean-p 10 --var-p 100 --mean-q 3 --var-q 9", "bound1");
  REQUIRE(result.exit_code == 0);
  const json& report = result.output.at("results").at(0);
  CHECK(std::abs(report.at("hellinger_lb").get<double>() - 0.120) < 5e-4);
  CHECK(std::abs(report.at("comparison_lb").get<double>() - 0.092) < 5e-4);
  CHECK(report.at("bhattacharyya_ub").get<double>() ==
        1.0 - report.at("hellinger_lb").get<double>());
  CHECK(report.at("attainer").is_object());
}

TEST_CASE("recomputing values from emitted json reproduces them exactly") {
  const CliResult result =
      run_cli("bound --mean-p 10 --var-p 100 --mean-q 3 --var-q 9", "boundrt");
  REQUIRE(result.exit_code == 0);
  const auto spec = result.output.at("spec").get<hbound::MomentSpec>();
  const json& report = result.output.at("results").at(0);
  CHECK(hbound::hellinger_lower_bound(spec) == report.at("hellinger_lb").get<double>());
  CHECK(hbound::comparison_bound(spec) == report.at("comparison_lb").get<double>());
  const hbound::BinaryAttainer att = hbound::binary_attainer(spec);
  CHECK(att.r == report.at("attainer").at("r").get<double>());
  CHECK(att.u1 == report.at("attainer").at("u1").get<double>());
}

TEST_CASE("bound accepts sd flags and matches the variance route") {
  const CliResult via_var =
      run_cli("bound --mean-p 20 --var-p 30 --mean-q 10 --var-q 20", "boundv");
  const CliResult via_sd = run_cli(
      "bound --mean-p 20 --sd-p 5.477225575051661 --mean-q 10 --sd-q 4.47213595499958",
      "bounds");
  REQUIRE(via_var.exit_code == 0);
  REQUIRE(via_sd.exit_code == 0);
  const double a = via_var.output.at("results").at(0).at("hellinger_lb").get<double>();
  const double b = via_sd.output.at("results").at(0).at("hellinger_lb").get<double>();
  CHECK(std::abs(a - b) < 1e-15);
}

TEST_CASE("bound on equal means notes the unattained infimum") {
  const CliResult result =
      run_cli("bound --mean-p 1 --sd-p 2 --mean-q 1 --sd-q 3", "boundeq");
  REQUIRE(result.exit_code == 0);
  CHECK(result.output.at("results").at(0).at("hellinger_lb").get<double>() == 0.0);
  CHECK(result.output.at("summary").at("note").get<std::string>() ==
        "infimum, not attained");
  CHECK(result.output.at("results").at(0).at("attainer").is_null());
}

TEST_CASE("bound on two point masses") {
  const CliResult result =
      run_cli("bound --mean-p 0 --sd-p 0 --mean-q 1 --sd-q 0", "boundpm");
  REQUIRE(result.exit_code == 0);
  CHECK(result.output.at("results").at(0).at("hellinger_lb").get<double>() == 1.0);
}

TEST_CASE("input errors exit with code 2") {
  CHECK(run_cli_status("bound --mean-p 0 --mean-q 1 --sd-q 1") == 2);  // missing sd-p
  CHECK(run_cli_status("bound --mean-p 0 --sd-p 1 --var-p 1 --mean-q 1 --sd-q 1") ==
        2);  // mutually exclusive
  CHECK(run_cli_status("bound --mean-p 0 --sd-p -1 --mean-q 1 --sd-q 1") == 2);
  CHECK(run_cli_status("nonsense") == 2);
}

TEST_CASE("compare subcommand reproduces both worked examples") {
  const CliResult one =
      run_cli("compare --mean-p 10 --var-p 100 --mean-q 3 --var-q 9", "cmp1");
  REQUIRE(one.exit_code == 0);
  const json& row1 = one.output.at("results").at(0);
  CHECK(std::abs(row1.at("hellinger_lb").get<double>() - 0.120) < 5e-4);
  CHECK(std::abs(row1.at("comparison_lb").get<double>() - 0.092) < 5e-4);
  CHECK(std::abs(row1.at("gaussian_h2").get<double>() - 0.337) < 5e-4);
  CHECK(std::abs(row1.at("exponential_h2").get<double>() - 0.157) < 5e-4);
  CHECK(row1.at("gaussian_above_bounds").get<bool>());
  CHECK(row1.at("exponential_above_bounds").get<bool>());
  CHECK(row1.at("sandwich_ok").get<bool>());

  const CliResult two =
      run_cli("compare --mean-p 20 --var-p 30 --mean-q 10 --var-q 20", "cmp2");
  REQUIRE(two.exit_code == 0);
  const json& row2 = two.output.at("results").at(0);
  CHECK(std::abs(row2.at("hellinger_lb").get<double>() - 0.295) < 5e-4);
  CHECK(std::abs(row2.at("comparison_lb").get<double>() - 0.250) < 5e-4);
  CHECK(std::abs(row2.at("gaussian_h2").get<double>() - 0.400) < 5e-4);
  CHECK(std::abs(row2.at("exponential_h2").get<double>() - 0.636) < 5e-4);
}

TEST_CASE("compare with a degenerate sd reports n/a columns and exits 2") {
  const CliResult result =
      run_cli("compare --mean-p 0 --sd-p 0 --mean-q 1 --sd-q 1", "cmpdeg");
  CHECK(result.exit_code == 2);
  const json& row = result.output.at("results").at(0);
  CHECK(row.at("exponential_h2").is_null());
  CHECK(row.at("hellinger_lb").is_number());
}

TEST_CASE("verify subcommand finds no violations") {
  const CliResult result = run_cli(
      "verify --mean-p 0.5 --sd-p 1 --mean-q -0.5 --sd-q 1 --trials 50 --restarts 6 "
      "--points 6 --seed 7",
      "verify1");
  REQUIRE(result.exit_code == 0);
  const json& summary = result.output.at("summary");
  CHECK(summary.at("violation_count").get<int>() == 0);
  CHECK(summary.at("optimizer_converged").get<bool>());
  CHECK(summary.at("two_point_concentrated").get<bool>());
  CHECK(result.output.at("results").size() == 51);
}

TEST_CASE("verify with zero trials emits the optimizer record only") {
  const CliResult result = run_cli(
      "verify --mean-p 0 --sd-p 1 --mean-q 1 --sd-q 1 --trials 0 --restarts 10 --points 5 "
      "--seed 11",
      "verify0");
  REQUIRE(result.exit_code == 0);
  REQUIRE(result.output.at("results").size() == 1);
  const json& record = result.output.at("results").at(0);
  CHECK(record.at("kind").get<std::string>() == "optimized");
  CHECK(record.at("gap").get<double>() <= 1e-4);
}

TEST_CASE("verify on an equal-means spec reports zero bounds") {
  const CliResult result = run_cli(
      "verify --mean-p 1 --sd-p 1 --mean-q 1 --sd-q 2 --trials 10 --restarts 3 --points 6 "
      "--seed 3",
      "verifyeq");
  REQUIRE(result.exit_code == 0);
  for (const json& record : result.output.at("results")) {
    CHECK(record.at("bound").get<double>() == 0.0);
  }
}

TEST_CASE("sequence subcommand tabulates the vanishing construction") {
  const CliResult result =
      run_cli("sequence --var-p 9 --var-q 4 --j 10 --j 100 --j 1000", "seq1");
  REQUIRE(result.exit_code == 0);
  const json& rows = result.output.at("results");
  REQUIRE(rows.size() == 3);
  double previous = 1.0;
  for (const json& row : rows) {
    const double h2 = row.at("h2").get<double>();
    CHECK(std::abs(h2 - row.at("binary_h2").get<double>()) <= 1e-10);
    CHECK(h2 < previous);
    previous = h2;
  }
  CHECK(result.output.at("summary").at("equality_ok").get<bool>());
  CHECK(result.output.at("summary").at("monotone").get<bool>());
  // j = 100 row pins h2(8/300, 1/100)
  CHECK(rows.at(1).at("j").get<long>() == 100);
}

TEST_CASE("sequence with equal variances is identically zero") {
  const CliResult result = run_cli("sequence --var-p 4 --var-q 4 --j 10 --j 100", "seqeq");
  REQUIRE(result.exit_code == 0);
  for (const json& row : result.output.at("results")) {
    CHECK(row.at("h2").get<double>() == 0.0);
  }
}

TEST_CASE("sequence rejects out-of-range masses with exit 2") {
  CHECK(run_cli_status("sequence --var-p 9 --var-q 4 --j 2") == 2);
}

TEST_CASE("verify exits 3 when no restart can satisfy the constraints") {
  CHECK(run_cli_status("verify --mean-p 0 --sd-p 1 --mean-q 0 --sd-q 2 --points 2 "
                       "--trials 0 --restarts 3 --radius 50") == 3);
}

TEST_CASE("csv output carries the documented headers") {
  const std::string path = temp_path("csv");
  const std::string command = std::string(HBOUND_CLI_PATH) +
                              " bound --mean-p 10 --var-p 100 --mean-q 3 --var-q 9"
                              " --format csv --out " +
                              path + " > /dev/null 2>&1";
  REQUIRE(WEXITSTATUS(std::system(command.c_str())) == 0);
  std::ifstream file(path);
  std::string header, row;
  std::getline(file, header);
  std::getline(file, row);
  std::remove(path.c_str());
  CHECK(header ==
        "hellinger_lb,bhattacharyya_ub,comparison_lb,beta_min,beta_max,r,s,u1,u2");
  CHECK(row.substr(0, 7) == "0.11952");
}
