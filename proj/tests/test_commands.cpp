#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "pursuit/commands.hpp"
#include "pursuit/error.hpp"

using namespace pursuit;
using namespace pursuit::commands;
using scenario::parse;
using nlohmann::json;

namespace {

Output run(const std::string& text, Command c, std::optional<Format> f = std::nullopt,
           std::optional<Precision> p = std::nullopt) {
  Options o;
  o.command = c;
  o.format = f;
  o.precision = p;
  return execute(parse(text), o);
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

const char* const kFig4 = R"({"game": "two_cutters",
  "pursuers": [{"position": [0, 3], "speed": 1.3}, {"position": [0, -3], "speed": 1.25}],
  "grid": {"x_min": -10, "x_max": 10, "y_min": -10, "y_max": 10, "nx": 50, "ny": 50}})";

}  // namespace

TEST_CASE("solve: two-cutters document") {
  const auto out = run(R"({"game": "two_cutters",
      "evader": {"position": [7, -3], "speed": 0.76},
      "pursuers": [{"position": [0.5, -3], "speed": 1.05}, {"position": [1.5, -7], "speed": 1.1}]})",
                       Command::kSolve);
  CHECK(out.exit_code == kExitOk);
  const auto doc = json::parse(out.document);
  CHECK(doc["region"] == "Rs");
  CHECK(doc["case"] == "s");
  CHECK(std::abs(doc["capture_time"].get<double>() - 19.97) <= 0.01);
  CHECK(std::abs(doc["hji_residual"].get<double>()) <= 1e-9);
  CHECK(doc["alternate_phi"].is_null());
}

TEST_CASE("solve: table precision rounds times to two decimals") {
  const auto text = R"({"game": "two_cutters",
      "evader": {"position": [8, 5], "speed": 0.98},
      "pursuers": [{"position": [3, 9], "speed": 1.3}, {"position": [1, 5], "speed": 1.18}]})";
  const auto doc = json::parse(run(text, Command::kSolve, Format::kJson, Precision::kTable).document);
  CHECK(doc["capture_time"].get<double>() == 20.01);
  const auto table = run(text, Command::kSolve, Format::kTable).document;
  const auto row = table.find("capture_time ");
  REQUIRE(row != std::string::npos);
  CHECK(table.substr(row, table.find('\n', row) - row).ends_with(" 20.01"));
  const auto full = json::parse(run(text, Command::kSolve).document);
  CHECK(full["capture_time"].get<double>() == doctest::Approx(std::sqrt(41.0) / (1.3 - 0.98)));
}

TEST_CASE("solve: collinear ATDDG state aims at the origin") {
  const auto doc = json::parse(run(R"({"game": "atddg", "target": [0.5, 0], "attacker": [2, 0],
      "defender": [-2, 0], "alpha": 0.5})", Command::kSolve).document);
  CHECK(doc["kind"] == "Re");
  CHECK(doc["aim_ordinate"].get<double>() == 0.0);
  CHECK(doc["payoff"].get<double>() == doctest::Approx(0.5));
  CHECK(doc["tf"].get<double>() == doctest::Approx(2.0));
}

TEST_CASE("solve: capture-region ATDDG state is rejected") {
  CHECK_THROWS_AS(run(R"({"game": "atddg", "target": [1.5, 0], "attacker": [2, 0],
      "defender": [-2, 0], "alpha": 0.5})", Command::kSolve), Error);
}

TEST_CASE("regions: labels, counts and captured grid points") {
  const auto out = run(kFig4, Command::kRegions);
  const auto rows = lines(out.document);
  REQUIRE(rows.size() == 2501);
  CHECK(rows[0] == "x,y,label");
  CHECK(out.notes.find("Rs: ") != std::string::npos);

  // Rs sits between the two single-capture regions along the pursuer axis.
  const auto doc = json::parse(run(kFig4, Command::kRegions, Format::kJson).document);
  std::string last;
  std::vector<std::string> sequence;
  for (const auto& cell : doc) {
    if (std::abs(cell["x"].get<double>() - 10.0) > 1e-12) continue;
    const std::string label = cell["label"];
    if (label != last) sequence.push_back(label);
    last = label;
  }
  CHECK(sequence == std::vector<std::string>{"R2", "Rs", "R1"});

  const auto strong = run(R"({"game": "two_cutters",
      "pursuers": [{"position": [0, 3], "speed": 1.3}, {"position": [0, -3], "speed": 100}],
      "grid": {"nx": 20, "ny": 20}})", Command::kRegions, Format::kJson);
  int r2 = 0, total = 0;
  for (const auto& cell : json::parse(strong.document)) {
    r2 += cell["label"] == "R2";
    ++total;
  }
  CHECK(r2 >= 0.95 * total);

  const auto hit = run(R"({"game": "two_cutters",
      "pursuers": [{"position": [0, 0], "speed": 1.3}, {"position": [5, 5], "speed": 1.25}],
      "grid": {"x_min": -5, "x_max": 5, "y_min": -5, "y_max": 5, "nx": 3, "ny": 3}})",
                       Command::kRegions);
  CHECK(hit.document.find("0,0,captured\n") != std::string::npos);
  CHECK(hit.document.find("5,5,captured\n") != std::string::npos);
}

TEST_CASE("assign: one-cell table and cap") {
  const auto one = run(R"({"game": "multi_agent", "pursuers": [{"position": [0, 0], "speed": 2}],
      "evaders": [{"position": [3, 4], "speed": 1}]})", Command::kAssign, Format::kCsv);
  const auto rows = lines(one.document);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1] == "1,E1,true,5,1,true");

  try {
    run(R"({"game": "multi_agent",
        "pursuers": [{"position": [0, 0], "speed": 2}, {"position": [1, 0], "speed": 2}],
        "evaders": [{"position": [3, 4], "speed": 1}, {"position": [9, 9], "speed": 1}],
        "assignment": {"team_sizes": [1, 1], "cap": 1}})", Command::kAssign);
    FAIL("expected cap error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kCapExceeded);
    CHECK(std::string(e.what()).find("cap of 1") != std::string::npos);
  }
}

TEST_CASE("assign: default team sizes search every mix") {
  // Two fast pursuers near E1 share it only if E2 can still be covered.
  const auto doc = json::parse(run(R"({"game": "multi_agent",
      "pursuers": [{"position": [-1, 0], "speed": 2}, {"position": [0, -1], "speed": 2},
                   {"position": [10, 0], "speed": 2}],
      "evaders": [{"position": [0, 0], "speed": 1}, {"position": [11, 0], "speed": 1}]})",
                                   Command::kAssign, Format::kJson).document);
  CHECK(doc["makespan"].get<double>() == doctest::Approx(1.0));
  CHECK(doc["assignments_considered"].get<int>() > 0);
}

TEST_CASE("verify: exit code follows the result") {
  const auto pass = run(R"({"game": "two_cutters", "verify": {"samples": 200}, "seed": 3})",
                        Command::kVerify);
  CHECK(pass.exit_code == kExitOk);
  CHECK(pass.document.find("result") != std::string::npos);
  const auto fail = run(R"({"game": "two_cutters", "verify": {"mode": "corrupt_beta1", "samples": 200}})",
                        Command::kVerify, Format::kCsv);
  CHECK(fail.exit_code == kExitVerificationFailed);
  CHECK(fail.notes.find("result: fail") != std::string::npos);
  CHECK(lines(fail.document).size() == 201);
}

TEST_CASE("simulate: empty run and policies") {
  const auto base = std::string(R"({"game": "two_cutters",
      "evader": {"position": [0, 0], "speed": 1}, "pursuers": [{"position": [-4, 0], "speed": 2},
      {"position": [30, 30], "speed": 1.5}], "sim": {"dt": 0.01, "capture_radius": 0.02, )");
  const auto empty = run(base + R"("max_time": 0}})", Command::kSimulate);
  CHECK(lines(empty.document).size() == 1);
  CHECK(empty.notes.find("outcome: timeout") != std::string::npos);

  const auto optimal = run(base + R"("max_time": 20}})", Command::kSimulate, Format::kJson);
  const auto doc = json::parse(optimal.document);
  CHECK(doc["outcome"] == "captured_by_P1");
  CHECK(std::abs(doc["terminal_time"].get<double>() - 4.0) <= 3 * 0.01 * 2);

  const auto pp = json::parse(
      run(base + R"("max_time": 20, "pursuer_policy": "pure_pursuit", "evader_policy": "constant",
          "evader_heading": 1.0}})", Command::kSimulate, Format::kJson).document);
  CHECK(pp["outcome"] != "timeout");
  CHECK(pp["terminal_time"].get<double>() <= 4.0 + 0.06);
}

TEST_CASE("run_command: exit codes and output routing") {
  std::ostringstream out, err;
  Options o;
  o.command = Command::kSolve;
  o.scenario_path = "/nonexistent.json";
  CHECK(run_command(o, out, err) == kExitInputError);
  CHECK(err.str().find("cannot open") != std::string::npos);
}
