#pragma once

// Scenario files: one JSON document describing a game, its players and the
// settings of whichever command runs it.  See docs/scenario.schema.json.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pursuit/geometry.hpp"

namespace pursuit::scenario {

using Point2d = geometry::Point2<double>;

enum class Game { kTwoCutters, kAtddg, kMultiAgent };

const char* to_string(Game g);

struct AgentSpec {
  Point2d position = Point2d::Zero();
  double speed = 1.0;

  bool operator==(const AgentSpec&) const = default;
};

struct TolerancesSpec {
  double boundary_slack = 1e-12;
  double dispersal = 1e-9;

  bool operator==(const TolerancesSpec&) const = default;
};

enum class Choice { kFirst, kSecond };

struct SimSpec {
  double dt = 1e-3;
  double capture_radius = 1e-3;
  double max_time = 100.0;
  int replan_every = 1;
  Choice evader_dispersal = Choice::kFirst;
  Choice pursuer_dispersal = Choice::kFirst;
  bool force_initial_split = false;
  // "optimal" or "constant" (two-cutters evader), "optimal" or "pure_pursuit"
  // (two-cutters pursuers, ATDDG attacker).
  std::string evader_policy = "optimal";
  double evader_heading = 0.0;
  std::string pursuer_policy = "optimal";
  std::string attacker_policy = "optimal";

  bool operator==(const SimSpec&) const = default;
};

struct GridSpec {
  double x_min = -10.0;
  double x_max = 10.0;
  double y_min = -10.0;
  double y_max = 10.0;
  int nx = 50;
  int ny = 50;

  bool operator==(const GridSpec&) const = default;
};

enum class VerifyMode { kInterior, kBoundary, kCorruptBeta1 };

const char* to_string(VerifyMode m);

struct VerifySpec {
  VerifyMode mode = VerifyMode::kInterior;
  int samples = 10000;
  double threshold = 1e-6;
  double gradient_tolerance = 1e-5;
  double fd_step = 1e-6;
  double boundary_exclusion = 1e-3;
  double value_tolerance = 1e-9;
  double branch_gradient_tolerance = 1e-8;
  double beta_min = 1.05;
  double beta_max = 2.0;
  double position_bound = 10.0;

  bool operator==(const VerifySpec&) const = default;
};

struct AssignmentSpec {
  std::optional<std::vector<int>> team_sizes;
  double cap = 1e7;

  bool operator==(const AssignmentSpec&) const = default;
};

struct Scenario {
  Game game = Game::kTwoCutters;
  std::optional<std::string> name;

  // two_cutters: one evader and exactly two pursuers.  multi_agent: the
  // pursuers and evaders lists.
  std::optional<AgentSpec> evader;
  std::vector<AgentSpec> pursuers;
  std::vector<AgentSpec> evaders;

  // atddg
  std::optional<Point2d> target;
  std::optional<Point2d> attacker;
  std::optional<Point2d> defender;
  std::optional<double> alpha;

  std::optional<TolerancesSpec> tolerances;
  std::optional<SimSpec> sim;
  std::optional<GridSpec> grid;
  std::optional<VerifySpec> verify;
  std::optional<AssignmentSpec> assignment;
  std::optional<std::uint64_t> seed;

  bool operator==(const Scenario&) const = default;
};

/// Parses and validates a scenario.  Throws Error(kInvalidInput) whose
/// message names the offending field (or the line and column of a syntax
/// error).
Scenario parse(const std::string& text);
Scenario load(const std::string& path);

/// Canonical JSON text; parse(serialize(s)) == s.
std::string serialize(const Scenario& s);

}  // namespace pursuit::scenario
