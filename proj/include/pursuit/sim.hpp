#pragma once

// Closed-loop forward-Euler integration of both games.  Headings are held
// constant over a step, so between replans each player runs a straight
// segment and capture crossings inside a step are located exactly.

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pursuit/atddg.hpp"
#include "pursuit/geometry.hpp"
#include "pursuit/two_cutters.hpp"

namespace pursuit::sim {

using Point2d = geometry::Point2<double>;
using two_cutters::DispersalChoice;

enum class Outcome {
  kCapturedByP1,
  kCapturedByP2,
  kSimultaneous,
  kAttackerIntercepted,
  kTargetCaptured,
  kTimeout,
};

const char* to_string(Outcome o);

struct DispersalPolicy {
  DispersalChoice evader = DispersalChoice::kFirst;
  DispersalChoice pursuers = DispersalChoice::kFirst;
};

struct SimConfig {
  double dt = 1e-3;
  double capture_radius = 1e-3;
  double max_time = 100.0;
  int replan_every = 1;
  DispersalPolicy dispersal_policy{};
  // Two-cutters only: the first plan pits the two lens corners against each
  // other (evader and pursuers each take their dispersal choice) even when
  // the corners are not equidistant.
  bool force_initial_split = false;
};

/// Throws kInvalidInput when the config is unusable for players moving at
/// up to `max_speed`.
void validate(const SimConfig& cfg, double max_speed);

/// Two-cutters samples hold (E, P1, P2); ATDDG samples hold (T, A, D).
struct Sample {
  double t;
  std::array<Point2d, 3> positions;
  std::array<double, 3> headings;
  std::string label;
};

struct Trajectory {
  std::vector<Sample> samples;
  Outcome outcome = Outcome::kTimeout;
  double terminal_time = 0.0;
};

struct PlanContext {
  std::size_t step;
  double t;
};

using TwoCuttersState = two_cutters::TwoCuttersState<double>;
using EvaderPolicy = std::function<double(const TwoCuttersState&, const PlanContext&)>;
using PursuerPolicy =
    std::function<std::pair<double, double>(const TwoCuttersState&, const PlanContext&)>;

EvaderPolicy optimal_evader(DispersalChoice choice = DispersalChoice::kFirst,
                            bool split_at_start = false);
PursuerPolicy optimal_pursuers(DispersalChoice choice = DispersalChoice::kFirst,
                               bool split_at_start = false);
EvaderPolicy constant_heading_evader(double phi);
PursuerPolicy constant_heading_pursuers(double psi1, double psi2);
PursuerPolicy pure_pursuit_pursuers();

Trajectory simulate_two_cutters(const TwoCuttersState& state, const SimConfig& cfg,
                                const EvaderPolicy& evader, const PursuerPolicy& pursuers);

/// Optimal play on both sides, dispersal handling taken from the config.
Trajectory simulate_two_cutters(const TwoCuttersState& state, const SimConfig& cfg);

using AtddgState = atddg::AtddgFullState<double>;
using AtddgPlayerPolicy = std::function<double(const AtddgState&, const PlanContext&)>;

struct AtddgPolicies {
  AtddgPlayerPolicy target;
  AtddgPlayerPolicy attacker;
  AtddgPlayerPolicy defender;
};

/// Saddle-point headings for all three players; throws kCaptureRegion when
/// replanning from a state the attacker wins.
AtddgPolicies optimal_atddg();
AtddgPlayerPolicy attacker_pure_pursuit();

Trajectory simulate_atddg(const AtddgState& state, const SimConfig& cfg,
                          const AtddgPolicies& policies);
Trajectory simulate_atddg(const AtddgState& state, const SimConfig& cfg);

/// |A - T| in the last sample of an ATDDG run.
double terminal_separation(const Trajectory& traj);

}  // namespace pursuit::sim
