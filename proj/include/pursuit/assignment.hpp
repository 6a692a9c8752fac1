#pragma once

// N pursuers against M evaders: every evader receives a team of one or two
// pursuers, each pursuer serves at most one evader, and the assignment that
// minimizes the capture time of the last evader wins.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pursuit/geometry.hpp"
#include "pursuit/two_cutters.hpp"

namespace pursuit::assignment {

using Point2d = geometry::Point2<double>;

struct Agent {
  Point2d position;
  double speed;
};

struct MultiAgentScenario {
  std::vector<Agent> pursuers;
  std::vector<Agent> evaders;
};

void validate(const MultiAgentScenario& scenario);

enum class ActiveCase { kOnlyFirst, kOnlySecond, kSimultaneous };

const char* to_string(ActiveCase c);

// Pursuer indices are 0-based and kept sorted.
using Team = std::vector<int>;

struct EngagementCell {
  Team team;
  int evader = 0;
  bool feasible = false;
  double capture_time = 0.0;  // real time units
  ActiveCase active_case = ActiveCase::kOnlyFirst;

  // 1-based pursuer number that makes the capture, or 0 for simultaneous.
  int capturing_pursuer() const;
  // "1".."N" or "s"
  std::string case_label() const;
};

EngagementCell engagement_value(const MultiAgentScenario& scenario, const Team& team, int evader,
                                const two_cutters::Tolerances<double>& tol = {});

/// Multiset of team sizes, one entry per evader; each entry is 1 or 2.
struct PartitionSpec {
  std::vector<int> sizes;
};

/// Throws kInfeasiblePartition naming the violated constraint.
void validate(const PartitionSpec& spec, std::size_t pursuers, std::size_t evaders);

/// An assignment lists the team of each evader in evader order.
using Assignment = std::vector<Team>;

/// Number of assignments `for_each_assignment` would visit.
double count_assignments(const PartitionSpec& spec, std::size_t pursuers);

/// Visits every assignment compatible with the partition exactly once, in
/// lexicographic order of (team of evader 0, team of evader 1, ...).
/// Returning false from the visitor stops the walk.
void for_each_assignment(const PartitionSpec& spec, std::size_t pursuers,
                         const std::function<bool(const Assignment&)>& visit);

std::vector<Assignment> enumerate_assignments(const MultiAgentScenario& scenario,
                                              const PartitionSpec& spec);

struct AssignmentOptions {
  double cap = 1e7;
  two_cutters::Tolerances<double> tolerances{};
};

struct AssignmentResult {
  Assignment assignment;
  double makespan = 0.0;
  std::vector<EngagementCell> assigned;  // one per evader
  std::vector<EngagementCell> cells;     // every cell evaluated, ordered by (team, evader)
  std::uint64_t assignments_considered = 0;
};

AssignmentResult optimal_assignment(const MultiAgentScenario& scenario, const PartitionSpec& spec,
                                    const AssignmentOptions& options = {});

/// Every cell for the given team sizes (1, 2, or both), ordered by (team, evader).
std::vector<EngagementCell> engagement_table(const MultiAgentScenario& scenario,
                                             const std::vector<int>& team_sizes,
                                             const two_cutters::Tolerances<double>& tol = {});

std::string format_team(const Team& team);

}  // namespace pursuit::assignment
