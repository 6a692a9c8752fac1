#include "pursuit/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace pursuit::assignment {

namespace {

void require_agent(const Agent& a, const std::string& what) {
  geometry::require_finite(a.position, what.c_str());
  if (!(a.speed > 0.0) || !std::isfinite(a.speed)) {
    throw Error(ErrorCode::kInvalidInput, what + " speed must be positive and finite");
  }
}

void require_team(const MultiAgentScenario& scenario, const Team& team, int evader) {
  if (team.empty() || team.size() > 2) {
    throw Error(ErrorCode::kInvalidInput, "teams have one or two pursuers");
  }
  for (int p : team) {
    if (p < 0 || static_cast<std::size_t>(p) >= scenario.pursuers.size()) {
      throw Error(ErrorCode::kInvalidInput, "pursuer index " + std::to_string(p) + " out of range");
    }
  }
  if (team.size() == 2 && team[0] == team[1]) {
    throw Error(ErrorCode::kInvalidInput, "a team lists the same pursuer twice");
  }
  if (evader < 0 || static_cast<std::size_t>(evader) >= scenario.evaders.size()) {
    throw Error(ErrorCode::kInvalidInput, "evader index " + std::to_string(evader) + " out of range");
  }
}

void walk(std::size_t evader, std::size_t evaders, int ones, int twos, std::vector<bool>& used,
          Assignment& current, const std::function<bool(const Assignment&)>& visit, bool& stop) {
  if (stop) return;
  if (evader == evaders) {
    if (!visit(current)) stop = true;
    return;
  }
  const int n = static_cast<int>(used.size());
  for (int a = 0; a < n && !stop; ++a) {
    if (used[a]) continue;
    used[a] = true;
    if (ones > 0) {
      current[evader] = {a};
      walk(evader + 1, evaders, ones - 1, twos, used, current, visit, stop);
    }
    if (twos > 0) {
      for (int b = a + 1; b < n && !stop; ++b) {
        if (used[b]) continue;
        used[b] = true;
        current[evader] = {a, b};
        walk(evader + 1, evaders, ones, twos - 1, used, current, visit, stop);
        used[b] = false;
      }
    }
    used[a] = false;
  }
}

}  // namespace

void validate(const MultiAgentScenario& scenario) {
  if (scenario.pursuers.empty()) throw Error(ErrorCode::kInvalidInput, "no pursuers");
  if (scenario.evaders.empty()) throw Error(ErrorCode::kInvalidInput, "no evaders");
  for (std::size_t i = 0; i < scenario.pursuers.size(); ++i) {
    require_agent(scenario.pursuers[i], "pursuers[" + std::to_string(i) + "]");
  }
  for (std::size_t i = 0; i < scenario.evaders.size(); ++i) {
    require_agent(scenario.evaders[i], "evaders[" + std::to_string(i) + "]");
  }
}

const char* to_string(ActiveCase c) {
  switch (c) {
    case ActiveCase::kOnlyFirst: return "only_first";
    case ActiveCase::kOnlySecond: return "only_second";
    case ActiveCase::kSimultaneous: return "simultaneous";
  }
  return "?";
}

int EngagementCell::capturing_pursuer() const {
  switch (active_case) {
    case ActiveCase::kOnlyFirst: return team.front() + 1;
    case ActiveCase::kOnlySecond: return team.back() + 1;
    case ActiveCase::kSimultaneous: return 0;
  }
  return 0;
}

std::string EngagementCell::case_label() const {
  const int p = capturing_pursuer();
  return p == 0 ? std::string("s") : std::to_string(p);
}

EngagementCell engagement_value(const MultiAgentScenario& scenario, const Team& team, int evader,
                                const two_cutters::Tolerances<double>& tol) {
  require_team(scenario, team, evader);
  EngagementCell cell;
  cell.team = team;
  std::sort(cell.team.begin(), cell.team.end());
  cell.evader = evader;

  const Agent& e = scenario.evaders[evader];
  for (int p : cell.team) {
    if (!(scenario.pursuers[p].speed > e.speed)) return cell;
  }
  cell.feasible = true;

  if (cell.team.size() == 1) {
    const Agent& p = scenario.pursuers[cell.team[0]];
    cell.capture_time =
        two_cutters::one_on_one_capture_time(e.position, p.position, p.speed / e.speed, e.speed);
    cell.active_case = ActiveCase::kOnlyFirst;
    return cell;
  }

  const Agent& p1 = scenario.pursuers[cell.team[0]];
  const Agent& p2 = scenario.pursuers[cell.team[1]];
  const auto state = two_cutters::TwoCuttersState<double>::from_speeds(
      e.position, e.speed, p1.position, p1.speed, p2.position, p2.speed);
  two_cutters::SolveOptions<double> opt;
  opt.tolerances = tol;
  const auto sol = two_cutters::solve(state, opt);
  cell.capture_time = sol.capture_time;
  switch (sol.region) {
    case two_cutters::Region::kR1: cell.active_case = ActiveCase::kOnlyFirst; break;
    case two_cutters::Region::kR2: cell.active_case = ActiveCase::kOnlySecond; break;
    default: cell.active_case = ActiveCase::kSimultaneous; break;
  }
  return cell;
}

void validate(const PartitionSpec& spec, std::size_t pursuers, std::size_t evaders) {
  if (spec.sizes.size() != evaders) {
    throw Error(ErrorCode::kInfeasiblePartition,
                "team_sizes lists " + std::to_string(spec.sizes.size()) + " teams for " +
                    std::to_string(evaders) + " evaders");
  }
  std::size_t total = 0;
  for (int s : spec.sizes) {
    if (s != 1 && s != 2) {
      throw Error(ErrorCode::kInfeasiblePartition, "team sizes must be 1 or 2, got " + std::to_string(s));
    }
    total += static_cast<std::size_t>(s);
  }
  if (total > pursuers) {
    throw Error(ErrorCode::kInfeasiblePartition,
                "teams need " + std::to_string(total) + " pursuers but only " +
                    std::to_string(pursuers) + " are available");
  }
}

double count_assignments(const PartitionSpec& spec, std::size_t pursuers) {
  const auto m = static_cast<double>(spec.sizes.size());
  const double twos = static_cast<double>(std::count(spec.sizes.begin(), spec.sizes.end(), 2));
  const double ones = m - twos;
  double total = 0.0;
  for (int s : spec.sizes) total += s;
  const double n = static_cast<double>(pursuers);
  if (total > n) return 0.0;
  // Distinct size orderings times ordered team draws, with pair members unordered.
  const double log_count = std::lgamma(m + 1) - std::lgamma(ones + 1) - std::lgamma(twos + 1) +
                           std::lgamma(n + 1) - std::lgamma(n - total + 1) - twos * std::log(2.0);
  return std::round(std::exp(log_count));
}

void for_each_assignment(const PartitionSpec& spec, std::size_t pursuers,
                         const std::function<bool(const Assignment&)>& visit) {
  validate(spec, pursuers, spec.sizes.size());
  const int twos = static_cast<int>(std::count(spec.sizes.begin(), spec.sizes.end(), 2));
  const int ones = static_cast<int>(spec.sizes.size()) - twos;
  std::vector<bool> used(pursuers, false);
  Assignment current(spec.sizes.size());
  bool stop = false;
  walk(0, spec.sizes.size(), ones, twos, used, current, visit, stop);
}

std::vector<Assignment> enumerate_assignments(const MultiAgentScenario& scenario,
                                              const PartitionSpec& spec) {
  validate(scenario);
  validate(spec, scenario.pursuers.size(), scenario.evaders.size());
  std::vector<Assignment> out;
  for_each_assignment(spec, scenario.pursuers.size(), [&](const Assignment& a) {
    out.push_back(a);
    return true;
  });
  return out;
}

AssignmentResult optimal_assignment(const MultiAgentScenario& scenario, const PartitionSpec& spec,
                                    const AssignmentOptions& options) {
  validate(scenario);
  validate(spec, scenario.pursuers.size(), scenario.evaders.size());
  const double count = count_assignments(spec, scenario.pursuers.size());
  if (count > options.cap) {
    std::ostringstream msg;
    msg << count << " assignments exceed the cap of " << options.cap;
    throw Error(ErrorCode::kCapExceeded, msg.str());
  }

  std::map<std::pair<Team, int>, EngagementCell> cache;
  const auto cell_for = [&](const Team& team, int evader) -> const EngagementCell& {
    auto key = std::make_pair(team, evader);
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(std::move(key), engagement_value(scenario, team, evader, options.tolerances))
               .first;
    }
    return it->second;
  };

  AssignmentResult result;
  result.makespan = std::numeric_limits<double>::infinity();
  bool found = false;
  for_each_assignment(spec, scenario.pursuers.size(), [&](const Assignment& a) {
    ++result.assignments_considered;
    double makespan = 0.0;
    for (std::size_t e = 0; e < a.size(); ++e) {
      const auto& cell = cell_for(a[e], static_cast<int>(e));
      if (!cell.feasible) return true;
      makespan = std::max(makespan, cell.capture_time);
    }
    // Strict comparison keeps the lexicographically first of equal makespans.
    if (!found || makespan < result.makespan) {
      found = true;
      result.makespan = makespan;
      result.assignment = a;
    }
    return true;
  });

  if (!found) {
    std::string uncovered;
    for (std::size_t e = 0; e < scenario.evaders.size(); ++e) {
      bool coverable = false;
      for (const auto& [key, cell] : cache) {
        if (key.second == static_cast<int>(e) && cell.feasible) coverable = true;
      }
      if (!coverable) uncovered += (uncovered.empty() ? "E" : ", E") + std::to_string(e + 1);
    }
    throw Error(ErrorCode::kUncoverableEvader,
                uncovered.empty() ? std::string("no assignment covers every evader with faster pursuers")
                                  : "no feasible team for " + uncovered);
  }

  for (std::size_t e = 0; e < result.assignment.size(); ++e) {
    result.assigned.push_back(cell_for(result.assignment[e], static_cast<int>(e)));
  }
  for (const auto& [key, cell] : cache) result.cells.push_back(cell);
  return result;
}

std::vector<EngagementCell> engagement_table(const MultiAgentScenario& scenario,
                                             const std::vector<int>& team_sizes,
                                             const two_cutters::Tolerances<double>& tol) {
  validate(scenario);
  const int n = static_cast<int>(scenario.pursuers.size());
  const int m = static_cast<int>(scenario.evaders.size());
  const bool singles = std::find(team_sizes.begin(), team_sizes.end(), 1) != team_sizes.end();
  const bool pairs = std::find(team_sizes.begin(), team_sizes.end(), 2) != team_sizes.end();
  std::vector<EngagementCell> cells;
  for (int a = 0; a < n; ++a) {
    if (singles) {
      for (int e = 0; e < m; ++e) cells.push_back(engagement_value(scenario, {a}, e, tol));
    }
    if (pairs) {
      for (int b = a + 1; b < n; ++b) {
        for (int e = 0; e < m; ++e) cells.push_back(engagement_value(scenario, {a, b}, e, tol));
      }
    }
  }
  return cells;
}

std::string format_team(const Team& team) {
  std::string out;
  for (std::size_t i = 0; i < team.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(team[i] + 1);
  }
  return out;
}

}  // namespace pursuit::assignment
