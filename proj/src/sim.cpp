#include "pursuit/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>

namespace pursuit::sim {

namespace {

using two_cutters::Region;

// Earliest s in [0, horizon] with |rel + s*vel| = radius, given |rel| > radius.
std::optional<double> first_crossing(const Point2d& rel, const Point2d& vel, double radius,
                                     double horizon) {
  const double a = vel.squaredNorm();
  if (a == 0.0) return std::nullopt;
  const double b = 2.0 * rel.dot(vel);
  const double c = rel.squaredNorm() - radius * radius;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0 || b >= 0.0) return std::nullopt;
  // Smaller root, written to avoid cancellation.
  const double s = (2.0 * c) / (-b + std::sqrt(disc));
  if (s < 0.0 || s > horizon) return std::nullopt;
  return s;
}

struct ClosestApproach {
  double time;  // relative to now; may be negative
  double distance;
};

ClosestApproach closest_approach(const Point2d& rel, const Point2d& vel) {
  const double a = vel.squaredNorm();
  const double tau = a > 0.0 ? -rel.dot(vel) / a : 0.0;
  return {tau, (rel + tau * vel).norm()};
}

void require_heading(double h, std::size_t sample, const char* who) {
  if (!std::isfinite(h)) {
    throw Error(ErrorCode::kNonFiniteHeading,
                std::string(who) + " policy returned a non-finite heading at sample " +
                    std::to_string(sample));
  }
}

double grid_time(std::size_t step, double dt, double max_time) {
  return std::min(max_time, static_cast<double>(step) * dt);
}

std::string region_label(const TwoCuttersState& s) {
  if (s.evader == s.pursuer1 || s.evader == s.pursuer2) return "captured";
  return two_cutters::to_string(two_cutters::classify_region(s));
}

std::string kind_label(const AtddgState& s) {
  try {
    return atddg::to_string(atddg::classify_kind(atddg::to_reduced_frame(s).state));
  } catch (const Error&) {
    return "undefined";
  }
}

std::optional<two_cutters::Point2<double>> split_aimpoint(const TwoCuttersState& s,
                                                          DispersalChoice choice) {
  const Region region = two_cutters::classify_region(s);
  if (region != Region::kRs && region != Region::kDispersal) return std::nullopt;
  const auto cand = two_cutters::dispersal_candidates(s);
  return cand.candidates[choice == DispersalChoice::kFirst ? 0 : 1].aimpoint;
}

two_cutters::Solution2P1E<double> solve_with(const TwoCuttersState& s, DispersalChoice choice) {
  two_cutters::SolveOptions<double> opt;
  opt.dispersal_primary = choice;
  return two_cutters::solve(s, opt);
}

}  // namespace

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::kCapturedByP1: return "captured_by_P1";
    case Outcome::kCapturedByP2: return "captured_by_P2";
    case Outcome::kSimultaneous: return "simultaneous";
    case Outcome::kAttackerIntercepted: return "attacker_intercepted";
    case Outcome::kTargetCaptured: return "target_captured";
    case Outcome::kTimeout: return "timeout";
  }
  return "?";
}

void validate(const SimConfig& cfg, double max_speed) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
    throw Error(ErrorCode::kInvalidInput, "dt must be positive");
  }
  if (!(cfg.capture_radius > 0.0) || !std::isfinite(cfg.capture_radius)) {
    throw Error(ErrorCode::kInvalidInput, "capture_radius must be positive");
  }
  if (!(cfg.max_time >= 0.0) || !std::isfinite(cfg.max_time)) {
    throw Error(ErrorCode::kInvalidInput, "max_time must be non-negative");
  }
  if (cfg.replan_every < 1) throw Error(ErrorCode::kInvalidInput, "replan_every must be >= 1");
  if (cfg.dt * max_speed > cfg.capture_radius * (1.0 + 1e-12)) {
    throw Error(ErrorCode::kInvalidInput,
                "dt must not exceed capture_radius / max speed (" +
                    std::to_string(cfg.capture_radius / max_speed) + ")");
  }
}

EvaderPolicy optimal_evader(DispersalChoice choice, bool split_at_start) {
  return [choice, split_at_start](const TwoCuttersState& s, const PlanContext& ctx) {
    if (split_at_start && ctx.step == 0) {
      if (const auto aim = split_aimpoint(s, choice)) return geometry::heading_of<double>(*aim - s.evader);
    }
    return solve_with(s, choice).phi_star;
  };
}

PursuerPolicy optimal_pursuers(DispersalChoice choice, bool split_at_start) {
  return [choice, split_at_start](const TwoCuttersState& s, const PlanContext& ctx) {
    if (split_at_start && ctx.step == 0) {
      if (const auto aim = split_aimpoint(s, choice)) {
        return std::pair<double, double>{geometry::heading_of<double>(*aim - s.pursuer1),
                                         geometry::heading_of<double>(*aim - s.pursuer2)};
      }
    }
    const auto sol = solve_with(s, choice);
    return std::pair<double, double>{sol.psi1_star, sol.psi2_star};
  };
}

EvaderPolicy constant_heading_evader(double phi) {
  return [phi](const TwoCuttersState&, const PlanContext&) { return phi; };
}

PursuerPolicy constant_heading_pursuers(double psi1, double psi2) {
  return [psi1, psi2](const TwoCuttersState&, const PlanContext&) {
    return std::pair<double, double>{psi1, psi2};
  };
}

PursuerPolicy pure_pursuit_pursuers() {
  return [](const TwoCuttersState& s, const PlanContext&) {
    const auto at = [&](const Point2d& p) {
      const Point2d d = s.evader - p;
      return d.norm() > 0.0 ? geometry::heading_of<double>(d) : 0.0;
    };
    return std::pair<double, double>{at(s.pursuer1), at(s.pursuer2)};
  };
}

Trajectory simulate_two_cutters(const TwoCuttersState& state, const SimConfig& cfg,
                                const EvaderPolicy& evader, const PursuerPolicy& pursuers) {
  two_cutters::validate(state);
  const double ve = state.evader_speed;
  const double v1 = state.beta1 * ve;
  const double v2 = state.beta2 * ve;
  validate(cfg, std::max({ve, v1, v2}));
  const double rc = cfg.capture_radius;

  Trajectory traj;
  TwoCuttersState s = state;
  std::array<double, 3> headings{0.0, 0.0, 0.0};
  const auto push = [&](double t) {
    traj.samples.push_back({t, {s.evader, s.pursuer1, s.pursuer2}, headings, region_label(s)});
  };

  const double r1 = (s.pursuer1 - s.evader).norm();
  const double r2 = (s.pursuer2 - s.evader).norm();
  if (r1 <= rc || r2 <= rc) {
    push(0.0);
    traj.outcome = (r1 <= rc && r2 <= rc) ? Outcome::kSimultaneous
                   : r1 <= rc             ? Outcome::kCapturedByP1
                                          : Outcome::kCapturedByP2;
    traj.terminal_time = 0.0;
    return traj;
  }

  std::size_t step = 0;
  double t = 0.0;
  while (cfg.max_time - t > 1e-9 * cfg.dt) {
    if (step % static_cast<std::size_t>(cfg.replan_every) == 0) {
      const PlanContext ctx{step, t};
      const double phi = evader(s, ctx);
      const auto [psi1, psi2] = pursuers(s, ctx);
      const std::size_t index = traj.samples.size();
      require_heading(phi, index, "evader");
      require_heading(psi1, index, "pursuer1");
      require_heading(psi2, index, "pursuer2");
      headings = {phi, psi1, psi2};
    }
    push(t);

    const double h = std::min(cfg.dt, cfg.max_time - t);
    const Point2d ue = ve * geometry::unit_heading(headings[0]);
    const Point2d u1 = v1 * geometry::unit_heading(headings[1]);
    const Point2d u2 = v2 * geometry::unit_heading(headings[2]);
    const auto c1 = first_crossing(s.pursuer1 - s.evader, u1 - ue, rc, h);
    const auto c2 = first_crossing(s.pursuer2 - s.evader, u2 - ue, rc, h);

    if (c1 || c2) {
      const bool first_is_1 = c1 && (!c2 || *c1 <= *c2);
      const double sc = first_is_1 ? *c1 : *c2;
      s.evader += sc * ue;
      s.pursuer1 += sc * u1;
      s.pursuer2 += sc * u2;
      t += sc;

      // Simultaneous when the other pursuer also closes to within the radius
      // and its closest approach falls within one step of the capturer's.
      const auto ca1 = closest_approach(s.pursuer1 - s.evader, u1 - ue);
      const auto ca2 = closest_approach(s.pursuer2 - s.evader, u2 - ue);
      const auto& other = first_is_1 ? ca2 : ca1;
      const auto& mine = first_is_1 ? ca1 : ca2;
      const double other_range = ((first_is_1 ? s.pursuer2 : s.pursuer1) - s.evader).norm();
      const bool together = other_range <= rc ||
                            (other.distance <= rc && std::abs(other.time - mine.time) <= cfg.dt);
      traj.outcome = together ? Outcome::kSimultaneous
                     : first_is_1 ? Outcome::kCapturedByP1
                                  : Outcome::kCapturedByP2;
      traj.terminal_time = t;
      if (sc > 0.0) push(t);
      return traj;
    }

    s.evader += h * ue;
    s.pursuer1 += h * u1;
    s.pursuer2 += h * u2;
    ++step;
    t = h < cfg.dt ? cfg.max_time : grid_time(step, cfg.dt, cfg.max_time);
  }
  if (step > 0) push(t);
  traj.outcome = Outcome::kTimeout;
  traj.terminal_time = t;
  return traj;
}

Trajectory simulate_two_cutters(const TwoCuttersState& state, const SimConfig& cfg) {
  return simulate_two_cutters(
      state, cfg, optimal_evader(cfg.dispersal_policy.evader, cfg.force_initial_split),
      optimal_pursuers(cfg.dispersal_policy.pursuers, cfg.force_initial_split));
}

AtddgPolicies optimal_atddg() {
  struct Cache {
    std::optional<std::size_t> step;
    atddg::FullHeadings<double> headings;
  };
  auto cache = std::make_shared<Cache>();
  const auto lookup = [cache](const AtddgState& s, const PlanContext& ctx) {
    if (cache->step != ctx.step) {
      cache->headings = atddg::optimal_headings(s);
      cache->step = ctx.step;
    }
    return cache->headings;
  };
  return {[lookup](const AtddgState& s, const PlanContext& c) { return lookup(s, c).target; },
          [lookup](const AtddgState& s, const PlanContext& c) { return lookup(s, c).attacker; },
          [lookup](const AtddgState& s, const PlanContext& c) { return lookup(s, c).defender; }};
}

AtddgPlayerPolicy attacker_pure_pursuit() {
  return [](const AtddgState& s, const PlanContext&) {
    const Point2d d = s.target - s.attacker;
    return d.norm() > 0.0 ? geometry::heading_of<double>(d) : 0.0;
  };
}

Trajectory simulate_atddg(const AtddgState& state, const SimConfig& cfg,
                          const AtddgPolicies& policies) {
  geometry::require_finite(state.target, "target");
  geometry::require_finite(state.attacker, "attacker");
  geometry::require_finite(state.defender, "defender");
  if (!(state.alpha >= 0.0 && state.alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidSpeedRatio, "alpha must lie in [0, 1)");
  }
  validate(cfg, 1.0);
  const double rc = cfg.capture_radius;

  Trajectory traj;
  AtddgState s = state;
  std::array<double, 3> headings{0.0, 0.0, 0.0};
  const auto push = [&](double t) {
    traj.samples.push_back({t, {s.target, s.attacker, s.defender}, headings, kind_label(s)});
  };

  const double ad = (s.attacker - s.defender).norm();
  const double at = (s.attacker - s.target).norm();
  if (ad <= rc || at <= rc) {
    push(0.0);
    traj.outcome = ad <= rc ? Outcome::kAttackerIntercepted : Outcome::kTargetCaptured;
    return traj;
  }

  std::size_t step = 0;
  double t = 0.0;
  while (cfg.max_time - t > 1e-9 * cfg.dt) {
    if (step % static_cast<std::size_t>(cfg.replan_every) == 0) {
      const PlanContext ctx{step, t};
      const std::size_t index = traj.samples.size();
      headings = {policies.target(s, ctx), policies.attacker(s, ctx), policies.defender(s, ctx)};
      require_heading(headings[0], index, "target");
      require_heading(headings[1], index, "attacker");
      require_heading(headings[2], index, "defender");
    }
    push(t);

    const double h = std::min(cfg.dt, cfg.max_time - t);
    const Point2d ut = s.alpha * geometry::unit_heading(headings[0]);
    const Point2d ua = geometry::unit_heading(headings[1]);
    const Point2d ud = geometry::unit_heading(headings[2]);
    const auto intercept = first_crossing(s.attacker - s.defender, ua - ud, rc, h);
    const auto capture = first_crossing(s.attacker - s.target, ua - ut, rc, h);

    if (intercept || capture) {
      const bool intercepted = intercept && (!capture || *intercept <= *capture);
      const double sc = intercepted ? *intercept : *capture;
      s.target += sc * ut;
      s.attacker += sc * ua;
      s.defender += sc * ud;
      t += sc;
      traj.outcome = intercepted ? Outcome::kAttackerIntercepted : Outcome::kTargetCaptured;
      traj.terminal_time = t;
      if (sc > 0.0) push(t);
      return traj;
    }

    s.target += h * ut;
    s.attacker += h * ua;
    s.defender += h * ud;
    ++step;
    t = h < cfg.dt ? cfg.max_time : grid_time(step, cfg.dt, cfg.max_time);
  }
  if (step > 0) push(t);
  traj.outcome = Outcome::kTimeout;
  traj.terminal_time = t;
  return traj;
}

Trajectory simulate_atddg(const AtddgState& state, const SimConfig& cfg) {
  return simulate_atddg(state, cfg, optimal_atddg());
}

double terminal_separation(const Trajectory& traj) {
  if (traj.samples.empty()) throw Error(ErrorCode::kInvalidInput, "empty trajectory");
  const auto& last = traj.samples.back();
  return (last.positions[0] - last.positions[1]).norm();
}

}  // namespace pursuit::sim
