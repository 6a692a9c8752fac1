#include "pursuit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "pursuit/error.hpp"

namespace pursuit::verify {

namespace {

using two_cutters::Region;
using Point2d = geometry::Point2<double>;

class Sampler {
 public:
  Sampler(const scenario::VerifySpec& spec, std::uint64_t seed)
      : rng_(seed),
        pos_(-spec.position_bound, spec.position_bound),
        beta_(spec.beta_min, spec.beta_max),
        angle_(-geometry::pi<double>(), geometry::pi<double>()) {}

  State interior() {
    for (;;) {
      State s{point(), point(), point(), beta_(rng_), beta_(rng_), 1.0};
      if ((s.evader - s.pursuer1).norm() > 1e-2 && (s.evader - s.pursuer2).norm() > 1e-2) return s;
    }
  }

  // P2 reaches P1's pure-pursuit capture point at the same instant, so
  // t_f1(lambda1) = t_f2(lambda1).
  State boundary() {
    State s{point(), point(), Point2d::Zero(), beta_(rng_), beta_(rng_), 1.0};
    const Point2d d = s.evader - s.pursuer1;
    const double t1 = d.norm() / (s.beta1 - 1.0);
    const Point2d capture = s.evader + t1 * d.normalized();
    s.pursuer2 = capture + s.beta2 * t1 * geometry::unit_heading(angle_(rng_));
    return s;
  }

 private:
  Point2d point() { return {pos_(rng_), pos_(rng_)}; }

  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> pos_, beta_, angle_;
};

Vector6d central_gradient(const State& s, double relative_step,
                          const std::function<double(const State&)>& f) {
  const Vector6d x = s.coordinates();
  const double h = relative_step * std::max(1.0, x.cwiseAbs().maxCoeff());
  Vector6d g;
  for (int i = 0; i < 6; ++i) {
    Vector6d xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(s.with_coordinates(xp)) - f(s.with_coordinates(xm))) / (2 * h);
  }
  return g;
}

void run_interior(const scenario::VerifySpec& spec, std::uint64_t seed,
                  const two_cutters::Tolerances<double>& tol, bool corrupt, Report& rep) {
  const auto evaluate = [&](const State& s) {
    auto r = two_cutters::value(s, tol);
    if (corrupt && r.region == Region::kR1) {
      r = two_cutters::single_capture_branch(s, 1, std::optional<double>(s.beta1 + 0.1));
    }
    return r;
  };
  Sampler gen(spec, seed);
  auto& sum = rep.summary;
  for (int i = 0; i < spec.samples; ++i) {
    const State s = gen.interior();
    ++sum.samples;
    if (two_cutters::classify_region(s, tol) == Region::kDispersal) {
      ++sum.dispersal_skipped;
      continue;
    }
    const auto v = evaluate(s);
    Record r;
    r.state = s;
    r.region = v.region;
    r.value = v.value;
    r.gradient = v.gradient;
    r.hji_residual = v.hji_residual;
    r.margin = two_cutters::region_margin(s, tol);
    ++sum.evaluated;
    sum.max_residual = std::max(sum.max_residual, std::abs(v.hji_residual));
    if (r.margin >= spec.boundary_exclusion) {
      r.fd_gradient =
          central_gradient(s, spec.fd_step, [&](const State& x) { return evaluate(x).value; });
      r.gradient_error = (r.gradient - *r.fd_gradient).norm() / r.fd_gradient->norm();
      ++sum.gradient_checked;
      sum.max_gradient_error = std::max(sum.max_gradient_error, r.gradient_error);
    }
    rep.records.push_back(std::move(r));
  }
  sum.insufficient_coverage = sum.evaluated == 0 || sum.gradient_checked == 0;
  sum.passed = !sum.insufficient_coverage && sum.max_residual <= spec.threshold &&
               sum.max_gradient_error <= spec.gradient_tolerance;
}

void run_boundary(const scenario::VerifySpec& spec, std::uint64_t seed, Report& rep) {
  Sampler gen(spec, seed);
  auto& sum = rep.summary;
  // Rejected draws (P2 dominant at lambda2, or no lens) are retried.
  const long long budget = 100LL * spec.samples;
  for (long long attempt = 0; attempt < budget && sum.evaluated < spec.samples; ++attempt) {
    const State s = gen.boundary();
    if ((s.evader - s.pursuer1).norm() <= 1e-2) continue;
    const auto t = two_cutters::detail::pure_pursuit_times(s);
    if (t.t22 <= t.t12) continue;
    const auto corners = two_cutters::detail::lens_corners(s);
    if (corners.count < 2) continue;
    ++sum.samples;
    const auto cand = two_cutters::dispersal_candidates(s);
    const auto& far = cand.candidates[0].time >= cand.candidates[1].time ? cand.candidates[0]
                                                                          : cand.candidates[1];
    const auto single = two_cutters::single_capture_branch(s, 1);
    const auto simul = two_cutters::simultaneous_branch(
        s, geometry::heading_of<double>(far.aimpoint - s.evader));
    Record r;
    r.state = s;
    r.region = Region::kR1;
    r.value = single.value;
    r.gradient = single.gradient;
    r.hji_residual = single.hji_residual;
    r.value_gap = std::abs(single.value - simul.value) / single.value;
    r.gradient_gap = (single.gradient - simul.gradient).norm() / single.gradient.norm();
    ++sum.evaluated;
    sum.max_residual = std::max(sum.max_residual, std::abs(r.hji_residual));
    sum.max_value_gap = std::max(sum.max_value_gap, r.value_gap);
    sum.max_gradient_gap = std::max(sum.max_gradient_gap, r.gradient_gap);
    rep.records.push_back(std::move(r));
  }
  sum.insufficient_coverage = sum.evaluated < spec.samples;
  sum.passed = !sum.insufficient_coverage && sum.max_value_gap <= spec.value_tolerance &&
               sum.max_gradient_gap <= spec.branch_gradient_tolerance &&
               sum.max_residual <= spec.threshold;
}

}  // namespace

Report run(const scenario::VerifySpec& spec, std::uint64_t seed,
           const two_cutters::Tolerances<double>& tol) {
  if (spec.samples < 1) throw Error(ErrorCode::kInvalidInput, "verify.samples must be >= 1");
  if (!(spec.beta_min > 1.0) || !(spec.beta_max > spec.beta_min)) {
    throw Error(ErrorCode::kInvalidInput, "verify beta range must satisfy 1 < beta_min < beta_max");
  }
  Report rep;
  rep.mode = spec.mode;
  switch (spec.mode) {
    case scenario::VerifyMode::kInterior: run_interior(spec, seed, tol, false, rep); break;
    case scenario::VerifyMode::kCorruptBeta1: run_interior(spec, seed, tol, true, rep); break;
    case scenario::VerifyMode::kBoundary: run_boundary(spec, seed, rep); break;
  }
  return rep;
}

}  // namespace pursuit::verify
