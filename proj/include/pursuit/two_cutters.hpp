#pragma once

// Two faster pursuers cooperating against one evader in the open plane.
//
// Internally everything is in evader-normalized units: the evader moves at
// unit speed and pursuer i at beta_i.  A normalized time is therefore a
// distance travelled by the evader; real time is normalized time / v_E.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <tuple>
#include <utility>

#include "pursuit/error.hpp"
#include "pursuit/geometry.hpp"

namespace pursuit::two_cutters {

using geometry::Point2;

template <typename Scalar>
using Vector6 = Eigen::Matrix<Scalar, 6, 1>;

template <typename Scalar>
struct TwoCuttersState {
  Point2<Scalar> evader;
  Point2<Scalar> pursuer1;
  Point2<Scalar> pursuer2;
  Scalar beta1;
  Scalar beta2;
  Scalar evader_speed = Scalar(1);

  static TwoCuttersState from_speeds(const Point2<Scalar>& evader, Scalar evader_speed,
                                     const Point2<Scalar>& pursuer1, Scalar speed1,
                                     const Point2<Scalar>& pursuer2, Scalar speed2) {
    return {evader, pursuer1, pursuer2, speed1 / evader_speed, speed2 / evader_speed,
            evader_speed};
  }

  /// (x_E, y_E, x_P1, y_P1, x_P2, y_P2)
  Vector6<Scalar> coordinates() const {
    Vector6<Scalar> x;
    x << evader, pursuer1, pursuer2;
    return x;
  }

  TwoCuttersState with_coordinates(const Vector6<Scalar>& x) const {
    TwoCuttersState s = *this;
    s.evader = x.template segment<2>(0);
    s.pursuer1 = x.template segment<2>(2);
    s.pursuer2 = x.template segment<2>(4);
    return s;
  }

  const Point2<Scalar>& pursuer(int index) const { return index == 1 ? pursuer1 : pursuer2; }
  Scalar beta(int index) const { return index == 1 ? beta1 : beta2; }
};

template <typename Scalar>
void validate(const TwoCuttersState<Scalar>& s) {
  using std::isfinite;
  geometry::require_finite(s.evader, "evader");
  geometry::require_finite(s.pursuer1, "pursuer1");
  geometry::require_finite(s.pursuer2, "pursuer2");
  if (!(s.beta1 > Scalar(1)) || !isfinite(s.beta1) || !(s.beta2 > Scalar(1)) ||
      !isfinite(s.beta2)) {
    throw Error(ErrorCode::kInvalidSpeedRatio, "both pursuers must be faster than the evader");
  }
  if (!(s.evader_speed > Scalar(0)) || !isfinite(s.evader_speed)) {
    throw Error(ErrorCode::kInvalidInput, "evader speed must be positive");
  }
}

enum class Region { kR1, kR2, kRs, kDispersal };

inline const char* to_string(Region r) {
  switch (r) {
    case Region::kR1: return "R1";
    case Region::kR2: return "R2";
    case Region::kRs: return "Rs";
    case Region::kDispersal: return "D";
  }
  return "?";
}

enum class DispersalChoice { kFirst, kSecond };

template <typename Scalar>
struct Tolerances {
  // Region tests compare t_f1 against t_f2 with this slack times max(t_f1, t_f2).
  Scalar boundary_slack = Scalar(1e-12);
  // Relative equidistance threshold for the dispersal surface.
  Scalar dispersal = Scalar(1e-9);
};

template <typename Scalar>
struct Strategy {
  Scalar phi;
  Scalar psi1;
  Scalar psi2;
  std::optional<Point2<Scalar>> aimpoint;
};

template <typename Scalar>
struct Solution2P1E {
  Region region;
  Scalar phi_star;
  Scalar psi1_star;
  Scalar psi2_star;
  std::optional<Point2<Scalar>> aimpoint;
  // Normalized interception times of each pursuer along phi_star.
  Scalar tf1;
  Scalar tf2;
  // Game value in real time units.
  Scalar capture_time;
  // Second optimal strategy set on the dispersal surface.
  std::optional<Strategy<Scalar>> alternate;

  Strategy<Scalar> primary() const { return {phi_star, psi1_star, psi2_star, aimpoint}; }
};

template <typename Scalar>
struct ValueReport {
  Region region;
  Scalar value;  // normalized capture time
  Vector6<Scalar> gradient;
  Scalar f1;
  Scalar f2;
  Scalar q1;
  Scalar q2;
  Scalar hji_residual;
  Scalar phi;
  Scalar psi1;
  Scalar psi2;
};

template <typename Scalar>
struct DispersalCandidate {
  Point2<Scalar> aimpoint;
  Scalar time;  // normalized
};

template <typename Scalar>
struct DispersalCandidates {
  std::array<DispersalCandidate<Scalar>, 2> candidates;
  bool equidistant;
};

/// Normalized time for pursuer `index` to intercept an evader that holds
/// heading `phi`.  Returns 0 when the pursuer already sits on the evader.
template <typename Scalar>
Scalar capture_time_vs_heading(const TwoCuttersState<Scalar>& s, int index, Scalar phi) {
  using std::cos;
  using std::sqrt;
  const Scalar beta = s.beta(index);
  if (!(beta > Scalar(1))) throw Error(ErrorCode::kInvalidSpeedRatio, "beta must exceed 1");
  const auto los = geometry::line_of_sight(s.pursuer(index), s.evader);
  if (!los) return Scalar(0);
  const Scalar c = los->range / (beta * beta - Scalar(1));
  const Scalar along = c * cos(phi - los->angle);
  const Scalar root = sqrt(along * along + c * los->range);
  // Rationalized form when the surd nearly cancels (evader heading at the pursuer).
  if (along < Scalar(0)) return c * los->range / (root - along);
  return along + root;
}

/// Real capture time of a lone pursuer against the evader.
template <typename Scalar>
Scalar one_on_one_capture_time(const Point2<Scalar>& evader, const Point2<Scalar>& pursuer,
                               Scalar beta, Scalar evader_speed) {
  if (!(beta > Scalar(1))) throw Error(ErrorCode::kInvalidSpeedRatio, "beta must exceed 1");
  return (evader - pursuer).norm() / ((beta - Scalar(1)) * evader_speed);
}

/// State derivative under headings (phi, psi1, psi2), normalized speeds.
template <typename Scalar>
Vector6<Scalar> dynamics(const TwoCuttersState<Scalar>& s, Scalar phi, Scalar psi1, Scalar psi2) {
  Vector6<Scalar> f;
  f << geometry::unit_heading(phi), s.beta1 * geometry::unit_heading(psi1),
      s.beta2 * geometry::unit_heading(psi2);
  return f;
}

namespace detail {

template <typename Scalar>
struct PurePursuitTimes {
  Scalar lambda1, lambda2;
  Scalar t11, t21;  // t_f1(lambda1), t_f2(lambda1)
  Scalar t22, t12;  // t_f2(lambda2), t_f1(lambda2)
};

template <typename Scalar>
PurePursuitTimes<Scalar> pure_pursuit_times(const TwoCuttersState<Scalar>& s) {
  const auto los1 = geometry::line_of_sight(s.pursuer1, s.evader);
  const auto los2 = geometry::line_of_sight(s.pursuer2, s.evader);
  if (!los1 || !los2) throw Error(ErrorCode::kZeroRange, "evader already captured");
  PurePursuitTimes<Scalar> t;
  t.lambda1 = los1->angle;
  t.lambda2 = los2->angle;
  t.t11 = capture_time_vs_heading(s, 1, t.lambda1);
  t.t21 = capture_time_vs_heading(s, 2, t.lambda1);
  t.t22 = capture_time_vs_heading(s, 2, t.lambda2);
  t.t12 = capture_time_vs_heading(s, 1, t.lambda2);
  return t;
}

template <typename Scalar>
bool first_alone(const PurePursuitTimes<Scalar>& t, const Tolerances<Scalar>& tol) {
  using std::max;
  return t.t11 <= t.t21 + tol.boundary_slack * max(t.t11, t.t21);
}

template <typename Scalar>
bool second_alone(const PurePursuitTimes<Scalar>& t, const Tolerances<Scalar>& tol) {
  using std::max;
  return t.t22 <= t.t12 + tol.boundary_slack * max(t.t22, t.t12);
}

template <typename Scalar>
struct LensCorners {
  int count = 0;
  std::array<Point2<Scalar>, 2> points{};  // intersection order
};

template <typename Scalar>
LensCorners<Scalar> lens_corners(const TwoCuttersState<Scalar>& s) {
  const auto c1 = geometry::apollonius_circle(s.evader, s.pursuer1, s.beta1);
  const auto c2 = geometry::apollonius_circle(s.evader, s.pursuer2, s.beta2);
  const auto hits = geometry::circle_intersections<Scalar>(c1, c2);
  LensCorners<Scalar> corners;
  for (const auto& p : hits.points()) corners.points[corners.count++] = p;
  return corners;
}

// Orders the two corners by the dispersal tie-break: the one with larger
// ordinate in the evader-centered frame whose x axis points from P1 to P2.
template <typename Scalar>
bool precedes_in_tiebreak(const TwoCuttersState<Scalar>& s, const Point2<Scalar>& a,
                          const Point2<Scalar>& b) {
  Point2<Scalar> axis = s.pursuer2 - s.pursuer1;
  if (axis.norm() == Scalar(0)) axis = Point2<Scalar>(Scalar(1), Scalar(0));
  const Point2<Scalar> normal(-axis.y(), axis.x());
  return normal.dot(a - s.evader) >= normal.dot(b - s.evader);
}

template <typename Scalar>
bool equidistant(Scalar d1, Scalar d2, const Tolerances<Scalar>& tol) {
  using std::abs;
  using std::max;
  return abs(d1 - d2) <= tol.dispersal * max(d1, d2);
}

}  // namespace detail

/// Region of the (non-captured) state.  Ties on the R1 test win over R2.
template <typename Scalar>
Region classify_region(const TwoCuttersState<Scalar>& s, const Tolerances<Scalar>& tol = {}) {
  validate(s);
  const auto t = detail::pure_pursuit_times(s);
  if (detail::first_alone(t, tol)) return Region::kR1;
  if (detail::second_alone(t, tol)) return Region::kR2;
  const auto corners = detail::lens_corners(s);
  if (corners.count == 2) {
    const Scalar d0 = (corners.points[0] - s.evader).norm();
    const Scalar d1 = (corners.points[1] - s.evader).norm();
    if (detail::equidistant(d0, d1, tol)) return Region::kDispersal;
  }
  return Region::kRs;
}

/// Both corners of the lens with their normalized times.  Candidate 0 is the
/// tie-break primary.
template <typename Scalar>
DispersalCandidates<Scalar> dispersal_candidates(const TwoCuttersState<Scalar>& s,
                                                 const Tolerances<Scalar>& tol = {}) {
  validate(s);
  const auto corners = detail::lens_corners(s);
  if (corners.count < 2) {
    throw Error(ErrorCode::kNotInSimultaneousRegion,
                "Apollonius circles do not intersect in two points");
  }
  Point2<Scalar> a = corners.points[0];
  Point2<Scalar> b = corners.points[1];
  if (!detail::precedes_in_tiebreak(s, a, b)) std::swap(a, b);
  const Scalar ta = (a - s.evader).norm();
  const Scalar tb = (b - s.evader).norm();
  return {{DispersalCandidate<Scalar>{a, ta}, DispersalCandidate<Scalar>{b, tb}},
          detail::equidistant(ta, tb, tol)};
}

template <typename Scalar>
struct SolveOptions {
  Tolerances<Scalar> tolerances{};
  DispersalChoice dispersal_primary = DispersalChoice::kFirst;
};

namespace detail {

template <typename Scalar>
Strategy<Scalar> aim_at(const TwoCuttersState<Scalar>& s, const Point2<Scalar>& aim) {
  return {geometry::heading_of<Scalar>(aim - s.evader), geometry::heading_of<Scalar>(aim - s.pursuer1),
          geometry::heading_of<Scalar>(aim - s.pursuer2), aim};
}

template <typename Scalar>
Solution2P1E<Scalar> single_capture_solution(const TwoCuttersState<Scalar>& s, int index,
                                             Scalar lambda) {
  const Scalar tf1 = capture_time_vs_heading(s, 1, lambda);
  const Scalar tf2 = capture_time_vs_heading(s, 2, lambda);
  const Scalar t = index == 1 ? tf1 : tf2;
  const Point2<Scalar> capture_point = s.evader + t * geometry::unit_heading(lambda);
  const Point2<Scalar>& other = s.pursuer(index == 1 ? 2 : 1);
  const Point2<Scalar> to_capture = capture_point - other;
  // The idle pursuer heads for the capture point; its heading does not enter the value.
  const Scalar idle = to_capture.norm() > Scalar(0) ? geometry::heading_of(to_capture) : lambda;
  Solution2P1E<Scalar> sol{};
  sol.region = index == 1 ? Region::kR1 : Region::kR2;
  sol.phi_star = lambda;
  sol.psi1_star = index == 1 ? lambda : idle;
  sol.psi2_star = index == 2 ? lambda : idle;
  sol.tf1 = tf1;
  sol.tf2 = tf2;
  sol.capture_time = t / s.evader_speed;
  return sol;
}

}  // namespace detail

/// Saddle-point headings and capture time.  A captured state returns a zero
/// time solution labelled with the capturing pursuer.
template <typename Scalar>
Solution2P1E<Scalar> solve(const TwoCuttersState<Scalar>& s, const SolveOptions<Scalar>& opt = {}) {
  validate(s);
  const Scalar r1 = (s.evader - s.pursuer1).norm();
  const Scalar r2 = (s.evader - s.pursuer2).norm();
  if (r1 == Scalar(0) || r2 == Scalar(0)) {
    Solution2P1E<Scalar> sol{};
    sol.region = r1 == Scalar(0) ? Region::kR1 : Region::kR2;
    sol.phi_star = sol.psi1_star = sol.psi2_star = Scalar(0);
    sol.tf1 = capture_time_vs_heading(s, 1, Scalar(0));
    sol.tf2 = capture_time_vs_heading(s, 2, Scalar(0));
    sol.capture_time = Scalar(0);
    return sol;
  }

  const auto t = detail::pure_pursuit_times(s);
  if (detail::first_alone(t, opt.tolerances)) return detail::single_capture_solution(s, 1, t.lambda1);
  if (detail::second_alone(t, opt.tolerances)) return detail::single_capture_solution(s, 2, t.lambda2);

  const auto corners = detail::lens_corners(s);
  if (corners.count == 0) {
    // Only reachable through rounding right at a region boundary: fall back on
    // whichever pure-pursuit test failed by the smaller margin.
    const bool pick1 = (t.t11 - t.t21) / t.t11 <= (t.t22 - t.t12) / t.t22;
    return pick1 ? detail::single_capture_solution(s, 1, t.lambda1)
                 : detail::single_capture_solution(s, 2, t.lambda2);
  }

  Solution2P1E<Scalar> sol{};
  sol.region = Region::kRs;
  Point2<Scalar> aim = corners.points[0];
  if (corners.count == 2) {
    const auto cand = dispersal_candidates(s, opt.tolerances);
    if (cand.equidistant) {
      sol.region = Region::kDispersal;
      const int pick = opt.dispersal_primary == DispersalChoice::kFirst ? 0 : 1;
      aim = cand.candidates[pick].aimpoint;
      sol.alternate = detail::aim_at(s, cand.candidates[1 - pick].aimpoint);
    } else {
      // The evader takes the corner farthest from itself.
      aim = cand.candidates[0].time >= cand.candidates[1].time ? cand.candidates[0].aimpoint
                                                               : cand.candidates[1].aimpoint;
    }
  }
  const auto strat = detail::aim_at(s, aim);
  sol.phi_star = strat.phi;
  sol.psi1_star = strat.psi1;
  sol.psi2_star = strat.psi2;
  sol.aimpoint = aim;
  sol.tf1 = capture_time_vs_heading(s, 1, sol.phi_star);
  sol.tf2 = capture_time_vs_heading(s, 2, sol.phi_star);
  sol.capture_time = (aim - s.evader).norm() / s.evader_speed;
  return sol;
}

/// 1 + grad V . f(x, u*, v*)
template <typename Scalar>
Scalar hji_residual(const TwoCuttersState<Scalar>& s, const Vector6<Scalar>& gradient, Scalar phi,
                    Scalar psi1, Scalar psi2) {
  return Scalar(1) + gradient.dot(dynamics(s, phi, psi1, psi2));
}

/// Value and gradient from the single-capture branch of pursuer `index`
/// (evaluated whatever region the state is in).
template <typename Scalar>
ValueReport<Scalar> single_capture_branch(const TwoCuttersState<Scalar>& s, int index,
                                          std::optional<Scalar> beta_override = std::nullopt) {
  using std::sqrt;
  const Point2<Scalar> delta = s.evader - s.pursuer(index);
  const Scalar r = delta.norm();
  if (r == Scalar(0)) throw Error(ErrorCode::kZeroRange, "evader already captured");
  const Scalar beta = beta_override.value_or(s.beta(index));
  const Point2<Scalar> u = delta / r;
  const Scalar lambda = geometry::heading_of(delta);

  ValueReport<Scalar> rep{};
  rep.region = index == 1 ? Region::kR1 : Region::kR2;
  rep.value = r / (beta - Scalar(1));
  rep.gradient.setZero();
  const Point2<Scalar> g = u / (beta - Scalar(1));
  rep.gradient.template segment<2>(0) = g;
  rep.gradient.template segment<2>(index == 1 ? 2 : 4) = -g;

  // F_i and Q_i at phi = lambda_index for reference; F_index is zero there.
  const auto f_and_q = [&](int i) {
    const Point2<Scalar> d = s.evader - s.pursuer(i);
    const Scalar b = s.beta(i);
    const Scalar along = d.dot(u);
    const Scalar q = sqrt(along * along + (b * b - Scalar(1)) * d.squaredNorm());
    return std::pair<Scalar, Scalar>{(d.y() * u.x() - d.x() * u.y()) / q, q};
  };
  std::tie(rep.f1, rep.q1) = f_and_q(1);
  std::tie(rep.f2, rep.q2) = f_and_q(2);

  const auto sol = detail::single_capture_solution(s, index, lambda);
  rep.phi = sol.phi_star;
  rep.psi1 = sol.psi1_star;
  rep.psi2 = sol.psi2_star;
  rep.hji_residual = hji_residual(s, rep.gradient, rep.phi, rep.psi1, rep.psi2);
  return rep;
}

/// Value and gradient from the simultaneous-capture branch, as a convex
/// combination of t_f1 and t_f2 weighted by F_2 and F_1, with the evader
/// heading `phi` supplied.  Pursuer headings are recovered from the
/// terminal-coincidence constraint.
template <typename Scalar>
ValueReport<Scalar> simultaneous_branch(const TwoCuttersState<Scalar>& s, Scalar phi) {
  using std::sqrt;
  const Point2<Scalar> u = geometry::unit_heading(phi);

  struct Terms {
    Scalar tf, f, q;
    Point2<Scalar> dtf_devader;
  };
  const auto terms = [&](int i) {
    const Point2<Scalar> d = s.evader - s.pursuer(i);
    const Scalar k = s.beta(i) * s.beta(i) - Scalar(1);
    const Scalar along = d.dot(u);
    const Scalar q = sqrt(along * along + k * d.squaredNorm());
    Terms t;
    t.tf = (along + q) / k;
    t.f = (d.y() * u.x() - d.x() * u.y()) / q;
    t.q = q;
    t.dtf_devader = (u + (along * u + k * d) / q) / k;
    return t;
  };
  const Terms t1 = terms(1);
  const Terms t2 = terms(2);

  ValueReport<Scalar> rep{};
  rep.region = Region::kRs;
  rep.f1 = t1.f;
  rep.f2 = t2.f;
  rep.q1 = t1.q;
  rep.q2 = t2.q;
  const Scalar den = t1.f - t2.f;
  const Scalar w1 = -t2.f / den;
  const Scalar w2 = t1.f / den;
  rep.value = (t1.f * t2.tf - t2.f * t1.tf) / den;
  rep.gradient.template segment<2>(0) = w1 * t1.dtf_devader + w2 * t2.dtf_devader;
  rep.gradient.template segment<2>(2) = -w1 * t1.dtf_devader;
  rep.gradient.template segment<2>(4) = -w2 * t2.dtf_devader;

  const Point2<Scalar> aim = s.evader + rep.value * u;
  rep.phi = phi;
  rep.psi1 = geometry::heading_of<Scalar>(aim - s.pursuer1);
  rep.psi2 = geometry::heading_of<Scalar>(aim - s.pursuer2);
  rep.hji_residual = hji_residual(s, rep.gradient, rep.phi, rep.psi1, rep.psi2);
  return rep;
}

/// Value function, analytic gradient and HJI residual on the regular set.
/// Dispersal states are rejected: the gradient is not single-valued there.
template <typename Scalar>
ValueReport<Scalar> value(const TwoCuttersState<Scalar>& s, const Tolerances<Scalar>& tol = {}) {
  SolveOptions<Scalar> opt;
  opt.tolerances = tol;
  const auto sol = solve(s, opt);
  if (sol.capture_time == Scalar(0)) throw Error(ErrorCode::kZeroRange, "evader already captured");
  switch (sol.region) {
    case Region::kR1: return single_capture_branch(s, 1);
    case Region::kR2: return single_capture_branch(s, 2);
    case Region::kDispersal:
      throw Error(ErrorCode::kNonSmoothPoint, "state lies on the dispersal surface");
    case Region::kRs: break;
  }
  return simultaneous_branch(s, sol.phi_star);
}

/// Relative distance of the state to the nearest region boundary or to the
/// dispersal surface (0 on a boundary).
template <typename Scalar>
Scalar region_margin(const TwoCuttersState<Scalar>& s, const Tolerances<Scalar>& tol = {}) {
  using std::abs;
  using std::max;
  using std::min;
  validate(s);
  const auto t = detail::pure_pursuit_times(s);
  const Scalar gap1 = (t.t21 - t.t11) / max(t.t11, t.t21);
  const Scalar gap2 = (t.t12 - t.t22) / max(t.t22, t.t12);
  if (detail::first_alone(t, tol)) return max(gap1, Scalar(0));
  if (detail::second_alone(t, tol)) return max(gap2, Scalar(0));
  Scalar margin = min(-gap1, -gap2);
  const auto corners = detail::lens_corners(s);
  if (corners.count == 2) {
    const Scalar d0 = (corners.points[0] - s.evader).norm();
    const Scalar d1 = (corners.points[1] - s.evader).norm();
    margin = min(margin, abs(d0 - d1) / max(d0, d1));
  }
  return margin;
}

}  // namespace pursuit::two_cutters
