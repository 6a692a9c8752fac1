#pragma once

// Active target defense: a Target (speed alpha) and a Defender (speed 1)
// cooperate against an Attacker (speed 1).  The game of degree is solved in
// the reduced frame A = (xA, 0), D = (-xA, 0), T = (xT, yT) with yT >= 0,
// where both A and D aim at the point (0, y) on the orthogonal bisector.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "pursuit/error.hpp"
#include "pursuit/geometry.hpp"

namespace pursuit::atddg {

using geometry::Point2;

template <typename Scalar>
struct AtddgFullState {
  Point2<Scalar> target;
  Point2<Scalar> attacker;
  Point2<Scalar> defender;
  Scalar alpha;
};

template <typename Scalar>
struct AtddgReducedState {
  Scalar xA;
  Scalar xT;
  Scalar yT;
  Scalar alpha;
};

/// Rigid map between the full plane and the reduced frame.  `basis` is
/// orthogonal and may include a reflection.
template <typename Scalar>
struct ReducedFrame {
  Eigen::Matrix<Scalar, 2, 2> basis;
  Point2<Scalar> origin;

  Point2<Scalar> to_reduced(const Point2<Scalar>& p) const { return basis * (p - origin); }
  Point2<Scalar> to_full(const Point2<Scalar>& p) const { return basis.transpose() * p + origin; }
  Scalar heading_to_full(Scalar heading) const {
    return geometry::heading_of<Scalar>(basis.transpose() * geometry::unit_heading(heading));
  }
  Scalar heading_to_reduced(Scalar heading) const {
    return geometry::heading_of<Scalar>(basis * geometry::unit_heading(heading));
  }
};

template <typename Scalar>
struct ReducedView {
  AtddgReducedState<Scalar> state;
  ReducedFrame<Scalar> frame;
};

template <typename Scalar>
ReducedView<Scalar> to_reduced_frame(const AtddgFullState<Scalar>& full) {
  geometry::require_finite(full.target, "target");
  geometry::require_finite(full.attacker, "attacker");
  geometry::require_finite(full.defender, "defender");
  const Point2<Scalar> mid = (full.attacker + full.defender) / Scalar(2);
  const Point2<Scalar> half = full.attacker - mid;
  const Scalar xA = half.norm();
  if (xA == Scalar(0)) {
    throw Error(ErrorCode::kDegenerateFrame, "attacker and defender coincide");
  }
  const Point2<Scalar> u = half / xA;
  Eigen::Matrix<Scalar, 2, 2> basis;
  basis << u.x(), u.y(), -u.y(), u.x();
  Point2<Scalar> t = basis * (full.target - mid);
  if (t.y() < Scalar(0)) {
    basis.row(1) *= Scalar(-1);
    t.y() = -t.y();
  }
  return {{xA, t.x(), t.y(), full.alpha}, {basis, mid}};
}

template <typename Scalar>
AtddgFullState<Scalar> from_reduced_frame(const AtddgReducedState<Scalar>& r,
                                          const ReducedFrame<Scalar>& frame) {
  return {frame.to_full(Point2<Scalar>(r.xT, r.yT)), frame.to_full(Point2<Scalar>(r.xA, Scalar(0))),
          frame.to_full(Point2<Scalar>(-r.xA, Scalar(0))), r.alpha};
}

enum class Kind { kRe, kB, kRc };

inline const char* to_string(Kind k) {
  switch (k) {
    case Kind::kRe: return "Re";
    case Kind::kB: return "B";
    case Kind::kRc: return "Rc";
  }
  return "?";
}

template <typename Scalar>
void validate(const AtddgReducedState<Scalar>& r) {
  using std::isfinite;
  if (!isfinite(r.xA) || !isfinite(r.xT) || !isfinite(r.yT)) {
    throw Error(ErrorCode::kInvalidInput, "reduced state has a non-finite coordinate");
  }
  if (!(r.xA > Scalar(0))) throw Error(ErrorCode::kDegenerateFrame, "xA must be positive");
  if (r.yT < Scalar(0)) throw Error(ErrorCode::kInvalidInput, "yT must be non-negative");
  if (!(r.alpha >= Scalar(0) && r.alpha < Scalar(1))) {
    throw Error(ErrorCode::kInvalidSpeedRatio, "alpha must lie in [0, 1)");
  }
}

/// Game of kind.  `tolerance` is relative to the magnitude of the terms of
/// the quadratic form.
template <typename Scalar>
Kind classify_kind(const AtddgReducedState<Scalar>& r, Scalar tolerance = Scalar(1e-9)) {
  using std::abs;
  validate(r);
  if (r.xT <= Scalar(0)) return Kind::kRe;
  if (r.alpha == Scalar(0)) {
    throw Error(ErrorCode::kOutOfModel, "a static target with xT > 0 is outside the model");
  }
  const Scalar a2 = r.alpha * r.alpha;
  const Scalar t1 = r.xA * r.xA;
  const Scalar t2 = r.yT * r.yT / (Scalar(1) - a2);
  const Scalar t3 = r.xT * r.xT / a2;
  const Scalar form = t1 + t2 - t3;
  if (abs(form) <= tolerance * (t1 + t2 + t3)) return Kind::kB;
  return form < Scalar(0) ? Kind::kRc : Kind::kRe;
}

/// Speed ratio at which (xA, xT, yT) lies on the escape boundary: half the
/// difference of the target's distances to D and A, over xA.
template <typename Scalar>
Scalar critical_speed_ratio(Scalar xA, Scalar xT, Scalar yT) {
  using std::hypot;
  if (!(xA > Scalar(0))) throw Error(ErrorCode::kDegenerateFrame, "xA must be positive");
  if (xT < Scalar(0)) {
    throw Error(ErrorCode::kOutOfModel, "no escape boundary on the defender side (xT < 0)");
  }
  return (hypot(xA + xT, yT) - hypot(xA - xT, yT)) / (Scalar(2) * xA);
}

/// Coefficients of the aimpoint quartic, highest degree first.
template <typename Scalar>
std::array<Scalar, 5> quartic_coefficients(const AtddgReducedState<Scalar>& r) {
  const Scalar k = Scalar(1) - r.alpha * r.alpha;
  const Scalar xA2 = r.xA * r.xA;
  return {k, Scalar(-2) * k * r.yT,
          k * r.yT * r.yT + xA2 - r.alpha * r.alpha * r.xT * r.xT, Scalar(-2) * xA2 * r.yT,
          xA2 * r.yT * r.yT};
}

template <typename Scalar>
Scalar evaluate_polynomial(const std::array<Scalar, 5>& c, Scalar y) {
  Scalar acc = c[0];
  for (int i = 1; i < 5; ++i) acc = acc * y + c[i];
  return acc;
}

template <typename Scalar>
struct QuarticRoots {
  std::array<Scalar, 5> coefficients;
  std::vector<Scalar> roots;  // ascending
  bool multiple = false;      // two eigenvalues merged into one real root

  Scalar coefficient_scale() const {
    using std::abs;
    Scalar s(0);
    for (Scalar c : coefficients) s = std::max(s, abs(c));
    return s;
  }
};

namespace detail {

template <typename Scalar>
Scalar polish_root(const std::array<Scalar, 5>& c, Scalar y) {
  using std::abs;
  Scalar best = y;
  Scalar best_res = abs(evaluate_polynomial(c, y));
  for (int it = 0; it < 16 && best_res > Scalar(0); ++it) {
    Scalar p = c[0], dp = Scalar(0);
    for (int i = 1; i < 5; ++i) {
      dp = dp * best + p;
      p = p * best + c[i];
    }
    if (dp == Scalar(0)) break;
    const Scalar next = best - p / dp;
    const Scalar res = abs(evaluate_polynomial(c, next));
    if (!(res < best_res)) break;
    best = next;
    best_res = res;
  }
  return best;
}

}  // namespace detail

/// All real roots of a quartic with nonzero leading coefficient, via the
/// eigenvalues of the companion matrix followed by a Newton polish.
template <typename Scalar>
QuarticRoots<Scalar> real_quartic_roots(const std::array<Scalar, 5>& c) {
  using std::abs;
  using std::max;
  using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;
  Matrix4 companion = Matrix4::Zero();
  for (int i = 0; i < 4; ++i) companion(0, i) = -c[i + 1] / c[0];
  for (int i = 1; i < 4; ++i) companion(i, i - 1) = Scalar(1);
  Eigen::EigenSolver<Matrix4> solver(companion, false);

  QuarticRoots<Scalar> out;
  out.coefficients = c;
  const Scalar coef_scale = out.coefficient_scale();
  std::vector<std::complex<Scalar>> eig;
  for (int i = 0; i < 4; ++i) eig.push_back(solver.eigenvalues()[i]);

  std::vector<Scalar> candidates;
  for (const auto& z : eig) {
    const Scalar mag = max(Scalar(1), abs(z));
    if (abs(z.imag()) <= Scalar(1e-9) * mag) {
      candidates.push_back(detail::polish_root(c, z.real()));
    } else if (abs(z.imag()) <= Scalar(1e-6) * mag) {
      // A nearly real conjugate pair is a double root split by rounding; keep
      // its real part only when it really is a root.
      const Scalar y = detail::polish_root(c, z.real());
      const Scalar scale = coef_scale * max(Scalar(1), abs(y) * abs(y) * abs(y) * abs(y));
      if (abs(evaluate_polynomial(c, y)) <= Scalar(1e-9) * scale) candidates.push_back(y);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  for (Scalar y : candidates) {
    if (!out.roots.empty() && abs(y - out.roots.back()) <= Scalar(1e-7) * max(Scalar(1), abs(y))) {
      out.multiple = true;
      continue;
    }
    out.roots.push_back(y);
  }
  return out;
}

template <typename Scalar>
QuarticRoots<Scalar> quartic_real_roots(const AtddgReducedState<Scalar>& r) {
  validate(r);
  return real_quartic_roots(quartic_coefficients(r));
}

/// Terminal attacker-target separation when A and D meet at (0, y).  Target
/// on the defender side (xT <= 0) uses J1 (to be minimized), otherwise J2
/// (to be maximized).  The quadratic cost of the game is half its square.
template <typename Scalar>
Scalar payoff(const AtddgReducedState<Scalar>& r, Scalar y) {
  using std::hypot;
  if (!(r.xA > Scalar(0))) throw Error(ErrorCode::kDegenerateFrame, "xA must be positive");
  const Scalar travelled = r.alpha * hypot(r.xA, y);
  const Scalar to_aim = hypot(r.yT - y, r.xT);
  return r.xT <= Scalar(0) ? travelled + to_aim : travelled - to_aim;
}

template <typename Scalar>
struct AtddgSolution {
  Kind kind;
  Scalar aim_ordinate;
  std::vector<Scalar> roots;
  bool multiple_root;
  Scalar phi_star;  // target
  Scalar chi_star;  // attacker
  Scalar psi_star;  // defender
  std::optional<Scalar> varphi_star;
  Scalar payoff;
  Scalar tf;
  bool boundary_warning;
};

/// Game of degree in the escape region.
template <typename Scalar>
AtddgSolution<Scalar> solve_degree(const AtddgReducedState<Scalar>& r) {
  using std::abs;
  using std::atan2;
  using std::hypot;
  using std::max;
  using std::sqrt;
  const Kind kind = classify_kind(r);
  if (kind == Kind::kRc) {
    throw Error(ErrorCode::kCaptureRegion,
                "optimal strategies in the capture region are not part of this model");
  }
  const auto quartic = quartic_real_roots(r);

  AtddgSolution<Scalar> sol{};
  sol.kind = kind;
  sol.roots = quartic.roots;
  sol.multiple_root = quartic.multiple;
  sol.boundary_warning = kind == Kind::kB;

  // y1 is the root in [0, yT], y2 the root in [yT, inf).  A double root only
  // polishes to about sqrt(eps), so the band matches the merge tolerance.
  const Scalar band = Scalar(1e-7) * max(Scalar(1), r.yT);
  std::optional<Scalar> y1, y2;
  for (Scalar y : quartic.roots) {
    if (y >= -band && y <= r.yT + band) y1 = y;
    if (y >= r.yT - band && !y2) y2 = y;
  }

  const bool on_bisector = abs(r.xT) <= Scalar(1e-12) * r.xA;
  Scalar y;
  if (on_bisector) {
    y = r.yT;
    const Scalar varphi = atan2(sqrt(r.xA * r.xA + (Scalar(1) - r.alpha * r.alpha) * r.yT * r.yT),
                                r.alpha * r.yT);
    sol.varphi_star = varphi;
    sol.phi_star = geometry::wrap_angle(varphi + geometry::pi<Scalar>() / Scalar(2));
  } else {
    const auto& pick = r.xT < Scalar(0) ? y1 : y2;
    if (!pick) throw Error(ErrorCode::kOutOfModel, "quartic has no admissible real root");
    y = *pick;
    const Point2<Scalar> dir = r.xT < Scalar(0) ? Point2<Scalar>(r.xT, r.yT - y)
                                                : Point2<Scalar>(-r.xT, y - r.yT);
    sol.phi_star = geometry::heading_of(dir);
  }
  sol.aim_ordinate = y;
  sol.chi_star = geometry::heading_of(Point2<Scalar>(-r.xA, y));
  sol.psi_star = geometry::heading_of(Point2<Scalar>(r.xA, y));
  sol.tf = hypot(r.xA, y);
  sol.payoff = payoff(r, y);
  return sol;
}

template <typename Scalar>
struct FullHeadings {
  Scalar target;
  Scalar attacker;
  Scalar defender;
  AtddgSolution<Scalar> reduced;
  ReducedFrame<Scalar> frame;
};

/// Optimal headings for a state given in the full plane.
template <typename Scalar>
FullHeadings<Scalar> optimal_headings(const AtddgFullState<Scalar>& full) {
  const auto view = to_reduced_frame(full);
  const auto sol = solve_degree(view.state);
  return {view.frame.heading_to_full(sol.phi_star), view.frame.heading_to_full(sol.chi_star),
          view.frame.heading_to_full(sol.psi_star), sol, view.frame};
}

}  // namespace pursuit::atddg
