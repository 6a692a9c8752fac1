#pragma once

// Planar primitives shared by both games: line-of-sight quantities and
// Apollonius circles.  Everything is templated on the scalar type so the
// same code runs in double for production and long double in test oracles.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>

#include "pursuit/error.hpp"

namespace pursuit::geometry {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
Scalar pi() {
  return std::numbers::pi_v<Scalar>;
}

// Reduces an angle to (-pi, pi].
template <typename Scalar>
Scalar wrap_angle(Scalar angle) {
  using std::remainder;
  Scalar wrapped = remainder(angle, Scalar(2) * pi<Scalar>());
  if (wrapped <= -pi<Scalar>()) wrapped += Scalar(2) * pi<Scalar>();
  return wrapped;
}

template <typename Scalar>
Scalar heading_of(const Point2<Scalar>& direction) {
  using std::atan2;
  return wrap_angle(atan2(direction.y(), direction.x()));
}

template <typename Scalar>
Point2<Scalar> unit_heading(Scalar angle) {
  using std::cos;
  using std::sin;
  return Point2<Scalar>(cos(angle), sin(angle));
}

template <typename Scalar>
bool is_finite(const Point2<Scalar>& p) {
  using std::isfinite;
  return isfinite(p.x()) && isfinite(p.y());
}

template <typename Scalar>
void require_finite(const Point2<Scalar>& p, const char* what) {
  if (!is_finite(p)) {
    throw Error(ErrorCode::kInvalidInput, std::string(what) + " has a non-finite coordinate");
  }
}

/// Bearing and distance from a pursuer to an evader.  `angle` is the
/// four-quadrant arctangent of (evader - pursuer).
template <typename Scalar>
struct LineOfSight {
  Scalar angle;
  Scalar range;
};

/// Returns nullopt when the two points coincide (capture has occurred and the
/// bearing is undefined).
template <typename Scalar>
std::optional<LineOfSight<Scalar>> line_of_sight(const Point2<Scalar>& pursuer,
                                                 const Point2<Scalar>& evader) {
  require_finite(pursuer, "pursuer");
  require_finite(evader, "evader");
  const Point2<Scalar> d = evader - pursuer;
  const Scalar range = d.norm();
  if (range == Scalar(0)) return std::nullopt;
  return LineOfSight<Scalar>{heading_of(d), range};
}

template <typename Scalar>
struct Circle {
  Point2<Scalar> center;
  Scalar radius;
};

/// Locus of points an evader and a faster pursuer reach simultaneously.
/// `center_offset` is the distance from the evader to the center; the radius
/// is beta times that offset.
template <typename Scalar>
struct ApolloniusCircle : Circle<Scalar> {
  Scalar center_offset;
};

template <typename Scalar>
ApolloniusCircle<Scalar> apollonius_circle(const Point2<Scalar>& evader,
                                           const Point2<Scalar>& pursuer, Scalar beta) {
  using std::isfinite;
  if (!(beta > Scalar(1)) || !isfinite(beta)) {
    throw Error(ErrorCode::kInvalidSpeedRatio, "apollonius_circle requires beta > 1");
  }
  const auto los = line_of_sight(pursuer, evader);
  if (!los) throw Error(ErrorCode::kZeroRange, "evader and pursuer coincide");
  const Scalar offset = los->range / (beta * beta - Scalar(1));
  const Point2<Scalar> away = (evader - pursuer) / los->range;
  ApolloniusCircle<Scalar> circle;
  circle.center = evader + offset * away;
  circle.radius = beta * offset;
  circle.center_offset = offset;
  return circle;
}

template <typename Scalar>
struct CircleIntersection {
  enum class Kind { kNone, kTangent, kTwo, kCoincident };

  Kind kind = Kind::kNone;
  std::array<Point2<Scalar>, 2> storage{};
  int count = 0;

  std::span<const Point2<Scalar>> points() const {
    return std::span<const Point2<Scalar>>(storage.data(), static_cast<std::size_t>(count));
  }
};

/// Radical-line intersection.  Two points come back larger-y first (ties
/// broken by larger x).  A discriminant within 1e-12 (r1 + r2)^2 of zero is
/// reported as a single tangent point.
template <typename Scalar>
CircleIntersection<Scalar> circle_intersections(const Circle<Scalar>& c1, const Circle<Scalar>& c2) {
  using std::abs;
  using std::max;
  using std::sqrt;
  using Result = CircleIntersection<Scalar>;
  Result result;

  const Point2<Scalar> delta = c2.center - c1.center;
  const Scalar d = delta.norm();
  const Scalar scale = c1.radius + c2.radius;
  if (d == Scalar(0)) {
    result.kind = (c1.radius == c2.radius) ? Result::Kind::kCoincident : Result::Kind::kNone;
    return result;
  }

  // Distance from c1 along the center line to the radical line.
  const Scalar along = (c1.radius * c1.radius - c2.radius * c2.radius + d * d) / (Scalar(2) * d);
  const Scalar h2 = c1.radius * c1.radius - along * along;
  const Point2<Scalar> axis = delta / d;
  const Point2<Scalar> foot = c1.center + along * axis;

  if (abs(h2) <= Scalar(1e-12) * scale * scale) {
    result.kind = Result::Kind::kTangent;
    result.storage[0] = foot;
    result.count = 1;
    return result;
  }
  if (h2 < Scalar(0)) return result;

  const Scalar h = sqrt(h2);
  const Point2<Scalar> normal(-axis.y(), axis.x());
  Point2<Scalar> a = foot + h * normal;
  Point2<Scalar> b = foot - h * normal;
  const Scalar tie = Scalar(1e-12) * max(scale, Scalar(1));
  const bool a_first =
      (a.y() > b.y() + tie) || (abs(a.y() - b.y()) <= tie && a.x() > b.x());
  if (!a_first) std::swap(a, b);
  result.kind = Result::Kind::kTwo;
  result.storage = {a, b};
  result.count = 2;
  return result;
}

}  // namespace pursuit::geometry
