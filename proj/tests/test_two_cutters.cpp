#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pursuit/two_cutters.hpp"

using namespace pursuit;
using namespace pursuit::two_cutters;
using oracle::P2;
using State = TwoCuttersState<double>;

namespace {

State fixture_pair(int first, int second, int evader) {
  const auto& p = oracle::fixture_pursuers();
  const auto& e = oracle::fixture_evaders();
  const auto& ev = e[evader - 1];
  return State::from_speeds(ev.position, ev.speed, p[first - 1].position, p[first - 1].speed,
                            p[second - 1].position, p[second - 1].speed);
}

State mirror_state() { return {P2(0, 0), P2(0, 3), P2(0, -3), 1.5, 1.5, 1.0}; }

bool on_shorter_arc(double phi, double a, double b) {
  const double span = geometry::wrap_angle(b - a);
  const double off = geometry::wrap_angle(phi - a);
  return span >= 0 ? (off >= -1e-12 && off <= span + 1e-12) : (off <= 1e-12 && off >= span - 1e-12);
}

}  // namespace

TEST_CASE("capture_time_vs_heading: tail chase and head-on") {
  const State s{P2(4, 1), P2(-2, 3), P2(9, 9), 1.4, 1.7, 1.0};
  const double r = (s.evader - s.pursuer1).norm();
  const double lambda = geometry::heading_of<double>(s.evader - s.pursuer1);
  CHECK(capture_time_vs_heading(s, 1, lambda) == doctest::Approx(r / 0.4).epsilon(1e-13));
  CHECK(capture_time_vs_heading(s, 1, lambda + oracle::kPi) ==
        doctest::Approx(r / 2.4).epsilon(1e-13));
}

TEST_CASE("capture_time_vs_heading: pure-pursuit fixture cell") {
  const State s = fixture_pair(1, 2, 1);
  const double lambda = geometry::heading_of<double>(s.evader - s.pursuer1);
  const double t = capture_time_vs_heading(s, 1, lambda);
  CHECK(t == doctest::Approx(std::sqrt(41.0) / (1.3 / 0.98 - 1)).epsilon(1e-13));
  CHECK(t == doctest::Approx(19.610).epsilon(1e-4));
  CHECK(t / 0.98 == doctest::Approx(20.01).epsilon(5e-4));
}

TEST_CASE("capture_time_vs_heading: agrees with the interception quadratic") {
  oracle::StateSampler gen(21);
  std::uniform_real_distribution<double> heading(-oracle::kPi, oracle::kPi);
  for (int i = 0; i < 2000; ++i) {
    const State s = gen.two_cutters();
    const double phi = heading(gen.engine());
    for (int k = 1; k <= 2; ++k) {
      const double expected = oracle::intercept_time(s.evader, s.pursuer(k), s.beta(k), phi);
      CHECK(capture_time_vs_heading(s, k, phi) == doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("capture_time_vs_heading: collocated pursuer gives zero") {
  const State s{P2(1, 1), P2(1, 1), P2(5, 5), 1.5, 1.5, 1.0};
  CHECK(capture_time_vs_heading(s, 1, 0.3) == 0.0);
}

TEST_CASE("classify_region: fixture cells and limits") {
  CHECK(classify_region(fixture_pair(1, 2, 1)) == Region::kR1);
  CHECK(classify_region(fixture_pair(4, 5, 3)) == Region::kRs);
  CHECK(classify_region(fixture_pair(2, 4, 2)) == Region::kR1);
  CHECK(classify_region(fixture_pair(4, 5, 1)) == Region::kR2);

  const State dominant{P2(0, 0), P2(-5, 0), P2(5, 1), 1.2, 50.0, 1.0};
  CHECK(classify_region(dominant) == Region::kR2);
  CHECK(classify_region(mirror_state()) == Region::kDispersal);
}

TEST_CASE("classify_region: rejects slow pursuers") {
  State s = mirror_state();
  s.beta2 = 1.0;
  CHECK_THROWS_AS(classify_region(s), Error);
  CHECK_THROWS_AS(solve(s), Error);
}

TEST_CASE("solve: single capture returns pure pursuit") {
  const State s = fixture_pair(1, 2, 1);
  const auto sol = solve(s);
  const double lambda1 = geometry::heading_of<double>(s.evader - s.pursuer1);
  CHECK(sol.region == Region::kR1);
  CHECK(sol.phi_star == doctest::Approx(lambda1));
  CHECK(sol.psi1_star == doctest::Approx(lambda1));
  CHECK_FALSE(sol.aimpoint.has_value());
  CHECK(sol.capture_time == doctest::Approx(std::sqrt(41.0) / ((1.3 / 0.98 - 1) * 0.98)));
}

TEST_CASE("solve: distant single pursuer cell") {
  const auto sol = solve(fixture_pair(4, 5, 1));
  CHECK(sol.region == Region::kR2);
  const double expected = std::sqrt(186.25) / ((1.1 / 0.98 - 1) * 0.98);
  CHECK(sol.capture_time == doctest::Approx(expected).epsilon(1e-12));
  CHECK(std::abs(sol.capture_time - 113.73) <= 0.01);
}

TEST_CASE("solve: simultaneous capture cell") {
  const State s = fixture_pair(4, 5, 3);
  const auto sol = solve(s);
  REQUIRE(sol.region == Region::kRs);
  REQUIRE(sol.aimpoint);
  CHECK(std::abs(sol.capture_time - 19.97) <= 0.01);
  const auto best = oracle::refined_best_heading(s);
  CHECK(sol.capture_time == doctest::Approx(best.time / s.evader_speed).epsilon(1e-9));
}

TEST_CASE("solve: simultaneous-region invariants on sampled states") {
  oracle::StateSampler gen(5);
  int rs = 0;
  for (int i = 0; i < 3000 && rs < 400; ++i) {
    const State s = gen.two_cutters();
    const auto sol = solve(s);
    if (sol.region != Region::kRs) continue;
    ++rs;
    REQUIRE(sol.aimpoint);
    const double tf = sol.capture_time * s.evader_speed;
    CHECK(std::abs(sol.tf1 - sol.tf2) <= 1e-9 * tf);
    const P2 aim = *sol.aimpoint;
    for (int k = 1; k <= 2; ++k) {
      const double to_p = (aim - s.pursuer(k)).norm();
      CHECK(std::abs(s.beta(k) * (aim - s.evader).norm() - to_p) <= 1e-9 * to_p);
    }
    const double l1 = geometry::heading_of<double>(s.evader - s.pursuer1);
    const double l2 = geometry::heading_of<double>(s.evader - s.pursuer2);
    CHECK(on_shorter_arc(sol.phi_star, l1, l2));
  }
  CHECK(rs >= 100);
}

TEST_CASE("solve: evader heading matches a brute-force max-min search") {
  oracle::StateSampler gen(99);
  int rs = 0;
  while (rs < 25) {
    const State s = gen.two_cutters();
    if (classify_region(s) != Region::kRs) continue;
    ++rs;
    const auto sol = solve(s);
    const auto grid = oracle::grid_best_heading(s, 1e-3);
    CHECK(oracle::guaranteed_time(s, sol.phi_star) >= grid.time * (1 - 1e-6));
  }
}

TEST_CASE("solve: captured state yields a zero-time solution") {
  const State s{P2(2, 2), P2(7, 1), P2(2, 2), 1.3, 1.3, 1.0};
  const auto sol = solve(s);
  CHECK(sol.capture_time == 0.0);
  CHECK(sol.region == Region::kR2);
}

TEST_CASE("solve: common speed scaling divides the time") {
  oracle::StateSampler gen(8);
  for (int i = 0; i < 200; ++i) {
    const State base = gen.two_cutters();
    const double ve = 0.7, k = 2.5;
    const auto make = [&](double scale) {
      return State::from_speeds(base.evader, ve * scale, base.pursuer1, base.beta1 * ve * scale,
                                base.pursuer2, base.beta2 * ve * scale);
    };
    const auto a = solve(make(1.0));
    const auto b = solve(make(k));
    CHECK(a.region == b.region);
    CHECK(a.phi_star == doctest::Approx(b.phi_star).epsilon(1e-12));
    CHECK(a.psi1_star == doctest::Approx(b.psi1_star).epsilon(1e-12));
    CHECK(b.capture_time == doctest::Approx(a.capture_time / k).epsilon(1e-12));
  }
}

TEST_CASE("value: single-capture branch closed form") {
  const State s = fixture_pair(1, 2, 1);
  const auto rep = value(s);
  const P2 d = s.evader - s.pursuer1;
  CHECK(rep.region == Region::kR1);
  CHECK(rep.value == doctest::Approx(d.norm() / (s.beta1 - 1)));
  const double lambda = std::atan2(d.y(), d.x());
  CHECK(rep.gradient[0] == doctest::Approx(std::cos(lambda) / (s.beta1 - 1)));
  CHECK(rep.gradient[1] == doctest::Approx(std::sin(lambda) / (s.beta1 - 1)));
  CHECK(rep.gradient[2] == doctest::Approx(-std::cos(lambda) / (s.beta1 - 1)));
  CHECK(rep.gradient[4] == 0.0);
  CHECK(std::abs(rep.hji_residual) <= 1e-12);
}

TEST_CASE("value: residual, sign and finite-difference properties") {
  oracle::StateSampler gen(17);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    const State s = gen.two_cutters();
    if (classify_region(s) == Region::kDispersal) continue;
    const auto rep = value(s);
    CHECK(std::abs(rep.hji_residual) <= 1e-9);
    if (rep.region == Region::kRs) {
      CHECK((rep.f1 > 0) != (rep.f2 > 0));
      CHECK(rep.q1 > 0);
      CHECK(rep.q2 > 0);
    }
    if (region_margin(s) < 1e-3) continue;
    const auto v_of = [&](const Vector6<double>& x) { return value(s.with_coordinates(x)).value; };
    const auto fd = oracle::central_gradient(v_of, s.coordinates(), 1e-6);
    CHECK((rep.gradient - fd).norm() <= 1e-5 * std::max(1.0, fd.norm()));
    ++checked;
  }
  CHECK(checked > 1000);
}

TEST_CASE("value: dispersal state is a non-smooth point") {
  try {
    value(mirror_state());
    FAIL("expected non-smooth point");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonSmoothPoint);
  }
}

TEST_CASE("value: both branches agree on the R1/Rs boundary") {
  oracle::StateSampler gen(31);
  int used = 0;
  for (int i = 0; i < 2000 && used < 100; ++i) {
    const State s = gen.r1_rs_boundary();
    const auto t = detail::pure_pursuit_times(s);
    if (t.t22 <= t.t12) continue;
    const auto cand = dispersal_candidates(s);
    const auto& far = cand.candidates[0].time >= cand.candidates[1].time ? cand.candidates[0]
                                                                          : cand.candidates[1];
    const auto single = single_capture_branch(s, 1);
    const auto simul = simultaneous_branch(s, geometry::heading_of<double>(far.aimpoint - s.evader));
    CHECK(std::abs(single.value - simul.value) <= 1e-9 * single.value);
    CHECK((single.gradient - simul.gradient).norm() <= 1e-8 * single.gradient.norm());
    ++used;
  }
  CHECK(used == 100);
}

TEST_CASE("dispersal_candidates: mirror configuration") {
  const State s = mirror_state();
  const auto cand = dispersal_candidates(s);
  CHECK(cand.equidistant);
  CHECK(cand.candidates[0].time == doctest::Approx(cand.candidates[1].time).epsilon(1e-12));
  CHECK(cand.candidates[0].aimpoint.x() == doctest::Approx(-cand.candidates[1].aimpoint.x()));
  CHECK(cand.candidates[0].aimpoint.y() == doctest::Approx(cand.candidates[1].aimpoint.y()));
  // The pursuer axis points down, so the tie-break frame's ordinate is +x.
  CHECK(cand.candidates[0].aimpoint.x() > 0);

  const auto first = solve(s);
  REQUIRE(first.region == Region::kDispersal);
  REQUIRE(first.alternate);
  CHECK(first.aimpoint->isApprox(cand.candidates[0].aimpoint));
  CHECK(first.alternate->aimpoint->isApprox(cand.candidates[1].aimpoint));

  SolveOptions<double> opt;
  opt.dispersal_primary = DispersalChoice::kSecond;
  const auto second = solve(s, opt);
  CHECK(second.aimpoint->isApprox(cand.candidates[1].aimpoint));
}

TEST_CASE("dispersal_candidates: worked example is not on the surface") {
  const State s{P2(5, 0), P2(0, 0), P2(24, -4), 1.25, 1.3125, 1.0};
  const auto cand = dispersal_candidates(s);
  CHECK_FALSE(cand.equidistant);
  CHECK(cand.candidates[0].aimpoint.y() > 0);
  CHECK(cand.candidates[0].time == doctest::Approx(14.0031).epsilon(1e-4));
  CHECK(cand.candidates[1].time == doctest::Approx(11.6518).epsilon(1e-4));
  CHECK(classify_region(s) == Region::kRs);
}

TEST_CASE("dispersal_candidates: tangent or separate circles are rejected") {
  // P2's circle swallows P1's: no lens, and P1 captures alone.
  const State s{P2(0, 0), P2(-1, 0), P2(-40, 0), 1.5, 1.1, 1.0};
  REQUIRE(detail::lens_corners(s).count == 0);
  try {
    dispersal_candidates(s);
    FAIL("expected not-in-Rs");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotInSimultaneousRegion);
  }
  CHECK(classify_region(s) == Region::kR1);
}
