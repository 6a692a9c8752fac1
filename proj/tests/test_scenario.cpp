#include <doctest.h>

#include <filesystem>
#include <random>
#include <string>

#include "pursuit/error.hpp"
#include "pursuit/scenario.hpp"

using namespace pursuit;
using namespace pursuit::scenario;

namespace {

// Random valid scenario exercising every optional section.
class ScenarioGen {
 public:
  explicit ScenarioGen(std::uint64_t seed) : rng_(seed) {}

  Scenario next() {
    Scenario s;
    s.game = static_cast<Game>(pick(3));
    if (coin()) s.name = "scenario " + std::to_string(pick(1000));
    switch (s.game) {
      case Game::kTwoCutters:
        if (coin()) {
          s.evader = agent();
          s.pursuers = {agent(), agent()};
        }
        if (coin()) s.grid = grid();
        if (coin()) s.verify = verify();
        break;
      case Game::kAtddg:
        s.target = point();
        s.attacker = point();
        s.defender = point();
        s.alpha = unit(rng_) * 0.999;
        break;
      case Game::kMultiAgent:
        for (int i = 0, n = 1 + pick(5); i < n; ++i) s.pursuers.push_back(agent());
        for (int i = 0, n = 1 + pick(3); i < n; ++i) s.evaders.push_back(agent());
        if (coin()) {
          AssignmentSpec a;
          if (coin()) {
            std::vector<int> sizes;
            for (std::size_t i = 0; i < s.evaders.size(); ++i) sizes.push_back(1 + pick(2));
            a.team_sizes = sizes;
          }
          a.cap = 1 + pick(100000);
          s.assignment = a;
        }
        break;
    }
    if (s.game != Game::kAtddg && coin()) s.tolerances = TolerancesSpec{positive(), positive()};
    if (s.game != Game::kMultiAgent && coin()) s.sim = sim();
    if (coin()) s.seed = rng_();
    return s;
  }

 private:
  bool coin() { return rng_() % 2 == 0; }
  int pick(int n) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }
  double real() { return std::uniform_real_distribution<double>(-1e3, 1e3)(rng_); }
  double positive() { return std::uniform_real_distribution<double>(1e-12, 10)(rng_); }
  Point2d point() { return {real(), real()}; }
  AgentSpec agent() { return {point(), positive()}; }

  SimSpec sim() {
    SimSpec m;
    m.dt = positive();
    m.capture_radius = positive();
    m.max_time = coin() ? 0.0 : positive();
    m.replan_every = 1 + pick(500);
    m.evader_dispersal = coin() ? Choice::kFirst : Choice::kSecond;
    m.pursuer_dispersal = coin() ? Choice::kFirst : Choice::kSecond;
    m.force_initial_split = coin();
    m.evader_policy = coin() ? "optimal" : "constant";
    m.evader_heading = real();
    m.pursuer_policy = coin() ? "optimal" : "pure_pursuit";
    m.attacker_policy = coin() ? "optimal" : "pure_pursuit";
    return m;
  }

  GridSpec grid() {
    GridSpec g;
    g.x_min = real();
    g.x_max = g.x_min + positive();
    g.y_min = real();
    g.y_max = g.y_min + positive();
    g.nx = 1 + pick(200);
    g.ny = 1 + pick(200);
    return g;
  }

  VerifySpec verify() {
    VerifySpec v;
    v.mode = static_cast<VerifyMode>(pick(3));
    v.samples = 1 + pick(100000);
    v.threshold = positive();
    v.gradient_tolerance = positive();
    v.fd_step = positive();
    v.boundary_exclusion = positive();
    v.value_tolerance = positive();
    v.branch_gradient_tolerance = positive();
    v.beta_min = 1 + positive();
    v.beta_max = v.beta_min + positive();
    v.position_bound = positive();
    return v;
  }

  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit{0.0, 1.0};
};

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidInput);
    return e.what();
  }
  return "";
}

const char* const kPair = R"({"game": "two_cutters",
  "evader": {"position": [7, -3], "speed": 0.76},
  "pursuers": [{"position": [0.5, -3], "speed": 1.05}, {"position": [1.5, -7], "speed": 1.1}]})";

}  // namespace

TEST_CASE("scenario: parse(serialize(s)) == s on random scenarios") {
  ScenarioGen gen(2024);
  for (int i = 0; i < 2000; ++i) {
    const Scenario s = gen.next();
    const std::string text = serialize(s);
    const Scenario back = parse(text);
    CHECK(back == s);
    CHECK(serialize(back) == text);
  }
}

TEST_CASE("scenario: shipped scenario files load and round trip") {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(PURSUIT_SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const Scenario s = load(entry.path().string());
    CHECK(parse(serialize(s)) == s);
    ++count;
  }
  CHECK(count >= 8);
}

TEST_CASE("scenario: fields and defaults") {
  const Scenario s = parse(kPair);
  CHECK(s.game == Game::kTwoCutters);
  REQUIRE(s.evader);
  CHECK(s.evader->speed == 0.76);
  CHECK(s.pursuers[1].position == Point2d(1.5, -7));
  CHECK_FALSE(s.sim);
  const Scenario withsim = parse(R"({"game": "atddg", "target": [0, 1], "attacker": [1, 0],
      "defender": [-1, 0], "alpha": 0.5, "sim": {"dt": 0.01}})");
  REQUIRE(withsim.sim);
  CHECK(withsim.sim->dt == 0.01);
  CHECK(withsim.sim->capture_radius == SimSpec{}.capture_radius);
  CHECK(withsim.sim->replan_every == 1);
}

TEST_CASE("scenario: errors name the offending field") {
  std::string text = kPair;
  text.replace(text.find("1.05"), 4, "0");
  CHECK(error_of(text).find("'pursuers[0].speed': must be positive") != std::string::npos);

  CHECK(error_of(R"({"game": "two_cutters", "extra": 1})").find("'extra': unknown field") !=
        std::string::npos);
  CHECK(error_of(R"({"game": "chess"})").find("'game'") != std::string::npos);
  CHECK(error_of(R"({"name": "x"})").find("'game': is required") != std::string::npos);
  CHECK(error_of(R"({"game": "atddg", "target": [0, 1], "attacker": [1, 0], "defender": [-1, 0],
      "alpha": 1.0})").find("'alpha'") != std::string::npos);
  CHECK(error_of(R"({"game": "atddg", "target": [0], "attacker": [1, 0], "defender": [-1, 0],
      "alpha": 0.5})").find("'target': must be an array of two numbers") != std::string::npos);
  CHECK(error_of(R"({"game": "two_cutters", "grid": {"x_min": 1, "x_max": 1}})")
            .find("zero-area") != std::string::npos);
  CHECK(error_of(R"({"game": "two_cutters", "sim": {"replan_every": 0}})")
            .find("'sim.replan_every'") != std::string::npos);
  CHECK(error_of(R"({"game": "two_cutters", "sim": {"dispersal_policy": {"evader": "third"}}})")
            .find("'sim.dispersal_policy.evader': must be one of first, second") != std::string::npos);
  CHECK(error_of(R"({"game": "multi_agent", "pursuers": [], "evaders": []})").find("'pursuers'") !=
        std::string::npos);
  CHECK(error_of(R"({"game": "multi_agent", "pursuers": [{"position": [0, 0], "speed": 2}],
      "evaders": [{"position": [1, 0], "speed": 1}], "alpha": 0.5})")
            .find("not used by game multi_agent") != std::string::npos);
  CHECK(error_of(R"({"game": "two_cutters", "seed": -4})").find("'seed'") != std::string::npos);
  CHECK(error_of(R"({"game": "two_cutters", "evader": {"position": [0, 0], "speed": 1}})")
            .find("'pursuers'") != std::string::npos);
}

TEST_CASE("scenario: syntax errors report line and column") {
  const std::string msg = error_of("{\n  \"game\": \"atddg\",\n  \"target\": [1, 2\n");
  CHECK(msg.find("line 4") != std::string::npos);
  CHECK(msg.find("column") != std::string::npos);
  CHECK_THROWS_AS(load("/nonexistent/scenario.json"), Error);
}
