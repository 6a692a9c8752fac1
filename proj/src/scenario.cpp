#include "pursuit/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "pursuit/error.hpp"

namespace pursuit::scenario {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kInvalidInput, "field '" + field + "': " + why);
}

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

// Typed access to one JSON object with unknown-key rejection.
class Fields {
 public:
  Fields(const json& j, std::string path, std::initializer_list<const char*> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail(path_.empty() ? "<root>" : path_, "must be an object");
    for (const auto& [key, value] : j.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) fail(join(path_, key), "unknown field");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& at(const char* key) const { return j_.at(key); }
  std::string path(const char* key) const { return join(path_, key); }

  double number(const char* key) const {
    const json& v = at(key);
    if (!v.is_number()) fail(path(key), "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path(key), "must be finite");
    return d;
  }

  double positive(const char* key) const {
    const double d = number(key);
    if (!(d > 0)) fail(path(key), "must be positive");
    return d;
  }

  void positive_if(const char* key, double& out) const {
    if (has(key)) out = positive(key);
  }

  int integer(const char* key, int min) const {
    const json& v = at(key);
    if (!v.is_number_integer()) fail(path(key), "must be an integer");
    const auto i = v.get<long long>();
    if (i < min) fail(path(key), "must be >= " + std::to_string(min));
    if (i > 1000000000LL) fail(path(key), "is too large");
    return static_cast<int>(i);
  }

  std::string string(const char* key, std::initializer_list<const char*> choices) const {
    const json& v = at(key);
    if (!v.is_string()) fail(path(key), "must be a string");
    const auto s = v.get<std::string>();
    std::string list;
    for (const char* c : choices) {
      if (s == c) return s;
      list += (list.empty() ? "" : ", ") + std::string(c);
    }
    fail(path(key), "must be one of " + list);
  }

  bool boolean(const char* key) const {
    const json& v = at(key);
    if (!v.is_boolean()) fail(path(key), "must be true or false");
    return v.get<bool>();
  }

 private:
  const json& j_;
  std::string path_;
};

Point2d read_point(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    fail(path, "must be an array of two numbers");
  }
  const Point2d p(v[0].get<double>(), v[1].get<double>());
  if (!geometry::is_finite(p)) fail(path, "must be finite");
  return p;
}

AgentSpec read_agent(const json& v, const std::string& path) {
  Fields f(v, path, {"position", "speed"});
  if (!f.has("position")) fail(f.path("position"), "is required");
  if (!f.has("speed")) fail(f.path("speed"), "is required");
  return {read_point(f.at("position"), f.path("position")), f.positive("speed")};
}

std::vector<AgentSpec> read_agents(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "must be an array");
  std::vector<AgentSpec> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(read_agent(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Choice read_choice(const Fields& f, const char* key) {
  return f.string(key, {"first", "second"}) == "first" ? Choice::kFirst : Choice::kSecond;
}

SimSpec read_sim(const json& v) {
  Fields f(v, "sim",
           {"dt", "capture_radius", "max_time", "replan_every", "dispersal_policy",
            "force_initial_split", "evader_policy", "evader_heading", "pursuer_policy",
            "attacker_policy"});
  SimSpec s;
  f.positive_if("dt", s.dt);
  f.positive_if("capture_radius", s.capture_radius);
  if (f.has("max_time")) {
    s.max_time = f.number("max_time");
    if (s.max_time < 0) fail(f.path("max_time"), "must be non-negative");
  }
  if (f.has("replan_every")) s.replan_every = f.integer("replan_every", 1);
  if (f.has("dispersal_policy")) {
    Fields d(f.at("dispersal_policy"), f.path("dispersal_policy"), {"evader", "pursuers"});
    if (d.has("evader")) s.evader_dispersal = read_choice(d, "evader");
    if (d.has("pursuers")) s.pursuer_dispersal = read_choice(d, "pursuers");
  }
  if (f.has("force_initial_split")) s.force_initial_split = f.boolean("force_initial_split");
  if (f.has("evader_policy")) s.evader_policy = f.string("evader_policy", {"optimal", "constant"});
  if (f.has("evader_heading")) s.evader_heading = f.number("evader_heading");
  if (f.has("pursuer_policy")) {
    s.pursuer_policy = f.string("pursuer_policy", {"optimal", "pure_pursuit"});
  }
  if (f.has("attacker_policy")) {
    s.attacker_policy = f.string("attacker_policy", {"optimal", "pure_pursuit"});
  }
  return s;
}

GridSpec read_grid(const json& v) {
  Fields f(v, "grid", {"x_min", "x_max", "y_min", "y_max", "nx", "ny"});
  GridSpec g;
  if (f.has("x_min")) g.x_min = f.number("x_min");
  if (f.has("x_max")) g.x_max = f.number("x_max");
  if (f.has("y_min")) g.y_min = f.number("y_min");
  if (f.has("y_max")) g.y_max = f.number("y_max");
  if (f.has("nx")) g.nx = f.integer("nx", 1);
  if (f.has("ny")) g.ny = f.integer("ny", 1);
  if (!(g.x_max > g.x_min)) fail("grid.x_max", "must exceed grid.x_min (zero-area grid)");
  if (!(g.y_max > g.y_min)) fail("grid.y_max", "must exceed grid.y_min (zero-area grid)");
  return g;
}

VerifySpec read_verify(const json& v) {
  Fields f(v, "verify",
           {"mode", "samples", "threshold", "gradient_tolerance", "fd_step", "boundary_exclusion",
            "value_tolerance", "branch_gradient_tolerance", "beta_min", "beta_max",
            "position_bound"});
  VerifySpec s;
  if (f.has("mode")) {
    const auto m = f.string("mode", {"interior", "boundary", "corrupt_beta1"});
    s.mode = m == "interior" ? VerifyMode::kInterior
             : m == "boundary" ? VerifyMode::kBoundary
                               : VerifyMode::kCorruptBeta1;
  }
  if (f.has("samples")) s.samples = f.integer("samples", 1);
  f.positive_if("threshold", s.threshold);
  f.positive_if("gradient_tolerance", s.gradient_tolerance);
  f.positive_if("fd_step", s.fd_step);
  f.positive_if("boundary_exclusion", s.boundary_exclusion);
  f.positive_if("value_tolerance", s.value_tolerance);
  f.positive_if("branch_gradient_tolerance", s.branch_gradient_tolerance);
  f.positive_if("beta_min", s.beta_min);
  f.positive_if("beta_max", s.beta_max);
  f.positive_if("position_bound", s.position_bound);
  if (!(s.beta_min > 1)) fail("verify.beta_min", "must exceed 1");
  if (!(s.beta_max > s.beta_min)) fail("verify.beta_max", "must exceed verify.beta_min");
  return s;
}

AssignmentSpec read_assignment(const json& v) {
  Fields f(v, "assignment", {"team_sizes", "cap"});
  AssignmentSpec a;
  if (f.has("team_sizes")) {
    const json& t = f.at("team_sizes");
    if (!t.is_array()) fail(f.path("team_sizes"), "must be an array");
    std::vector<int> sizes;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::string p = f.path("team_sizes") + "[" + std::to_string(i) + "]";
      if (!t[i].is_number_integer()) fail(p, "must be 1 or 2");
      const auto n = t[i].get<long long>();
      if (n != 1 && n != 2) fail(p, "must be 1 or 2");
      sizes.push_back(static_cast<int>(n));
    }
    a.team_sizes = sizes;
  }
  f.positive_if("cap", a.cap);
  return a;
}

void forbid(const Fields& f, std::initializer_list<const char*> keys, Game g) {
  for (const char* k : keys) {
    if (f.has(k)) fail(k, std::string("is not used by game ") + to_string(g));
  }
}

ordered point_json(const Point2d& p) { return ordered::array({p.x(), p.y()}); }

ordered agent_json(const AgentSpec& a) {
  ordered j;
  j["position"] = point_json(a.position);
  j["speed"] = a.speed;
  return j;
}

const char* choice_name(Choice c) { return c == Choice::kFirst ? "first" : "second"; }

}  // namespace

const char* to_string(Game g) {
  switch (g) {
    case Game::kTwoCutters: return "two_cutters";
    case Game::kAtddg: return "atddg";
    case Game::kMultiAgent: return "multi_agent";
  }
  return "?";
}

const char* to_string(VerifyMode m) {
  switch (m) {
    case VerifyMode::kInterior: return "interior";
    case VerifyMode::kBoundary: return "boundary";
    case VerifyMode::kCorruptBeta1: return "corrupt_beta1";
  }
  return "?";
}

Scenario parse(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidInput, std::string("malformed JSON: ") + e.what());
  }
  Fields f(root, "",
           {"game", "name", "evader", "pursuers", "evaders", "target", "attacker", "defender",
            "alpha", "tolerances", "sim", "grid", "verify", "assignment", "seed"});
  if (!f.has("game")) fail("game", "is required");
  Scenario s;
  const auto game = f.string("game", {"two_cutters", "atddg", "multi_agent"});
  s.game = game == "two_cutters" ? Game::kTwoCutters
           : game == "atddg"     ? Game::kAtddg
                                 : Game::kMultiAgent;

  if (f.has("name")) {
    if (!f.at("name").is_string()) fail("name", "must be a string");
    s.name = f.at("name").get<std::string>();
  }

  switch (s.game) {
    case Game::kTwoCutters:
      forbid(f, {"evaders", "target", "attacker", "defender", "alpha", "assignment"}, s.game);
      if (f.has("evader")) s.evader = read_agent(f.at("evader"), "evader");
      if (f.has("pursuers")) {
        s.pursuers = read_agents(f.at("pursuers"), "pursuers");
        if (s.pursuers.size() != 2) fail("pursuers", "two_cutters needs exactly two pursuers");
      }
      if (s.evader && !f.has("pursuers")) fail("pursuers", "is required when an evader is given");
      break;
    case Game::kAtddg:
      forbid(f, {"evader", "pursuers", "evaders", "tolerances", "grid", "verify", "assignment"},
             s.game);
      for (const char* k : {"target", "attacker", "defender", "alpha"}) {
        if (!f.has(k)) fail(k, "is required");
      }
      s.target = read_point(f.at("target"), "target");
      s.attacker = read_point(f.at("attacker"), "attacker");
      s.defender = read_point(f.at("defender"), "defender");
      s.alpha = f.number("alpha");
      if (!(*s.alpha >= 0 && *s.alpha < 1)) fail("alpha", "must lie in [0, 1)");
      break;
    case Game::kMultiAgent:
      forbid(f, {"evader", "target", "attacker", "defender", "alpha", "sim", "grid", "verify"},
             s.game);
      if (!f.has("pursuers")) fail("pursuers", "is required");
      if (!f.has("evaders")) fail("evaders", "is required");
      s.pursuers = read_agents(f.at("pursuers"), "pursuers");
      s.evaders = read_agents(f.at("evaders"), "evaders");
      if (s.pursuers.empty()) fail("pursuers", "must not be empty");
      if (s.evaders.empty()) fail("evaders", "must not be empty");
      break;
  }

  if (f.has("tolerances")) {
    Fields t(f.at("tolerances"), "tolerances", {"boundary_slack", "dispersal"});
    TolerancesSpec tol;
    t.positive_if("boundary_slack", tol.boundary_slack);
    t.positive_if("dispersal", tol.dispersal);
    s.tolerances = tol;
  }
  if (f.has("sim")) s.sim = read_sim(f.at("sim"));
  if (f.has("grid")) s.grid = read_grid(f.at("grid"));
  if (f.has("verify")) s.verify = read_verify(f.at("verify"));
  if (f.has("assignment")) s.assignment = read_assignment(f.at("assignment"));
  if (f.has("seed")) {
    const json& v = f.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      fail("seed", "must be a non-negative integer");
    }
    s.seed = v.get<std::uint64_t>();
  }
  return s;
}

Scenario load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidInput, "cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string serialize(const Scenario& s) {
  ordered j;
  j["game"] = to_string(s.game);
  if (s.name) j["name"] = *s.name;
  if (s.evader) j["evader"] = agent_json(*s.evader);
  if (!s.pursuers.empty()) {
    j["pursuers"] = ordered::array();
    for (const auto& a : s.pursuers) j["pursuers"].push_back(agent_json(a));
  }
  if (!s.evaders.empty()) {
    j["evaders"] = ordered::array();
    for (const auto& a : s.evaders) j["evaders"].push_back(agent_json(a));
  }
  if (s.target) j["target"] = point_json(*s.target);
  if (s.attacker) j["attacker"] = point_json(*s.attacker);
  if (s.defender) j["defender"] = point_json(*s.defender);
  if (s.alpha) j["alpha"] = *s.alpha;
  if (s.tolerances) {
    j["tolerances"] = {{"boundary_slack", s.tolerances->boundary_slack},
                       {"dispersal", s.tolerances->dispersal}};
  }
  if (s.sim) {
    const auto& m = *s.sim;
    ordered sim;
    sim["dt"] = m.dt;
    sim["capture_radius"] = m.capture_radius;
    sim["max_time"] = m.max_time;
    sim["replan_every"] = m.replan_every;
    sim["dispersal_policy"] = {{"evader", choice_name(m.evader_dispersal)},
                               {"pursuers", choice_name(m.pursuer_dispersal)}};
    sim["force_initial_split"] = m.force_initial_split;
    sim["evader_policy"] = m.evader_policy;
    sim["evader_heading"] = m.evader_heading;
    sim["pursuer_policy"] = m.pursuer_policy;
    sim["attacker_policy"] = m.attacker_policy;
    j["sim"] = sim;
  }
  if (s.grid) {
    const auto& g = *s.grid;
    j["grid"] = {{"x_min", g.x_min}, {"x_max", g.x_max}, {"y_min", g.y_min},
                 {"y_max", g.y_max}, {"nx", g.nx},       {"ny", g.ny}};
  }
  if (s.verify) {
    const auto& v = *s.verify;
    ordered ver;
    ver["mode"] = to_string(v.mode);
    ver["samples"] = v.samples;
    ver["threshold"] = v.threshold;
    ver["gradient_tolerance"] = v.gradient_tolerance;
    ver["fd_step"] = v.fd_step;
    ver["boundary_exclusion"] = v.boundary_exclusion;
    ver["value_tolerance"] = v.value_tolerance;
    ver["branch_gradient_tolerance"] = v.branch_gradient_tolerance;
    ver["beta_min"] = v.beta_min;
    ver["beta_max"] = v.beta_max;
    ver["position_bound"] = v.position_bound;
    j["verify"] = ver;
  }
  if (s.assignment) {
    ordered a;
    if (s.assignment->team_sizes) a["team_sizes"] = *s.assignment->team_sizes;
    a["cap"] = s.assignment->cap;
    j["assignment"] = a;
  }
  if (s.seed) j["seed"] = *s.seed;
  return j.dump(2) + "\n";
}

}  // namespace pursuit::scenario
