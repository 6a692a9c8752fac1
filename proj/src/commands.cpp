#include "pursuit/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pursuit/assignment.hpp"
#include "pursuit/atddg.hpp"
#include "pursuit/error.hpp"
#include "pursuit/sim.hpp"
#include "pursuit/two_cutters.hpp"
#include "pursuit/verify.hpp"

namespace pursuit::commands {

namespace {

using json = nlohmann::ordered_json;
using scenario::Game;
using scenario::Scenario;
using TcState = two_cutters::TwoCuttersState<double>;
using Point2d = geometry::Point2<double>;

// ---------------------------------------------------------------------------
// Cell values and the three renderings

// kFixed: times, lengths and angles (two decimals in table precision).
// kSci: residuals and other small diagnostics (three significant digits).
enum class Style { kFixed, kSci };

struct Value {
  std::variant<std::monostate, std::string, double, long long, bool> v;
  Style style = Style::kFixed;
};

Value none() { return {}; }
Value text(std::string s) { return {std::move(s)}; }
Value fixed(double x) { return {x, Style::kFixed}; }
Value sci(double x) { return {x, Style::kSci}; }
Value integer(long long i) { return {i}; }
Value flag(bool b) { return {b}; }
Value fixed_or_none(const std::optional<double>& x) { return x ? fixed(*x) : none(); }

std::string shortest(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string printf_double(const char* fmt, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

class Renderer {
 public:
  explicit Renderer(Precision p) : p_(p) {}

  std::string str(const Value& val) const {
    return std::visit(
        [&](const auto& x) -> std::string {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, std::monostate>) {
            return "";
          } else if constexpr (std::is_same_v<T, std::string>) {
            return x;
          } else if constexpr (std::is_same_v<T, double>) {
            if (p_ == Precision::kFull || !std::isfinite(x)) return shortest(x);
            return printf_double(val.style == Style::kFixed ? "%.2f" : "%.3e", x);
          } else if constexpr (std::is_same_v<T, long long>) {
            return std::to_string(x);
          } else {
            return x ? "true" : "false";
          }
        },
        val.v);
  }

  json js(const Value& val) const {
    return std::visit(
        [&](const auto& x) -> json {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, std::monostate>) {
            return nullptr;
          } else if constexpr (std::is_same_v<T, double>) {
            if (p_ == Precision::kTable && val.style == Style::kFixed && std::isfinite(x)) {
              return std::round(x * 100.0) / 100.0;
            }
            return x;
          } else {
            return x;
          }
        },
        val.v);
  }

 private:
  Precision p_;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Value>> rows;
};

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render_csv(const Table& t, const Renderer& r) {
  std::string out;
  const auto line = [&](const auto& cells, auto&& to_text) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(to_text(cells[i]));
    }
    out += '\n';
  };
  line(t.header, [](const std::string& s) { return s; });
  for (const auto& row : t.rows) line(row, [&](const Value& v) { return r.str(v); });
  return out;
}

std::string render_aligned(const std::vector<std::vector<std::string>>& lines) {
  std::vector<std::size_t> width;
  for (const auto& l : lines) {
    if (width.size() < l.size()) width.resize(l.size(), 0);
    for (std::size_t i = 0; i < l.size(); ++i) width[i] = std::max(width[i], l[i].size());
  }
  std::string out;
  for (const auto& l : lines) {
    std::string row;
    for (std::size_t i = 0; i < l.size(); ++i) {
      row += l[i];
      if (i + 1 < l.size()) row += std::string(width[i] - l[i].size() + 2, ' ');
    }
    out += row + '\n';
  }
  return out;
}

std::string render_table(const Table& t, const Renderer& r) {
  std::vector<std::vector<std::string>> lines{t.header};
  for (const auto& row : t.rows) {
    std::vector<std::string> l;
    for (const auto& v : row) l.push_back(r.str(v));
    lines.push_back(std::move(l));
  }
  return render_aligned(lines);
}

json rows_json(const Table& t, const Renderer& r) {
  json arr = json::array();
  for (const auto& row : t.rows) {
    json o = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) o[t.header[i]] = r.js(row[i]);
    arr.push_back(std::move(o));
  }
  return arr;
}

// One record as key/value lines, a one-row CSV or a flat JSON object.
using Record = std::vector<std::pair<std::string, Value>>;

json record_json(const Record& rec, const Renderer& r) {
  json o = json::object();
  for (const auto& [k, v] : rec) o[k] = r.js(v);
  return o;
}

std::string render_record(const Record& rec, Format f, const Renderer& r) {
  if (f == Format::kJson) return record_json(rec, r).dump(2) + "\n";
  if (f == Format::kCsv) {
    Table t;
    t.rows.emplace_back();
    for (const auto& [k, v] : rec) {
      t.header.push_back(k);
      t.rows.back().push_back(v);
    }
    return render_csv(t, r);
  }
  std::vector<std::vector<std::string>> lines;
  for (const auto& [k, v] : rec) lines.push_back({k, r.str(v)});
  return render_aligned(lines);
}

std::string render_rows(const Table& t, Format f, const Renderer& r) {
  switch (f) {
    case Format::kCsv: return render_csv(t, r);
    case Format::kTable: return render_table(t, r);
    case Format::kJson: return rows_json(t, r).dump(2) + "\n";
  }
  return "";
}

std::string notes_text(const Record& rec, const Renderer& r) {
  std::string out;
  for (const auto& [k, v] : rec) out += k + ": " + r.str(v) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Scenario access

[[noreturn]] void input_error(const std::string& msg) { throw Error(ErrorCode::kInvalidInput, msg); }

void require_game(const Scenario& s, Command c, std::initializer_list<Game> games) {
  for (Game g : games) {
    if (s.game == g) return;
  }
  input_error(std::string("command ") + to_string(c) + " does not apply to game " +
              scenario::to_string(s.game));
}

two_cutters::Tolerances<double> tolerances(const Scenario& s) {
  two_cutters::Tolerances<double> tol;
  if (s.tolerances) {
    tol.boundary_slack = s.tolerances->boundary_slack;
    tol.dispersal = s.tolerances->dispersal;
  }
  return tol;
}

two_cutters::DispersalChoice choice(scenario::Choice c) {
  return c == scenario::Choice::kFirst ? two_cutters::DispersalChoice::kFirst
                                       : two_cutters::DispersalChoice::kSecond;
}

TcState two_cutters_state(const Scenario& s) {
  if (!s.evader || s.pursuers.size() != 2) {
    input_error("this command needs an 'evader' and two 'pursuers'");
  }
  const auto& e = *s.evader;
  return TcState::from_speeds(e.position, e.speed, s.pursuers[0].position, s.pursuers[0].speed,
                              s.pursuers[1].position, s.pursuers[1].speed);
}

atddg::AtddgFullState<double> atddg_state(const Scenario& s) {
  return {*s.target, *s.attacker, *s.defender, *s.alpha};
}

assignment::MultiAgentScenario multi_agent(const Scenario& s) {
  assignment::MultiAgentScenario m;
  for (const auto& p : s.pursuers) m.pursuers.push_back({p.position, p.speed});
  for (const auto& e : s.evaders) m.evaders.push_back({e.position, e.speed});
  return m;
}

sim::SimConfig sim_config(const Scenario& s) {
  const scenario::SimSpec spec = s.sim.value_or(scenario::SimSpec{});
  sim::SimConfig cfg;
  cfg.dt = spec.dt;
  cfg.capture_radius = spec.capture_radius;
  cfg.max_time = spec.max_time;
  cfg.replan_every = spec.replan_every;
  cfg.dispersal_policy = {choice(spec.evader_dispersal), choice(spec.pursuer_dispersal)};
  cfg.force_initial_split = spec.force_initial_split;
  return cfg;
}

std::string case_label(two_cutters::Region r) {
  switch (r) {
    case two_cutters::Region::kR1: return "1";
    case two_cutters::Region::kR2: return "2";
    default: return "s";
  }
}

// ---------------------------------------------------------------------------
// solve

void add_point(Record& rec, const std::string& key, const std::optional<Point2d>& p) {
  rec.emplace_back(key + "_x", p ? fixed(p->x()) : none());
  rec.emplace_back(key + "_y", p ? fixed(p->y()) : none());
}

Record solve_two_cutters(const Scenario& s) {
  const TcState st = two_cutters_state(s);
  two_cutters::SolveOptions<double> opt;
  opt.tolerances = tolerances(s);
  if (s.sim) opt.dispersal_primary = choice(s.sim->evader_dispersal);
  const auto sol = two_cutters::solve(st, opt);
  const bool captured = sol.capture_time == 0.0;

  Record rec;
  rec.emplace_back("game", text("two_cutters"));
  rec.emplace_back("region", text(captured ? "captured" : two_cutters::to_string(sol.region)));
  rec.emplace_back("case", text(case_label(sol.region)));
  rec.emplace_back("capture_time", fixed(sol.capture_time));
  rec.emplace_back("tf1", fixed(sol.tf1));
  rec.emplace_back("tf2", fixed(sol.tf2));
  rec.emplace_back("phi_star", fixed(sol.phi_star));
  rec.emplace_back("psi1_star", fixed(sol.psi1_star));
  rec.emplace_back("psi2_star", fixed(sol.psi2_star));
  add_point(rec, "aimpoint", sol.aimpoint);
  const auto& alt = sol.alternate;
  rec.emplace_back("alternate_phi", alt ? fixed(alt->phi) : none());
  rec.emplace_back("alternate_psi1", alt ? fixed(alt->psi1) : none());
  rec.emplace_back("alternate_psi2", alt ? fixed(alt->psi2) : none());
  add_point(rec, "alternate_aimpoint", alt ? alt->aimpoint : std::nullopt);

  // The gradient exists off the dispersal surface only.
  std::optional<two_cutters::ValueReport<double>> rep;
  if (!captured && sol.region != two_cutters::Region::kDispersal) {
    rep = two_cutters::value(st, opt.tolerances);
  }
  rec.emplace_back("value", rep ? fixed(rep->value) : none());
  static const char* const kCoord[6] = {"x_E", "y_E", "x_P1", "y_P1", "x_P2", "y_P2"};
  for (int i = 0; i < 6; ++i) {
    rec.emplace_back(std::string("dV_d") + kCoord[i], rep ? sci(rep->gradient[i]) : none());
  }
  rec.emplace_back("f1", rep ? sci(rep->f1) : none());
  rec.emplace_back("f2", rep ? sci(rep->f2) : none());
  rec.emplace_back("q1", rep ? sci(rep->q1) : none());
  rec.emplace_back("q2", rep ? sci(rep->q2) : none());
  rec.emplace_back("hji_residual", rep ? sci(rep->hji_residual) : none());
  return rec;
}

Record solve_atddg(const Scenario& s) {
  const auto full = atddg_state(s);
  const auto h = atddg::optimal_headings(full);
  const auto view = atddg::to_reduced_frame(full);
  const auto& sol = h.reduced;
  const auto& r = view.state;

  Record rec;
  rec.emplace_back("game", text("atddg"));
  rec.emplace_back("kind", text(atddg::to_string(sol.kind)));
  rec.emplace_back("xA", fixed(r.xA));
  rec.emplace_back("xT", fixed(r.xT));
  rec.emplace_back("yT", fixed(r.yT));
  rec.emplace_back("alpha", fixed(r.alpha));
  rec.emplace_back("critical_alpha", fixed(atddg::critical_speed_ratio(r.xA, r.xT, r.yT)));
  rec.emplace_back("root_count", integer(static_cast<long long>(sol.roots.size())));
  for (std::size_t i = 0; i < 4; ++i) {
    rec.emplace_back("root" + std::to_string(i + 1),
                     i < sol.roots.size() ? fixed(sol.roots[i]) : none());
  }
  rec.emplace_back("multiple_root", flag(sol.multiple_root));
  rec.emplace_back("aim_ordinate", fixed(sol.aim_ordinate));
  add_point(rec, "aimpoint", h.frame.to_full(Point2d(0.0, sol.aim_ordinate)));
  rec.emplace_back("payoff", fixed(sol.payoff));
  rec.emplace_back("tf", fixed(sol.tf));
  rec.emplace_back("phi_star", fixed(sol.phi_star));
  rec.emplace_back("chi_star", fixed(sol.chi_star));
  rec.emplace_back("psi_star", fixed(sol.psi_star));
  rec.emplace_back("varphi_star", fixed_or_none(sol.varphi_star));
  rec.emplace_back("target_heading", fixed(h.target));
  rec.emplace_back("attacker_heading", fixed(h.attacker));
  rec.emplace_back("defender_heading", fixed(h.defender));
  rec.emplace_back("boundary_warning", flag(sol.boundary_warning));
  return rec;
}

Output cmd_solve(const Scenario& s, Format f, const Renderer& r) {
  require_game(s, Command::kSolve, {Game::kTwoCutters, Game::kAtddg});
  Record rec = s.game == Game::kTwoCutters ? solve_two_cutters(s) : solve_atddg(s);
  if (s.name) rec.insert(rec.begin(), {"name", text(*s.name)});
  return {render_record(rec, f, r), "", kExitOk};
}

// ---------------------------------------------------------------------------
// regions

Output cmd_regions(const Scenario& s, Format f, const Renderer& r) {
  require_game(s, Command::kRegions, {Game::kTwoCutters});
  if (s.pursuers.size() != 2) input_error("regions needs two 'pursuers'");
  const scenario::GridSpec g = s.grid.value_or(scenario::GridSpec{});
  if (!(g.x_max > g.x_min) || !(g.y_max > g.y_min) || g.nx < 1 || g.ny < 1) {
    input_error("grid has zero area");
  }
  const double ve = s.evader ? s.evader->speed : 1.0;
  const auto tol = tolerances(s);
  const auto coord = [](double lo, double hi, int n, int i) {
    return n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1);
  };

  Table t{{"x", "y", "label"}, {}};
  std::map<std::string, long long> counts;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const Point2d e(coord(g.x_min, g.x_max, g.nx, i), coord(g.y_min, g.y_max, g.ny, j));
      const TcState st = TcState::from_speeds(e, ve, s.pursuers[0].position, s.pursuers[0].speed,
                                              s.pursuers[1].position, s.pursuers[1].speed);
      std::string label;
      if ((e - st.pursuer1).norm() == 0.0 || (e - st.pursuer2).norm() == 0.0) {
        label = "captured";
      } else {
        // The dispersal surface is part of the simultaneous region.
        const auto region = two_cutters::classify_region(st, tol);
        label = region == two_cutters::Region::kDispersal ? "Rs" : two_cutters::to_string(region);
      }
      ++counts[label];
      t.rows.push_back({fixed(e.x()), fixed(e.y()), text(label)});
    }
  }
  Record summary;
  for (const char* k : {"R1", "R2", "Rs", "captured"}) summary.emplace_back(k, integer(counts[k]));
  return {render_rows(t, f, r), notes_text(summary, r), kExitOk};
}

// ---------------------------------------------------------------------------
// assign

struct AssignRun {
  assignment::AssignmentResult best;
  std::vector<int> sizes;
  std::uint64_t considered = 0;
};

// Without explicit team sizes every feasible mix of singles and pairs is
// searched; on equal makespans the mix with fewer pairs wins.
AssignRun solve_assignment(const assignment::MultiAgentScenario& m, const Scenario& s) {
  assignment::AssignmentOptions opt;
  opt.tolerances = tolerances(s);
  if (s.assignment) opt.cap = s.assignment->cap;
  std::vector<std::vector<int>> options;
  if (s.assignment && s.assignment->team_sizes) {
    options.push_back(*s.assignment->team_sizes);
  } else {
    const std::size_t evaders = m.evaders.size();
    for (std::size_t pairs = 0; pairs <= evaders && evaders + pairs <= m.pursuers.size(); ++pairs) {
      std::vector<int> sizes(pairs, 2);
      sizes.resize(evaders, 1);
      options.push_back(sizes);
    }
    if (options.empty()) {
      assignment::validate(assignment::PartitionSpec{std::vector<int>(evaders, 1)},
                           m.pursuers.size(), evaders);
    }
  }
  AssignRun run;
  bool have = false;
  std::optional<Error> last_error;
  for (const auto& sizes : options) {
    assignment::AssignmentResult res;
    try {
      res = assignment::optimal_assignment(m, {sizes}, opt);
    } catch (const Error& e) {
      // A mix that leaves an evader uncovered may be rescued by another mix.
      if (e.code() != ErrorCode::kUncoverableEvader || options.size() == 1) throw;
      last_error = e;
      continue;
    }
    run.considered += res.assignments_considered;
    if (!have || res.makespan < run.best.makespan) {
      run.best = std::move(res);
      run.sizes = sizes;
      have = true;
    }
  }
  if (!have) throw *last_error;
  return run;
}

Output cmd_assign(const Scenario& s, Format f, const Renderer& r) {
  require_game(s, Command::kAssign, {Game::kMultiAgent});
  const auto m = multi_agent(s);
  const AssignRun run = solve_assignment(m, s);
  const auto& best = run.best;

  std::vector<int> shown;
  if (s.assignment && s.assignment->team_sizes) {
    for (int k : {1, 2}) {
      if (std::count(run.sizes.begin(), run.sizes.end(), k)) shown.push_back(k);
    }
  } else {
    shown.push_back(1);
    if (m.pursuers.size() >= 2) shown.push_back(2);
  }
  const auto cells = assignment::engagement_table(m, shown, tolerances(s));
  const auto is_assigned = [&](const assignment::EngagementCell& c) {
    return best.assignment[c.evader] == c.team;
  };

  std::string assignment_text;
  for (std::size_t e = 0; e < best.assignment.size(); ++e) {
    if (e) assignment_text += "; ";
    assignment_text += "E" + std::to_string(e + 1) + " <- P";
    const auto team = assignment::format_team(best.assignment[e]);
    for (char ch : team) assignment_text += ch == ',' ? std::string(",P") : std::string(1, ch);
  }
  Record summary{{"optimal_assignment", text(assignment_text)},
                 {"makespan", fixed(best.makespan)},
                 {"assignments_considered", integer(static_cast<long long>(run.considered))}};

  if (f == Format::kTable) {
    const std::size_t evaders = m.evaders.size();
    std::vector<std::vector<std::string>> lines;
    std::vector<std::string> head{"team"};
    for (std::size_t e = 0; e < evaders; ++e) head.push_back("E" + std::to_string(e + 1));
    lines.push_back(head);
    for (std::size_t i = 0; i < cells.size(); i += evaders) {
      std::vector<std::string> l{assignment::format_team(cells[i].team)};
      for (std::size_t e = 0; e < evaders; ++e) {
        const auto& c = cells[i + e];
        std::string cell = c.feasible ? r.str(fixed(c.capture_time)) + " (" + c.case_label() + ")" : "-";
        if (is_assigned(c)) cell += " *";
        l.push_back(cell);
      }
      lines.push_back(std::move(l));
    }
    std::string doc = render_aligned(lines);
    doc += "\n";
    doc += render_aligned({{"optimal assignment:", assignment_text},
                           {"makespan:", r.str(fixed(best.makespan))},
                           {"assignments considered:", std::to_string(run.considered)}});
    return {doc, "", kExitOk};
  }

  Table t{{"team", "evader", "feasible", "capture_time", "case", "assigned"}, {}};
  for (const auto& c : cells) {
    t.rows.push_back({text(assignment::format_team(c.team)), text("E" + std::to_string(c.evader + 1)),
                      flag(c.feasible), c.feasible ? fixed(c.capture_time) : none(),
                      c.feasible ? text(c.case_label()) : none(), flag(is_assigned(c))});
  }
  if (f == Format::kCsv) return {render_csv(t, r), notes_text(summary, r), kExitOk};

  json doc = json::object();
  if (s.name) doc["name"] = *s.name;
  doc["team_sizes"] = run.sizes;
  json teams = json::array();
  for (std::size_t e = 0; e < best.assignment.size(); ++e) {
    json pursuers = json::array();
    for (int p : best.assignment[e]) pursuers.push_back(p + 1);
    teams.push_back({{"evader", e + 1},
                     {"pursuers", pursuers},
                     {"capture_time", r.js(fixed(best.assigned[e].capture_time))},
                     {"case", best.assigned[e].case_label()}});
  }
  doc["assignment"] = teams;
  doc["makespan"] = r.js(fixed(best.makespan));
  doc["assignments_considered"] = run.considered;
  doc["cells"] = rows_json(t, r);
  return {doc.dump(2) + "\n", "", kExitOk};
}

// ---------------------------------------------------------------------------
// verify

Output cmd_verify(const Scenario& s, Format f, const Renderer& r, std::uint64_t seed) {
  require_game(s, Command::kVerify, {Game::kTwoCutters});
  const scenario::VerifySpec spec = s.verify.value_or(scenario::VerifySpec{});
  const auto rep = verify::run(spec, seed, tolerances(s));
  const auto& sum = rep.summary;
  const bool boundary = spec.mode == scenario::VerifyMode::kBoundary;

  Record summary{{"mode", text(scenario::to_string(spec.mode))},
                 {"seed", integer(static_cast<long long>(seed))},
                 {"samples", integer(sum.samples)},
                 {"evaluated", integer(sum.evaluated)},
                 {"dispersal_skipped", integer(sum.dispersal_skipped)},
                 {"gradient_checked", integer(sum.gradient_checked)},
                 {"max_residual", sci(sum.max_residual)},
                 {"threshold", sci(spec.threshold)}};
  if (boundary) {
    summary.emplace_back("max_value_gap", sci(sum.max_value_gap));
    summary.emplace_back("value_tolerance", sci(spec.value_tolerance));
    summary.emplace_back("max_gradient_gap", sci(sum.max_gradient_gap));
    summary.emplace_back("branch_gradient_tolerance", sci(spec.branch_gradient_tolerance));
  } else {
    summary.emplace_back("max_gradient_error", sci(sum.max_gradient_error));
    summary.emplace_back("gradient_tolerance", sci(spec.gradient_tolerance));
  }
  summary.emplace_back("coverage", text(sum.insufficient_coverage ? "insufficient" : "ok"));
  summary.emplace_back("result", text(sum.passed ? "pass" : "fail"));
  const int code = sum.passed ? kExitOk : kExitVerificationFailed;

  if (f == Format::kTable) return {render_record(summary, f, r), "", code};

  Table t{{"x_E", "y_E", "x_P1", "y_P1", "x_P2", "y_P2", "beta1", "beta2", "region", "value"}, {}};
  for (int i = 0; i < 6; ++i) t.header.push_back("grad" + std::to_string(i));
  for (int i = 0; i < 6; ++i) t.header.push_back("fd" + std::to_string(i));
  for (const char* k : {"gradient_error", "hji_residual", "margin", "value_gap", "gradient_gap"}) {
    t.header.push_back(k);
  }
  for (const auto& rec : rep.records) {
    const auto x = rec.state.coordinates();
    std::vector<Value> row;
    for (int i = 0; i < 6; ++i) row.push_back(fixed(x[i]));
    row.push_back(fixed(rec.state.beta1));
    row.push_back(fixed(rec.state.beta2));
    row.push_back(text(two_cutters::to_string(rec.region)));
    row.push_back(fixed(rec.value));
    for (int i = 0; i < 6; ++i) row.push_back(sci(rec.gradient[i]));
    for (int i = 0; i < 6; ++i) row.push_back(rec.fd_gradient ? sci((*rec.fd_gradient)[i]) : none());
    row.push_back(rec.fd_gradient ? sci(rec.gradient_error) : none());
    row.push_back(sci(rec.hji_residual));
    row.push_back(boundary ? none() : sci(rec.margin));
    row.push_back(boundary ? sci(rec.value_gap) : none());
    row.push_back(boundary ? sci(rec.gradient_gap) : none());
    t.rows.push_back(std::move(row));
  }
  if (f == Format::kCsv) return {render_csv(t, r), notes_text(summary, r), code};

  json doc = json::object();
  doc["summary"] = record_json(summary, r);
  doc["records"] = rows_json(t, r);
  return {doc.dump(2) + "\n", "", code};
}

// ---------------------------------------------------------------------------
// simulate

Output cmd_simulate(const Scenario& s, Format f, const Renderer& r) {
  require_game(s, Command::kSimulate, {Game::kTwoCutters, Game::kAtddg});
  const scenario::SimSpec spec = s.sim.value_or(scenario::SimSpec{});
  const sim::SimConfig cfg = sim_config(s);

  sim::Trajectory traj;
  Table t;
  if (s.game == Game::kTwoCutters) {
    const TcState st = two_cutters_state(s);
    const bool evader_optimal = spec.evader_policy == "optimal";
    const bool pursuers_optimal = spec.pursuer_policy == "optimal";
    if (evader_optimal && pursuers_optimal) {
      traj = sim::simulate_two_cutters(st, cfg);
    } else {
      const auto ev = evader_optimal
                          ? sim::optimal_evader(cfg.dispersal_policy.evader, cfg.force_initial_split)
                          : sim::constant_heading_evader(spec.evader_heading);
      const auto pu = pursuers_optimal ? sim::optimal_pursuers(cfg.dispersal_policy.pursuers,
                                                               cfg.force_initial_split)
                                       : sim::pure_pursuit_pursuers();
      traj = sim::simulate_two_cutters(st, cfg, ev, pu);
    }
    t.header = {"t", "x_E", "y_E", "x_P1", "y_P1", "x_P2", "y_P2", "phi", "psi1", "psi2", "label"};
  } else {
    auto policies = sim::optimal_atddg();
    if (spec.attacker_policy == "pure_pursuit") policies.attacker = sim::attacker_pure_pursuit();
    traj = sim::simulate_atddg(atddg_state(s), cfg, policies);
    t.header = {"t", "x_T", "y_T", "x_A", "y_A", "x_D", "y_D", "phi", "chi", "psi", "label"};
  }
  for (const auto& smp : traj.samples) {
    std::vector<Value> row{fixed(smp.t)};
    for (const auto& p : smp.positions) {
      row.push_back(fixed(p.x()));
      row.push_back(fixed(p.y()));
    }
    for (double h : smp.headings) row.push_back(fixed(h));
    row.push_back(text(smp.label));
    t.rows.push_back(std::move(row));
  }

  Record summary{{"outcome", text(sim::to_string(traj.outcome))},
                 {"terminal_time", fixed(traj.terminal_time)},
                 {"samples", integer(static_cast<long long>(traj.samples.size()))}};
  if (s.game == Game::kAtddg && !traj.samples.empty()) {
    summary.emplace_back("terminal_separation", fixed(sim::terminal_separation(traj)));
  }
  switch (f) {
    case Format::kCsv: return {render_csv(t, r), notes_text(summary, r), kExitOk};
    case Format::kTable: return {render_table(t, r) + "\n" + notes_text(summary, r), "", kExitOk};
    case Format::kJson: {
      json doc = record_json(summary, r);
      doc["samples"] = rows_json(t, r);
      return {doc.dump(2) + "\n", "", kExitOk};
    }
  }
  return {};
}

}  // namespace

const char* to_string(Command c) {
  switch (c) {
    case Command::kSolve: return "solve";
    case Command::kRegions: return "regions";
    case Command::kAssign: return "assign";
    case Command::kVerify: return "verify";
    case Command::kSimulate: return "simulate";
  }
  return "?";
}

Format default_format(Command c) {
  switch (c) {
    case Command::kSolve: return Format::kJson;
    case Command::kRegions: return Format::kCsv;
    case Command::kAssign: return Format::kTable;
    case Command::kVerify: return Format::kTable;
    case Command::kSimulate: return Format::kCsv;
  }
  return Format::kJson;
}

Output execute(const Scenario& scn, const Options& opts) {
  const Format f = opts.format.value_or(default_format(opts.command));
  const Precision p =
      opts.precision.value_or(f == Format::kTable ? Precision::kTable : Precision::kFull);
  const Renderer r(p);
  switch (opts.command) {
    case Command::kSolve: return cmd_solve(scn, f, r);
    case Command::kRegions: return cmd_regions(scn, f, r);
    case Command::kAssign: return cmd_assign(scn, f, r);
    case Command::kVerify: return cmd_verify(scn, f, r, opts.seed.value_or(scn.seed.value_or(0)));
    case Command::kSimulate: return cmd_simulate(scn, f, r);
  }
  return {};
}

int run_command(const Options& opts, std::ostream& out, std::ostream& err) {
  Output result;
  try {
    result = execute(scenario::load(opts.scenario_path), opts);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  if (opts.out_path) {
    std::ofstream file(*opts.out_path, std::ios::binary);
    file << result.document;
    if (!file) {
      err << "error: cannot write '" << *opts.out_path << "'\n";
      return kExitInputError;
    }
    out << result.notes;
  } else {
    out << result.document;
    err << result.notes;
  }
  return result.exit_code;
}

}  // namespace pursuit::commands
