#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "pursuit/commands.hpp"

namespace cmd = pursuit::commands;

int main(int argc, char** argv) {
  CLI::App app{"Pursuit-evasion game solver, simulator and verifier"};
  app.require_subcommand(1);

  const std::map<std::string, cmd::Format> formats{
      {"table", cmd::Format::kTable}, {"csv", cmd::Format::kCsv}, {"json", cmd::Format::kJson}};
  const std::map<std::string, cmd::Precision> precisions{{"table", cmd::Precision::kTable},
                                                         {"full", cmd::Precision::kFull}};

  struct Sub {
    cmd::Command command;
    const char* help;
  };
  const Sub subs[] = {
      {cmd::Command::kSolve, "Optimal headings, aimpoint and value of a single engagement"},
      {cmd::Command::kRegions, "Region label of every evader position on a grid"},
      {cmd::Command::kAssign, "Engagement table and makespan-optimal team assignment"},
      {cmd::Command::kVerify, "Seeded HJI residual and gradient verification"},
      {cmd::Command::kSimulate, "Closed-loop trajectory of a game"},
  };

  cmd::Options opts;
  std::string out_path;
  std::string format;
  std::string precision;
  std::uint64_t seed = 0;
  std::map<cmd::Command, CLI::App*> apps;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(cmd::to_string(s.command), s.help);
    sub->add_option("--scenario", opts.scenario_path, "Scenario JSON file")->required();
    sub->add_option("--out", out_path, "Write the document to this file instead of stdout");
    sub->add_option("--format", format, "Output format (table, csv, json)")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    sub->add_option("--seed", seed, "Override the scenario seed");
    sub->add_option("--precision", precision, "Numeric precision (table, full)")
        ->check(CLI::IsMember({"table", "full"}));
    apps[s.command] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cmd::kExitInputError;
  }

  for (const auto& [command, sub] : apps) {
    if (!sub->parsed()) continue;
    opts.command = command;
    if (sub->count("--out")) opts.out_path = out_path;
    if (sub->count("--format")) opts.format = formats.at(format);
    if (sub->count("--precision")) opts.precision = precisions.at(precision);
    if (sub->count("--seed")) opts.seed = seed;
  }
  return cmd::run_command(opts, std::cout, std::cerr);
}
