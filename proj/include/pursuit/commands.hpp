#pragma once

// The command surface behind the pursuit_cli tool.  Each command turns one
// scenario into one document; run_command adds file handling and exit codes.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "pursuit/scenario.hpp"

namespace pursuit::commands {

enum class Command { kSolve, kRegions, kAssign, kVerify, kSimulate };
enum class Format { kTable, kCsv, kJson };
enum class Precision { kTable, kFull };

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitInputError = 2;

struct Options {
  Command command = Command::kSolve;
  std::string scenario_path;
  std::optional<std::string> out_path;
  // Unset values fall back to the command default (format), the format
  // default (precision: table for table output, full otherwise) or the
  // scenario file (seed).
  std::optional<Format> format;
  std::optional<Precision> precision;
  std::optional<std::uint64_t> seed;
};

struct Output {
  std::string document;
  // Outcome and summary lines that do not belong in the document itself.
  std::string notes;
  int exit_code = kExitOk;
};

/// Runs a command on an already parsed scenario.  Library errors propagate.
Output execute(const scenario::Scenario& scn, const Options& opts);

/// Loads the scenario, runs the command and writes the document to the
/// output file or `out`.  Notes go to `out` when the document went to a file
/// and to `err` otherwise.  Returns the process exit code.
int run_command(const Options& opts, std::ostream& out, std::ostream& err);

Format default_format(Command c);
const char* to_string(Command c);

}  // namespace pursuit::commands
