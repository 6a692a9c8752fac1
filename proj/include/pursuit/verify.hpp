#pragma once

// Seeded numerical checks of the two-cutters Value function: HJI residual and
// finite-difference gradient on random states, branch agreement on the R1/Rs
// boundary, and a corrupted-Value negative control.

#include <cstdint>
#include <optional>
#include <vector>

#include "pursuit/scenario.hpp"
#include "pursuit/two_cutters.hpp"

namespace pursuit::verify {

using State = two_cutters::TwoCuttersState<double>;
using Vector6d = two_cutters::Vector6<double>;

struct Record {
  State state;
  two_cutters::Region region;
  double value = 0.0;
  Vector6d gradient = Vector6d::Zero();
  // Interior and corrupt modes: central differences, present when the state
  // is at least boundary_exclusion away from every region boundary.
  std::optional<Vector6d> fd_gradient;
  double gradient_error = 0.0;
  double hji_residual = 0.0;
  double margin = 0.0;
  // Boundary mode: gaps between the single-capture and simultaneous branches.
  double value_gap = 0.0;
  double gradient_gap = 0.0;
};

struct Summary {
  int samples = 0;
  int evaluated = 0;
  int dispersal_skipped = 0;
  int gradient_checked = 0;
  double max_residual = 0.0;
  double max_gradient_error = 0.0;
  double max_value_gap = 0.0;
  double max_gradient_gap = 0.0;
  bool insufficient_coverage = false;
  bool passed = false;
};

struct Report {
  scenario::VerifyMode mode;
  std::vector<Record> records;
  Summary summary;
};

Report run(const scenario::VerifySpec& spec, std::uint64_t seed,
           const two_cutters::Tolerances<double>& tol = {});

}  // namespace pursuit::verify
