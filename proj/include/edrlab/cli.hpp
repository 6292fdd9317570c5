#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "edrlab/models.hpp"
#include "edrlab/tolerances.hpp"

namespace edrlab::cli {

enum class Format { kCsv, kJson };

struct RunConfig {
  std::string command;    // report | sweep | povm | born-check | search-f | demo
  std::string demo_name;  // swap | vonneumann | identity | offset
  std::string model = "vonneumann";  // model kind or path to a process file
  std::string psi;                   // "x0,p0,sigma", a state file, or empty
  double hbar = 1.0;
  Index grid_n = 64;
  double dx = 0.25;
  std::optional<Index> obj_n;
  std::optional<double> obj_dx;
  double lambda = 1.0;
  double probe_sigma = 1.0;
  double probe_offset = 0.0;
  std::string f = "identity";  // identity | affine:a,b | poly:c0,... | solve
  std::uint64_t seed = 0;
  Tolerances tol;
  std::string out;
  Format format = Format::kCsv;

  std::string sweep_param;  // lambda | probe-sigma | probe-offset
  double sweep_from = 0.0;
  double sweep_to = 1.0;
  int sweep_points = 5;
};

enum ExitCode : int { kOk = 0, kConfigError = 2, kValidationError = 3 };

/// Parses argv with the documented flag set and runs the command.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Runs an already-parsed configuration. Writes to `out` unless config.out
/// names a file.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Model specification implied by the flags (grid defaults depend on kind).
ModelSpec model_spec(const RunConfig& config);

/// Worker count for sweeps: EDRLAB_NUM_THREADS if set, else hardware.
unsigned thread_budget();

}  // namespace edrlab::cli
