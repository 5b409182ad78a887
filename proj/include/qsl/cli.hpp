#pragma once

// Batch front door: one subcommand per analysis, JSON/CSV reports on stdout
// or --out, deterministic for a fixed config and seed.
//
// Exit codes: 0 success, 1 input/schema/usage errors, 2 analysis-level
// failures (any library error that is not bad input, e.g. a rank ambiguity
// or an unconverged quadrature).

#include <cstdint>
#include <string>
#include <vector>

namespace qsl {

enum class Command {
  AnalyzeQuadratic,
  Spectrum,
  Deform,
  Weight,
  CertifyProp1,
  ScanResolvent,
  VerifyIdentities,
};

struct RunConfig {
  Command command = Command::AnalyzeQuadratic;
  std::string input_path;
  std::string out_path;    // empty = stdout
  std::string grid_file;   // scan config / certification config JSON
  double tol = 1e-9;       // characteristic-point search tolerance
  double radius = 10.0;    // spectrum lattice radius
  int levels = 16;         // Hermite levels per dimension
  std::vector<double> h;   // semiclassical parameters for scans
  double delta = 0.05;
  double epsilon = 0.01;
  double T = 1.0;
  std::uint64_t seed = 99;
};

// Executes the configured pipeline and returns the exit code; never throws.
int run(const RunConfig& config);

// Full argv-to-exit-code entry point used by the binary.
int cli_main(int argc, char** argv);

}  // namespace qsl
