#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cascaderisk/roi.hpp"

namespace cascaderisk::cli {

enum ExitCode : int {
  kSuccess = 0,
  kBadArguments = 2,
  kInputError = 3,
  kCalibrationInfeasible = 4,
  kInvariantViolation = 5,
  kOutputError = 6,
};

struct RunConfig {
  std::string input;  // edge-list or snapshot path, or "synth:<spec>"
  std::optional<std::string> window_start;
  std::optional<std::string> window_end;
  double beta = 10.0;
  double eta = 0.05;
  double alpha = 0.0;
  double p_exo = 0.001;
  RoiRates rates;
  std::string seed_node;
  std::filesystem::path output_dir = "out";
  std::uint64_t rng_seed = 1;
  bool trace = false;
  std::vector<double> grid;           // sweep grid; empty selects the default
  std::vector<double> eta_increases;  // iso-curve grid; empty selects the default
  unsigned threads = 1;
};

// Commands: ingest, cascade, risk, roi, sweep-eta, sweep-alpha, iso, synth.
// Writes the command's CSV artifacts plus run.cfg into config.output_dir and a
// one-line summary to `out`. Diagnostics go to `err`.
int execute_scenario(const RunConfig& config, const std::string& command, std::ostream& out, std::ostream& err);

// Full command line: `<command> [flags]`. Values from --config key=value files
// apply only where the flag is absent.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// key=value lines of the effective parameters, readable back through --config.
std::string render_config(const RunConfig& config, const std::string& command);

}  // namespace cascaderisk::cli
