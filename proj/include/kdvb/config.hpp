#pragma once

// Run configuration read from a flat text file:
//
//   # comment
//   key = value
//
// One assignment per line; blank lines and text after '#' are ignored.
// Unknown keys, repeated keys and malformed values raise ConfigError naming
// the key and line.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kdvb/evolution.hpp"

namespace kdvb {

struct RunConfig {
  double r = 1.0;
  double alpha = 1.0;
  int n = 256;
  /// Period for `solve`; 0 means take it from the initial data.
  double L = 0.0;
  SolverConfig solver;
  int N = 64;
  int n_theta = 65;
  double eps = 0.02;
  double delta0 = 1e-6;
  /// Experiment horizon; 0 picks T with exp(Re lambda T) = 1e3.
  double T = 0.0;
  double fit_lo = 1.0;
  double fit_hi = 100.0;
  std::uint64_t seed = 7;
  std::filesystem::path output_dir = ".";

  void validate() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// Applies a single `key = value` assignment (used for CLI overrides too).
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
/// Serializes cfg in the same grammar, 17 significant digits.
std::string config_to_text(const RunConfig& cfg);

}  // namespace kdvb
