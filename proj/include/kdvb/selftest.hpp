#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kdvb {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs the closed-form example suite and the invariant suites (Parseval,
/// translation invariance, dealiasing against direct convolution, mean
/// balance, conjugation symmetry of Bloch spectra, resolvent bound), printing
/// one line per check to out.
std::vector<CheckResult> run_selftest(std::ostream& out);

}  // namespace kdvb
