// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "ptsturm/spectrum.hpp"

namespace ptsturm {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  /// One line of key figures (worst errors, counts, fit quality).
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  SpectrumOptions spectrum;
  /// Names from check_names(); empty runs all.
  std::vector<std::string> only;
};

/// reality, bessel_oracle, wronskian, sector, alphas, galerkin, delta_sweep, symmetry.
const std::vector<std::string>& check_names();

/// Runs one acceptance check. Numeric failures inside a check are reported
/// as a failed result, not thrown.
CheckResult run_check(const std::string& name, const VerifyOptions& options = {});

std::vector<CheckResult> run_verify(const VerifyOptions& options = {});

/// "PASS  [3] wronskian  (0.1 s)  worst rel err 2.1e-12 ..." style line.
std::string format_check(const CheckResult& result);

}  // namespace ptsturm
