// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ptsturm {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Required slope of the coefficient at the origin.
inline constexpr double kFPrimeZero = 2.0 / kPi;

/// Closest approach to a singular endpoint for any evaluation of f, p or the ODE.
inline constexpr double kDeltaMin = 1e-8;

enum class ErrorKind {
  InvalidArgument,  // caller supplied an inadmissible value
  Numeric,          // an algorithm failed to reach its target
};

/// Single exception type for the library. The message names the failure in
/// the words the callers (and the CLI diagnostics) report.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_invalid(const std::string& what) {
  throw Error(ErrorKind::InvalidArgument, what);
}

[[noreturn]] inline void throw_numeric(const std::string& what) {
  throw Error(ErrorKind::Numeric, what);
}

/// |a - b| / max(|b|, floor), the comparison used throughout the tests.
inline double relative_difference(Complex a, Complex b, double floor = 1e-300) {
  const double scale = std::abs(b) > floor ? std::abs(b) : floor;
  return std::abs(a - b) / scale;
}

}  // namespace ptsturm
