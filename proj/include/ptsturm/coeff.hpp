// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ptsturm/common.hpp"

namespace ptsturm {

enum class ProfileKind { Sine, PiecewiseLinear, Custom };

std::string to_string(ProfileKind kind);

/// Endpoint jet of f. f′(π) is negative for every admissible profile.
struct EndpointDerivatives {
  double fprime0 = kFPrimeZero;
  double fprime_pi = -kFPrimeZero;
  std::optional<double> fsecond0;
  std::optional<double> fsecond_pi;
};

/// The coefficient f of i eps (f u')' + i u' = lambda u.
///
/// A profile stores f on the half period [0, pi] (the "half wave") and extends
/// it to the real line as an odd, 2 pi-periodic function. Anti-periodicity
/// f(x + pi) = -f(x) is a property of the data, not of the extension; it is
/// checked by validate(). Profiles are immutable and cheap to copy.
class CoefficientProfile {
 public:
  using HalfWave = std::function<double(double)>;

  /// Unchecked constructor. The make_* factories validate their inputs; this one
  /// also admits the endpoint-linearised profiles of the delta sweep, whose
  /// slope at 0 differs from 2/pi.
  CoefficientProfile(ProfileKind kind, double eps, HalfWave half_wave, EndpointDerivatives ends,
                     std::vector<double> breakpoints, std::string id);

  /// f(x) for any real x.
  double operator()(double x) const;

  ProfileKind kind() const noexcept { return kind_; }
  double eps() const noexcept { return eps_; }
  double fprime0() const noexcept { return ends_.fprime0; }
  double fprime_pi() const noexcept { return ends_.fprime_pi; }
  std::optional<double> fsecond0() const noexcept { return ends_.fsecond0; }
  std::optional<double> fsecond_pi() const noexcept { return ends_.fsecond_pi; }
  const EndpointDerivatives& endpoint_derivatives() const noexcept { return ends_; }

  /// Points of non-differentiability in (-pi, pi), sorted, symmetric about 0.
  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  /// Breakpoints strictly between a and b (either order), ascending.
  std::vector<double> breakpoints_between(double a, double b) const;

  /// ν = pi / (2 eps), the order of the Bessel functions of the linear case.
  double nu() const noexcept { return kPi / (2.0 * eps_); }
  const std::string& id() const noexcept { return id_; }

  /// Same coefficient function with a different eps (no validation).
  CoefficientProfile with_eps(double eps) const;

 private:
  ProfileKind kind_;
  double eps_;
  std::shared_ptr<const HalfWave> half_wave_;
  EndpointDerivatives ends_;
  std::vector<double> breakpoints_;
  std::string id_;
};

/// f(x) = (2/pi) sin x.
CoefficientProfile make_sine(double eps);

/// The tent f(x) = 2x/pi on [0, pi/2], 2(pi - x)/pi on [pi/2, pi].
CoefficientProfile make_piecewise_linear(double eps);

/// Tabulated f on (0, pi). Samples are interpolated by a piecewise cubic
/// Hermite whose node slopes are limited so that every cubic piece keeps
/// non-negative Bernstein coefficients; positive data stay positive.
CoefficientProfile make_custom(std::span<const std::pair<double, double>> samples, double eps,
                               const EndpointDerivatives& ends);

/// Throws InvalidArgument unless 0 < eps < pi/2.
void check_eps(double eps);

struct ValidationCheck {
  std::string name;
  double max_violation = 0.0;
  bool passed = false;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool passed = false;
  const ValidationCheck* find(std::string_view name) const;
};

/// Relative tolerance of validate(), scaled by max |f| on the grid.
inline constexpr double kValidationTolerance = 1e-10;

/// Samples the structural hypotheses on a uniform grid of grid_size points:
/// oddness, anti-periodicity, positivity on (0, pi), zeros at 0 and ±pi,
/// f'(0) = 2/pi (declared value and one-sided difference quotient) and the
/// eps range.
ValidationReport validate(const CoefficientProfile& profile, int grid_size);

/// Integrating factor p (p'/p = f'/f + 1/(eps f)) and weight w = p/f on (0, pi),
/// normalised by p(pi/2) = f(pi/2).
class DerivedWeights {
 public:
  explicit DerivedWeights(CoefficientProfile profile);

  double p(double x) const;
  double w(double x) const;
  /// ∫_{pi/2}^{x} dt / (eps f(t)), so that p = f exp(·).
  double log_ratio(double x) const;
  double normalization_point() const noexcept { return kPi / 2.0; }
  const CoefficientProfile& profile() const noexcept { return profile_; }

 private:
  CoefficientProfile profile_;
};

double eval_p(const DerivedWeights& weights, double x);

/// ∫_0^pi f(x)^{-1/2} dx, computed with x = s^2 near each endpoint.
double wkb_integral(const CoefficientProfile& profile);

/// (n / I)^2 with I = wkb_integral(profile); a seed for bracketing only.
double wkb_guess(const CoefficientProfile& profile, int n);

}  // namespace ptsturm
