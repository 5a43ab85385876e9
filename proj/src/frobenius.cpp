// SPDX-License-Identifier: Apache-2.0

#include "ptsturm/frobenius.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace ptsturm {
namespace {

double slope_at(const CoefficientProfile& profile, Endpoint endpoint) {
  return endpoint == Endpoint::Zero ? profile.fprime0() : profile.fprime_pi();
}

void check_delta(double delta) {
  if (!(delta >= kDeltaMin)) throw_invalid(fmt::format("offset underflow: delta = {} < {}", delta, kDeltaMin));
  if (!(delta < kPi / 2.0)) throw_invalid(fmt::format("offset {} not small", delta));
}

void check_lam(Complex lam) {
  if (!std::isfinite(lam.real()) || !std::isfinite(lam.imag())) throw_invalid("lambda not finite");
}

// Shared construction. sign = +1 at 0 (x = a + delta), -1 at pi (x = a - delta).
LocalBasis make_basis(const CoefficientProfile& profile, Complex lam, double delta, Endpoint endpoint,
                      std::optional<double> tol) {
  check_lam(lam);
  check_delta(delta);
  const double eps = profile.eps();
  const double s = slope_at(profile, endpoint);
  const double offset = endpoint == Endpoint::Zero ? delta : -delta;  // x - a

  LocalBasis b;
  b.endpoint = endpoint;
  b.delta = delta;
  b.remainder_estimate = frobenius_remainder(profile, lam, delta, endpoint);
  if (tol && b.remainder_estimate > *tol) {
    throw_invalid(fmt::format("shrink delta: remainder {:.3e} exceeds {:.3e} at delta = {}",
                              b.remainder_estimate, *tol, delta));
  }
  const double denom = 1.0 + eps * s;
  if (std::abs(denom) < 1e-12) throw_invalid("resonant endpoint: 1 + eps f'(a) = 0");
  b.jet_slope = -kI * lam / denom;
  b.singular_exponent = -1.0 / (eps * s);

  const double x = endpoint == Endpoint::Zero ? delta : kPi - delta;
  b.state_regular = {x, 1.0 + b.jet_slope * offset, -s * offset * b.jet_slope};
  b.state_singular = {x, eps, 1.0};
  b.singular_scale = std::pow(delta, b.singular_exponent);
  return b;
}

}  // namespace

double frobenius_remainder(const CoefficientProfile& profile, Complex lam, double delta, Endpoint endpoint) {
  const double scale = 1.0 + std::abs(lam);
  // Distance-from-endpoint form: f(a + sign*d) / (sign*d) - f'(a) - sign*d f''(a)/2.
  const double sign = endpoint == Endpoint::Zero ? 1.0 : -1.0;
  const double a = endpoint == Endpoint::Zero ? 0.0 : kPi;
  const double h = sign * delta;
  double shape = profile(a + h) / h - slope_at(profile, endpoint);
  const auto f2 = endpoint == Endpoint::Zero ? profile.fsecond0() : profile.fsecond_pi();
  if (f2) shape -= h * *f2 / 2.0;
  // a + h is only known to an ulp of a, so f(a + h) / h carries rounding of
  // order ulp(a) |f'(a)| / delta. That is noise, not truncation; counting it
  // would drive delta down, which makes it larger.
  const double noise = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, a) *
                       std::abs(slope_at(profile, endpoint)) / delta;
  const double truncation = std::max(0.0, std::abs(shape) - noise);
  return scale * scale * delta * delta / 2.0 + scale * truncation;
}

double default_delta(const CoefficientProfile& profile, Complex lam, Endpoint endpoint, double tol) {
  double delta = kDeltaMax;
  while (delta > kDeltaMin && frobenius_remainder(profile, lam, delta, endpoint) > tol) delta /= 2.0;
  return std::max(delta, kDeltaMin);
}

LocalBasis basis_at_zero(const CoefficientProfile& profile, Complex lam, double delta, std::optional<double> tol) {
  return make_basis(profile, lam, delta, Endpoint::Zero, tol);
}

LocalBasis basis_at_pi(const CoefficientProfile& profile, Complex lam, double delta, std::optional<double> tol) {
  return make_basis(profile, lam, delta, Endpoint::Pi, tol);
}

std::pair<double, double> indicial_exponents(const CoefficientProfile& profile, Endpoint endpoint) {
  return {0.0, -1.0 / (profile.eps() * slope_at(profile, endpoint))};
}

Complex regular_jet_residual(const CoefficientProfile& profile, Complex lam, double delta) {
  const LocalBasis b = basis_at_zero(profile, lam, delta);
  // v = -f'(0) x k, so (f u')' = -v' = f'(0) k; u' = k.
  const Complex k = b.jet_slope;
  return kI * profile.eps() * profile.fprime0() * k + kI * k - lam * b.state_regular.u;
}

}  // namespace ptsturm
