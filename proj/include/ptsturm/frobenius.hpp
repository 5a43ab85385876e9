// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <utility>

#include "ptsturm/coeff.hpp"

namespace ptsturm {

enum class Endpoint { Zero, Pi };

/// A point of the first-order system in the variables (u, v = -f u').
struct ShootingState {
  double x = 0.0;
  Complex u;
  Complex v;
};

/// Local data at a singular endpoint a, evaluated at distance delta from it.
///
/// The regular solution is u = 1 + jet_slope (x - a) through first order;
/// the singular one behaves like |x - a|^singular_exponent with state
/// proportional to (eps, 1). state_singular is returned normalised to that
/// shape, i.e. without the power factor, which under- or overflows for small
/// delta.
struct LocalBasis {
  Endpoint endpoint = Endpoint::Zero;
  Complex jet_slope;
  double singular_exponent = 0.0;
  double delta = 0.0;
  double remainder_estimate = 0.0;
  ShootingState state_regular;
  ShootingState state_singular;
  /// |x - a|^singular_exponent at the evaluation point.
  double singular_scale = 1.0;
};

/// Starting-value truncation target.
inline constexpr double kTolFrob = 1e-9;
/// Largest offset the adaptive choice will consider.
inline constexpr double kDeltaMax = 1e-3;

/// Estimate of the first-order jet error at offset delta:
/// (1+|lam|)^2 delta^2 / 2 + (1+|lam|) |f(delta)/delta - f'(a) - delta f''(a)/2|,
/// with distances measured from the endpoint and the f'' term dropped when
/// the profile does not declare it. The rounding floor of f(a ± delta) / delta
/// (about ulp(a) |f'(a)| / delta) is subtracted from the second term.
double frobenius_remainder(const CoefficientProfile& profile, Complex lam, double delta, Endpoint endpoint);

/// Largest delta <= kDeltaMax (halving) whose remainder is below tol, floored at kDeltaMin.
double default_delta(const CoefficientProfile& profile, Complex lam, Endpoint endpoint, double tol = kTolFrob);

/// Basis at x = delta. With a tol, throws "shrink delta" if the remainder exceeds it.
LocalBasis basis_at_zero(const CoefficientProfile& profile, Complex lam, double delta,
                         std::optional<double> tol = std::nullopt);

/// Basis at x = pi - delta, with the decaying singular exponent -1/(eps f'(pi)).
LocalBasis basis_at_pi(const CoefficientProfile& profile, Complex lam, double delta,
                       std::optional<double> tol = std::nullopt);

/// (0, -1/(eps f'(a))) at the given endpoint.
std::pair<double, double> indicial_exponents(const CoefficientProfile& profile, Endpoint endpoint);

/// i eps (f u')' + i u' - lam u for the first-order jet at offset delta from 0,
/// with (f u')' taken by the exact derivative of the jet's v. A consistency
/// diagnostic: it is O(delta) for the regular state.
Complex regular_jet_residual(const CoefficientProfile& profile, Complex lam, double delta);

}  // namespace ptsturm
