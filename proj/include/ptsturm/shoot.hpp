// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "ptsturm/coeff.hpp"
#include "ptsturm/frobenius.hpp"

namespace ptsturm {

struct ShootOptions {
  double tol_rel = 1e-10;
  double tol_abs = 1e-12;
  double lam_max = 1e4;
  /// Fixed offsets from the endpoints; adaptive (default_delta) when unset.
  std::optional<double> delta0;
  std::optional<double> delta_pi;
  /// Compute est_err by a second run at tol/16. Doubles the cost or more.
  bool estimate_error = false;
  /// Keep the accepted step points in TransferResult::grid.
  bool record_grid = false;
  /// Replay these step points with fixed Dormand-Prince steps instead of
  /// adapting. Points are on the (0, pi) side, from delta0 to pi - delta_pi
  /// (both must be set). φ is then a smooth function of λ, which the adaptive
  /// controller's step choices are not.
  std::shared_ptr<const std::vector<double>> grid;
};

/// Result of one shot across (0, pi) (or (-pi, 0) for the reversed problem).
struct TransferResult {
  Complex lam;
  Complex phi_pi;
  /// Coordinates of the solution at the far end in (psi, Psi) where Psi is
  /// normalised to the state (eps, 1) at distance delta_pi from the endpoint.
  Complex c1;
  Complex c2;
  double delta0 = 0.0;
  double delta_pi = 0.0;
  int steps = 0;
  /// |phi_pi(tol) - phi_pi(tol/16)|; NaN unless ShootOptions::estimate_error.
  double est_err = 0.0;
  /// Step points on the (0, pi) side, when ShootOptions::record_grid.
  std::shared_ptr<const std::vector<double>> grid;
};

/// Adaptive Dormand-Prince propagation of (u, -f u') from from_state.x to
/// to_x, restarting at breakpoints. Both points must lie in one of
/// [delta_min, pi - delta_min] or its mirror image. steps, if given, is
/// incremented by the number of accepted steps.
ShootingState integrate(const CoefficientProfile& profile, Complex lam, const ShootingState& from_state, double to_x,
                        const ShootOptions& options = {}, int* steps = nullptr);

/// φ(pi, λ) for the solution with φ(0, λ) = 1 regular at 0.
TransferResult phi_at_pi(const CoefficientProfile& profile, Complex lam, const ShootOptions& options = {});

/// φ(-pi, λ), integrating the same regular solution leftwards.
TransferResult phi_at_minus_pi(const CoefficientProfile& profile, Complex lam, const ShootOptions& options = {});

/// d(λ) = φ(pi, λ) - φ(pi, -λ).
Complex d_of_lambda(const CoefficientProfile& profile, Complex lam, const ShootOptions& options = {});

/// g(z) = φ(pi, i z^2).
Complex g_of_z(const CoefficientProfile& profile, Complex z, const ShootOptions& options = {});

inline constexpr double kRhoUnderflow = 1e-250;

struct RhoSample {
  Complex z;
  Complex g_z;
  Complex g_iz;
  Complex rho;
  double modulus = 0.0;
};

/// ρ(z) = g(iz)/g(z). Throws Numeric "pole/zero proximity" when |g(z)| is below
/// kRhoUnderflow or the ratio is not finite.
RhoSample rho_general(const CoefficientProfile& profile, Complex z, const ShootOptions& options = {});

/// Closed-form φ(pi, λ) for the tent coefficient via the Bessel matching at pi/2.
/// Throws InvalidArgument at integer ν = pi/(2 eps).
Complex bessel_phi_at_pi(double eps, Complex lam);

/// λ^{1/2-ν} J_ν'(w) J_ν(w) with w = sqrt(2 i ν λ pi), principal branches.
Complex bessel_F(double eps, Complex lam);

/// J_ν'(z) J_ν(z) / (J_ν'(iz) J_ν(iz)); the numerator is stored in g_iz and the
/// denominator in g_z, so that rho = g_iz / g_z as for rho_general.
RhoSample bessel_rho(double eps, Complex z);

}  // namespace ptsturm
