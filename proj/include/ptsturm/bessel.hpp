// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ptsturm/common.hpp"

namespace ptsturm {

enum class BesselMethod { Series, Asymptotic };

/// One evaluation of J_nu and J_nu' with the method used and its error estimate.
struct BesselEval {
  double order = 0.0;
  Complex z;
  Complex value;
  Complex derivative;
  BesselMethod method = BesselMethod::Series;
  double est_rel_err = 0.0;
};

/// Largest |z| for which the power series is used.
double bessel_series_radius(double nu);

/// J_nu(z) and J_nu'(z), principal branch (arg z in (-pi, pi]).
///
/// Orders with |nu| <= 50 are accepted; negative orders must be non-integer.
/// The power series is used for |z| <= max(12, 2|nu|) and the Hankel
/// expansion beyond, unless the other method reports a smaller error bound.
/// Throws InvalidArgument for |z| > 1e4 or |Im z| > 700.
BesselEval bessel_j_eval(double nu, Complex z);

Complex bessel_j(double nu, Complex z);
Complex bessel_j_prime(double nu, Complex z);

/// Forced-method variants, exposed for the crossover tests.
BesselEval bessel_j_series(double nu, Complex z);
BesselEval bessel_j_asymptotic(double nu, Complex z);

/// Entire function sum_k (-w)^k / (k! Gamma(k + nu + 1)) = w^{-nu/2} J_nu(2 sqrt(w)).
/// Free of branch cuts; its w-derivative is -bessel_j_reduced(nu + 1, w).
Complex bessel_j_reduced(double nu, Complex w);

/// The three closed-form solutions of the tent-coefficient equation and their
/// s-derivatives, ν = pi/(2 eps):
///   zeta0(s) = Gamma(ν+1) (iνλs)^{-ν/2} J_ν(2 sqrt(iνλs))      (regular at s = 0)
///   zeta1(s) = (iνλ)^{ν/2} s^{ν/2} J_ν(2 sqrt(-iνλs))           (vanishes at s = 0)
///   zeta2(s) = (iνλ)^{ν/2} s^{ν/2} J_{-ν}(2 sqrt(-iνλs))        (zeta2(0) = i^ν / Gamma(1-ν))
/// Powers are principal per factor; zeta1 and zeta2 are defined for s <= 0.
/// Evaluated through bessel_j_reduced, so λ = 0 is the series limit.
struct ZetaValues {
  Complex zeta0, zeta1, zeta2;
  Complex dzeta0, dzeta1, dzeta2;
  /// zeta1 and its derivative divided by i^ν (iνλ)^ν; finite and nonzero at λ = 0.
  Complex zeta1_hat, dzeta1_hat;
};

/// Throws InvalidArgument for integer ν ("resonant order unsupported") and for s > 0.
ZetaValues zeta_functions(double nu, Complex lam, double s);

struct ZetaPair {
  Complex value, derivative;
};

/// zeta0 alone, for any real s.
ZetaPair zeta0(double nu, Complex lam, double s);

/// φ(pi, λ) of the tent coefficient: zeta0(x) on [0, pi/2] is continued by
/// A zeta1(x - pi) + B zeta2(x - pi) with (u, u') matched at pi/2, so
/// φ(pi) = B zeta2(0) = B i^ν / Gamma(1 - ν). The solve uses the reduced
/// zeta1 and Wronskian, which keeps λ = 0 regular.
Complex tent_phi_at_pi(double nu, Complex lam);

/// Closed form of zeta1 zeta2' - zeta2 zeta1' = -(sin νπ / π) (iνλ)^ν s^{ν-1}.
Complex zeta_wronskian(double nu, Complex lam, double s);

/// The same Wronskian divided by i^ν (iνλ)^ν, which is λ-independent:
/// (sin νπ / π) |s|^{ν-1} i^ν for s < 0.
Complex zeta_wronskian_reduced(double nu, double s);

/// True when ν is within 1e-12 of an integer.
bool is_integer_order(double nu);

}  // namespace ptsturm
