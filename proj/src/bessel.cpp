// SPDX-License-Identifier: Apache-2.0

#include "ptsturm/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace ptsturm {
namespace {

constexpr double kMaxOrder = 50.0;
constexpr double kMaxAbsZ = 1e4;
constexpr double kMaxImagZ = 700.0;
constexpr double kEpsMach = std::numeric_limits<double>::epsilon();
// Below this estimated relative error the preferred method is not second-guessed.
constexpr double kGoodEnough = 1e-13;

void check_order(double nu) {
  if (!std::isfinite(nu) || std::abs(nu) > kMaxOrder) {
    throw_invalid(fmt::format("Bessel order {} outside [-{}, {}]", nu, kMaxOrder, kMaxOrder));
  }
  if (nu < 0.0 && is_integer_order(nu)) {
    throw_invalid(fmt::format("negative integer Bessel order {} unsupported", nu));
  }
}

void check_argument(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw_invalid("Bessel argument not finite");
  if (std::abs(z) > kMaxAbsZ || std::abs(z.imag()) > kMaxImagZ) {
    throw_invalid(fmt::format("Bessel argument ({}, {}) out of supported range", z.real(), z.imag()));
  }
}

// Principal power with 0^e = 0 for e > 0.
Complex cpow(Complex base, double e) {
  if (base == Complex{}) {
    if (e > 0.0) return {};
    if (e == 0.0) return 1.0;
    return {std::numeric_limits<double>::infinity(), 0.0};
  }
  return std::pow(base, e);
}

Complex i_pow(double nu) { return std::polar(1.0, kPi * nu / 2.0); }

struct ReducedSeries {
  Complex sum;
  double est_rel_err;
};

// sum_k (-w)^k / (k! Gamma(k + nu + 1)) by forward term recurrence.
ReducedSeries reduced_series(double nu, Complex w) {
  Complex t = 1.0 / std::tgamma(nu + 1.0);
  Complex sum = t;
  double abs_sum = std::abs(t);
  const double wabs = std::abs(w);
  for (int k = 1; k < 2000; ++k) {
    t *= -w / (static_cast<double>(k) * (nu + k));
    sum += t;
    abs_sum += std::abs(t);
    if (k > std::sqrt(wabs) + 2 && std::abs(t) <= kEpsMach * 0.1 * std::abs(sum)) break;
  }
  const double mag = std::abs(sum);
  return {sum, mag > 0.0 ? 4.0 * kEpsMach * abs_sum / mag : 1.0};
}

}  // namespace

bool is_integer_order(double nu) { return std::abs(nu - std::round(nu)) < 1e-12; }

double bessel_series_radius(double nu) { return std::max(12.0, 2.0 * std::abs(nu)); }

BesselEval bessel_j_series(double nu, Complex z) {
  check_order(nu);
  check_argument(z);
  BesselEval out;
  out.order = nu;
  out.z = z;
  out.method = BesselMethod::Series;

  if (z == Complex{}) {
    if (nu < 0.0) throw_invalid("J_nu(0) is infinite for negative order");
    out.value = nu == 0.0 ? 1.0 : 0.0;
    if (nu == 0.0 || nu > 1.0) {
      out.derivative = 0.0;
    } else if (nu == 1.0) {
      out.derivative = 0.5;
    } else {
      throw_invalid("J_nu'(0) is infinite for 0 < nu < 1");
    }
    return out;
  }

  const Complex q = -z * z / 4.0;
  Complex t = 1.0 / std::tgamma(nu + 1.0);
  Complex sum = t;
  Complex dsum = t * nu;
  double abs_sum = std::abs(t);
  double abs_dsum = std::abs(t * nu);
  const double zabs = std::abs(z);
  for (int k = 1; k < 2000; ++k) {
    t *= q / (static_cast<double>(k) * (nu + k));
    sum += t;
    dsum += t * (nu + 2.0 * k);
    abs_sum += std::abs(t);
    abs_dsum += std::abs(t) * std::abs(nu + 2.0 * k);
    if (k > zabs / 2.0 + 2 && std::abs(t) * (nu + 2.0 * k) <= kEpsMach * 0.1 * std::abs(dsum) &&
        std::abs(t) <= kEpsMach * 0.1 * std::abs(sum)) {
      break;
    }
  }
  out.value = cpow(z / 2.0, nu) * sum;
  out.derivative = 0.5 * cpow(z / 2.0, nu - 1.0) * dsum;
  const double ev = std::abs(sum) > 0.0 ? abs_sum / std::abs(sum) : 1.0 / kEpsMach;
  const double ed = std::abs(dsum) > 0.0 ? abs_dsum / std::abs(dsum) : 1.0;
  out.est_rel_err = 4.0 * kEpsMach * std::max(ev, nu == 0.0 ? ev : ed);
  return out;
}

BesselEval bessel_j_asymptotic(double nu, Complex z) {
  check_order(nu);
  check_argument(z);
  if (z == Complex{}) throw_invalid("Hankel expansion undefined at z = 0");

  // J_nu(z e^{±i pi}) = e^{±i pi nu} J_nu(z): evaluate in the right half plane.
  Complex zz = z;
  Complex factor = 1.0;
  double chain = 1.0;  // d(-z)/dz
  if (z.real() < 0.0) {
    zz = -z;
    factor = std::polar(1.0, (z.imag() >= 0.0 ? 1.0 : -1.0) * kPi * nu);
    chain = -1.0;
  }

  const double mu = 4.0 * nu * nu;
  const Complex inv = 1.0 / zz;
  Complex P = 1.0, Q = 0.0, R = 1.0, S = 0.0;
  double a = 1.0;  // a_k(nu)
  Complex zpow = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  double last = 0.0;
  double max_term = 1.0;
  for (int k = 1; k < 400; ++k) {
    const double a_prev = a;
    a *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k);
    const double b = a_prev * (mu + 4.0 * k * k - 1.0) / (8.0 * k);
    zpow *= inv;
    const Complex ta = a * zpow;
    const Complex tb = b * zpow;
    const double size = std::max(std::abs(ta), std::abs(tb));
    const bool past_hump = (2.0 * k - 1.0) * (2.0 * k - 1.0) > mu;
    if (past_hump && size > prev) break;  // asymptotic series starts to diverge
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      P += sign * ta;
      R += sign * tb;
    } else {
      Q += sign * ta;
      S += sign * tb;
    }
    max_term = std::max(max_term, size);
    last = size;
    if (a == 0.0) {  // half-integer order: the expansion terminates
      last = 0.0;
      break;
    }
    if (past_hump) prev = size;
    if (size <= kEpsMach * 0.1) break;
  }

  const Complex omega = zz - nu * kPi / 2.0 - kPi / 4.0;
  const Complex c = std::cos(omega);
  const Complex s = std::sin(omega);
  const Complex pre = std::sqrt(2.0 / (kPi * zz));
  const Complex value = pre * (P * c - Q * s);
  const Complex deriv = -pre * (R * s + S * c);

  BesselEval out;
  out.order = nu;
  out.z = z;
  out.method = BesselMethod::Asymptotic;
  out.value = factor * value;
  out.derivative = chain * factor * deriv;
  const double trig = std::abs(c) + std::abs(s);
  const double abs_err = (last + 4.0 * kEpsMach * max_term) * trig * std::abs(pre);
  const double ev = std::abs(value) > 0.0 ? abs_err / std::abs(value) : 1.0;
  const double ed = std::abs(deriv) > 0.0 ? abs_err / std::abs(deriv) : 1.0;
  // The phase omega carries the rounding error of |z|.
  out.est_rel_err = std::max(ev, ed) + 4.0 * kEpsMach * std::abs(zz);
  return out;
}

BesselEval bessel_j_eval(double nu, Complex z) {
  check_order(nu);
  check_argument(z);
  const bool series_first = std::abs(z) <= bessel_series_radius(nu);
  BesselEval first = series_first ? bessel_j_series(nu, z) : bessel_j_asymptotic(nu, z);
  if (first.est_rel_err <= kGoodEnough || z == Complex{}) return first;
  BesselEval second = series_first ? bessel_j_asymptotic(nu, z) : bessel_j_series(nu, z);
  return second.est_rel_err < first.est_rel_err ? second : first;
}

Complex bessel_j(double nu, Complex z) { return bessel_j_eval(nu, z).value; }

Complex bessel_j_prime(double nu, Complex z) { return bessel_j_eval(nu, z).derivative; }

Complex bessel_j_reduced(double nu, Complex w) {
  if (!std::isfinite(nu) || std::abs(nu) > kMaxOrder + 1.0) {
    throw_invalid(fmt::format("Bessel order {} out of range", nu));
  }
  const ReducedSeries direct = reduced_series(nu, w);
  if (direct.est_rel_err <= kGoodEnough || std::abs(w) < 1.0) return direct.sum;
  // Large |w| on an oscillatory ray: go through J_nu, whose evaluator picks
  // the better of the series and the Hankel expansion.
  const Complex root = std::sqrt(w);
  const BesselEval j = bessel_j_eval(nu, 2.0 * root);
  if (j.est_rel_err >= direct.est_rel_err) return direct.sum;
  return j.value * cpow(root, -nu);
}

ZetaValues zeta_functions(double nu, Complex lam, double s) {
  if (is_integer_order(nu)) throw_invalid("resonant order unsupported");
  if (!(s <= 0.0)) throw_invalid("zeta functions are defined for s <= 0");
  const Complex g = kI * nu * lam;  // i nu lambda
  const double a = -s;              // |s|
  const Complex w1 = g * a;
  const Complex inu = i_pow(nu);
  const Complex k = inu * cpow(g, nu);

  ZetaValues z;
  const ZetaPair z0 = zeta0(nu, lam, s);
  z.zeta0 = z0.value;
  z.dzeta0 = z0.derivative;

  const Complex lam_nu = bessel_j_reduced(nu, w1);
  z.zeta1_hat = std::pow(a, nu) * lam_nu;
  z.dzeta1_hat = -nu * std::pow(a, nu - 1.0) * lam_nu + g * std::pow(a, nu) * bessel_j_reduced(nu + 1.0, w1);
  z.zeta1 = k * z.zeta1_hat;
  z.dzeta1 = k * z.dzeta1_hat;
  z.zeta2 = inu * bessel_j_reduced(-nu, w1);
  z.dzeta2 = inu * g * bessel_j_reduced(1.0 - nu, w1);
  return z;
}

ZetaPair zeta0(double nu, Complex lam, double s) {
  if (is_integer_order(nu)) throw_invalid("resonant order unsupported");
  const Complex g = kI * nu * lam;
  const double gam = std::tgamma(nu + 1.0);
  return {gam * bessel_j_reduced(nu, g * s), -gam * g * bessel_j_reduced(nu + 1.0, g * s)};
}

Complex tent_phi_at_pi(double nu, Complex lam) {
  const double s = kPi / 2.0;
  const ZetaPair left = zeta0(nu, lam, s);
  const ZetaValues right = zeta_functions(nu, lam, -s);
  const Complex det = right.zeta1_hat * left.derivative - right.dzeta1_hat * left.value;
  const Complex b = det / zeta_wronskian_reduced(nu, -s);
  return b * i_pow(nu) / std::tgamma(1.0 - nu);
}

Complex zeta_wronskian(double nu, Complex lam, double s) {
  return i_pow(nu) * cpow(kI * nu * lam, nu) * zeta_wronskian_reduced(nu, s);
}

Complex zeta_wronskian_reduced(double nu, double s) {
  if (!(s < 0.0)) throw_invalid("reduced Wronskian needs s < 0");
  return std::sin(nu * kPi) / kPi * std::pow(-s, nu - 1.0) * i_pow(nu);
}

}  // namespace ptsturm
