// SPDX-License-Identifier: Apache-2.0

#include "ptsturm/shoot.hpp"

#include <array>
#include <memory>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "ptsturm/bessel.hpp"

namespace ptsturm {
namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 4>;  // Re u, Im u, Re v, Im v

constexpr int kMaxSteps = 2'000'000;

void check_lam(Complex lam, const ShootOptions& options) {
  if (!std::isfinite(lam.real()) || !std::isfinite(lam.imag())) throw_invalid("lambda not finite");
  if (std::abs(lam) > options.lam_max) {
    throw_invalid(fmt::format("|lambda| = {} exceeds lam_max = {}", std::abs(lam), options.lam_max));
  }
}

void check_point(double x) {
  const double r = std::abs(x);
  if (!(r >= kDeltaMin * (1 - 1e-12) && r <= kPi - kDeltaMin * (1 - 1e-12))) {
    throw_invalid(fmt::format("integration point {} closer than {} to a singular endpoint", x, kDeltaMin));
  }
}

struct Rhs {
  const CoefficientProfile* profile;
  Complex lam;
  double eps;

  void operator()(const State& y, State& dy, double x) const {
    const Complex u{y[0], y[1]};
    const Complex v{y[2], y[3]};
    const double fx = (*profile)(x);
    const Complex du = -v / fx;
    const Complex dv = kI * lam * u / eps - v / (eps * fx);
    dy = {du.real(), du.imag(), dv.real(), dv.imag()};
  }
};

// Propagates y over [a, b] (either direction) with b never overshot.
void integrate_segment(const Rhs& rhs, State& y, double a, double b, const ShootOptions& options, int& steps,
                       std::vector<double>* record) {
  auto stepper = odeint::make_controlled(options.tol_abs, options.tol_rel, odeint::runge_kutta_dopri5<State>());
  const double dir = b > a ? 1.0 : -1.0;
  // A step of a tenth of the distance to the nearest singular endpoint is a safe start.
  const double dist = std::min(std::abs(a), kPi - std::abs(a));
  double dt = dir * std::min(std::abs(b - a), 0.1 * dist);
  double t = a;
  while (t != b) {
    const bool last = std::abs(b - t) <= std::abs(dt);
    if (last) dt = b - t;
    const double t_before = t;
    const odeint::controlled_step_result res = stepper.try_step(rhs, y, t, dt);
    if (res == odeint::success) {
      if (last) t = b;
      if (record) record->push_back(t);
      if (++steps > kMaxSteps) throw_numeric("step budget exhausted: lambda outside stable range");
      for (double c : y) {
        if (!std::isfinite(c)) throw_numeric("lambda outside stable range (non-finite state)");
      }
    } else if (std::abs(dt) < 1e-14 * std::max(1.0, std::abs(t_before))) {
      throw_numeric(fmt::format("step-size underflow at x = {}: approach endpoint via frobenius basis instead", t));
    }
  }
}

void check_state(const State& y) {
  for (double c : y) {
    if (!std::isfinite(c)) throw_numeric("lambda outside stable range (non-finite state)");
  }
}

// Fixed steps through grid (scaled by side), which must run from a to b.
void replay_grid(const Rhs& rhs, State& y, double a, double b, const std::vector<double>& grid, int& steps) {
  const double side = b > 0.0 ? 1.0 : -1.0;
  if (grid.empty() || std::abs(side * grid.back() - b) > 1e-15 * kPi) {
    throw_invalid("step grid does not end at the requested point");
  }
  odeint::runge_kutta_dopri5<State> stepper;
  double t = a;
  for (double g : grid) {
    const double next = side * g;
    stepper.do_step(rhs, y, t, next - t);
    t = next;
    ++steps;
  }
  check_state(y);
}

struct Match {
  Complex c1, c2, det;
};

Match extract(const ShootingState& end, const ShootingState& psi, double eps) {
  const Complex det = psi.u - eps * psi.v;
  return {(end.u - eps * end.v) / det, (psi.u * end.v - psi.v * end.u) / det, det};
}

}  // namespace

ShootingState integrate_recording(const CoefficientProfile& profile, Complex lam, const ShootingState& from_state,
                                  double to_x, const ShootOptions& options, int* steps, std::vector<double>* record);

namespace {

// side = +1 shoots over (0, pi), side = -1 over (-pi, 0).
TransferResult transfer_once(const CoefficientProfile& profile, Complex lam, double side, const ShootOptions& options) {
  check_lam(lam, options);
  TransferResult r;
  r.lam = lam;
  if (options.grid && !(options.delta0 && options.delta_pi)) throw_invalid("a step grid needs delta0 and delta_pi");
  r.delta0 = options.delta0.value_or(default_delta(profile, lam, Endpoint::Zero));
  r.delta_pi = options.delta_pi.value_or(default_delta(profile, lam, Endpoint::Pi));

  for (int attempt = 0; attempt < 2; ++attempt) {
    const LocalBasis b0 = basis_at_zero(profile, lam, r.delta0);
    const LocalBasis bp = basis_at_pi(profile, lam, r.delta_pi);
    // The jets depend on the endpoint slope only, and f' is even, so the same
    // slopes apply at 0- and -pi; only the offsets change sign.
    const double off0 = side * r.delta0;
    const double offp = -side * r.delta_pi;
    const double s0 = profile.fprime0();
    const double sp = profile.fprime_pi();
    ShootingState start{off0, 1.0 + b0.jet_slope * off0, -s0 * off0 * b0.jet_slope};
    const ShootingState psi{side * kPi + offp, 1.0 + bp.jet_slope * offp, -sp * offp * bp.jet_slope};

    int steps = 0;
    std::vector<double> points;
    const ShootingState end = integrate_recording(profile, lam, start, psi.x, options, &steps,
                                                  options.record_grid ? &points : nullptr);
    const Match m = extract(end, psi, profile.eps());
    r.steps += steps;
    if (std::abs(m.det) > 1e-6) {
      r.c1 = m.c1;
      r.c2 = m.c2;
      r.phi_pi = m.c1;
      if (options.record_grid) {
        for (double& p : points) p *= side;
        r.grid = std::make_shared<const std::vector<double>>(std::move(points));
      }
      return r;
    }
    if (options.grid) break;  // the grid pins delta_pi
    r.delta_pi = std::min(4.0 * r.delta_pi, kDeltaMax);
  }
  throw_numeric("ill-conditioned endpoint match");
}

TransferResult transfer(const CoefficientProfile& profile, Complex lam, double side, const ShootOptions& options) {
  TransferResult r = transfer_once(profile, lam, side, options);
  if (!options.estimate_error) {
    r.est_err = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  ShootOptions fine = options;
  fine.tol_rel /= 16.0;
  fine.tol_abs /= 16.0;
  fine.estimate_error = false;
  fine.delta0 = r.delta0;
  fine.delta_pi = r.delta_pi;
  const TransferResult f = transfer_once(profile, lam, side, fine);
  r.est_err = std::abs(r.phi_pi - f.phi_pi);
  return r;
}

}  // namespace

ShootingState integrate(const CoefficientProfile& profile, Complex lam, const ShootingState& from_state, double to_x,
                        const ShootOptions& options, int* steps) {
  return integrate_recording(profile, lam, from_state, to_x, options, steps, nullptr);
}

ShootingState integrate_recording(const CoefficientProfile& profile, Complex lam, const ShootingState& from_state,
                                  double to_x, const ShootOptions& options, int* steps, std::vector<double>* record) {
  check_lam(lam, options);
  check_point(from_state.x);
  check_point(to_x);
  if ((from_state.x > 0) != (to_x > 0)) throw_invalid("integration may not cross a singular point");

  const Rhs rhs{&profile, lam, profile.eps()};
  State y{from_state.u.real(), from_state.u.imag(), from_state.v.real(), from_state.v.imag()};
  std::vector<double> stops = profile.breakpoints_between(from_state.x, to_x);
  if (to_x < from_state.x) std::reverse(stops.begin(), stops.end());
  stops.push_back(to_x);

  int count = 0;
  if (options.grid) {
    replay_grid(rhs, y, from_state.x, to_x, *options.grid, count);
  } else {
    double a = from_state.x;
    for (double b : stops) {
      integrate_segment(rhs, y, a, b, options, count, record);
      a = b;
    }
  }
  if (steps) *steps += count;
  return {to_x, {y[0], y[1]}, {y[2], y[3]}};
}

TransferResult phi_at_pi(const CoefficientProfile& profile, Complex lam, const ShootOptions& options) {
  return transfer(profile, lam, 1.0, options);
}

TransferResult phi_at_minus_pi(const CoefficientProfile& profile, Complex lam, const ShootOptions& options) {
  return transfer(profile, lam, -1.0, options);
}

Complex d_of_lambda(const CoefficientProfile& profile, Complex lam, const ShootOptions& options) {
  ShootOptions o = options;
  o.estimate_error = false;
  return phi_at_pi(profile, lam, o).phi_pi - phi_at_pi(profile, -lam, o).phi_pi;
}

Complex g_of_z(const CoefficientProfile& profile, Complex z, const ShootOptions& options) {
  ShootOptions o = options;
  o.estimate_error = false;
  return phi_at_pi(profile, kI * z * z, o).phi_pi;
}

RhoSample rho_general(const CoefficientProfile& profile, Complex z, const ShootOptions& options) {
  RhoSample s;
  s.z = z;
  s.g_z = g_of_z(profile, z, options);
  s.g_iz = g_of_z(profile, kI * z, options);
  if (!(std::abs(s.g_z) > kRhoUnderflow)) throw_numeric("pole/zero proximity: |g(z)| below underflow guard");
  s.rho = s.g_iz / s.g_z;
  if (!std::isfinite(s.rho.real()) || !std::isfinite(s.rho.imag())) throw_numeric("pole/zero proximity");
  s.modulus = std::abs(s.rho);
  return s;
}

Complex bessel_phi_at_pi(double eps, Complex lam) {
  check_eps(eps);
  return tent_phi_at_pi(kPi / (2.0 * eps), lam);
}

Complex bessel_F(double eps, Complex lam) {
  check_eps(eps);
  const double nu = kPi / (2.0 * eps);
  const Complex w = std::sqrt(2.0 * kI * nu * lam * kPi);
  const BesselEval j = bessel_j_eval(nu, w);
  return std::pow(lam, 0.5 - nu) * j.derivative * j.value;
}

RhoSample bessel_rho(double eps, Complex z) {
  check_eps(eps);
  const double nu = kPi / (2.0 * eps);
  const BesselEval a = bessel_j_eval(nu, z);
  const BesselEval b = bessel_j_eval(nu, kI * z);
  RhoSample s;
  s.z = z;
  // Numerator and denominator of the ratio, in the g(iz)/g(z) slots.
  s.g_iz = a.derivative * a.value;
  s.g_z = b.derivative * b.value;
  if (!(std::abs(s.g_z) > kRhoUnderflow)) throw_numeric("pole/zero proximity: J_nu' J_nu(iz) vanishes");
  s.rho = s.g_iz / s.g_z;
  s.modulus = std::abs(s.rho);
  return s;
}

}  // namespace ptsturm
