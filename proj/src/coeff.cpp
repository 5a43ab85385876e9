// SPDX-License-Identifier: Apache-2.0

#include "ptsturm/coeff.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <boost/math/interpolators/barycentric_rational.hpp>
#include <boost/math/interpolators/cubic_hermite.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ptsturm {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

constexpr double kQuadTol = 1e-13;
constexpr unsigned kQuadDepth = 15;

// Reduce to (-pi, pi].
double wrap_angle(double x) {
  double r = std::remainder(x, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

// Integrate g over [a, b] split at the given interior points.
template <class F>
double integrate_split(F&& g, double a, double b, std::vector<double> cuts, double* err_out) {
  std::vector<double> nodes{a};
  std::sort(cuts.begin(), cuts.end());
  for (double c : cuts)
    if (c > a && c < b) nodes.push_back(c);
  nodes.push_back(b);
  double total = 0.0;
  double err = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    double e = 0.0;
    total += Kronrod::integrate(g, nodes[k], nodes[k + 1], kQuadDepth, kQuadTol, &e);
    err += std::abs(e);
  }
  if (err_out) *err_out = err;
  return total;
}

}  // namespace

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Sine:
      return "sine";
    case ProfileKind::PiecewiseLinear:
      return "piecewise_linear";
    case ProfileKind::Custom:
      return "custom";
  }
  return "custom";
}

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < kPi / 2.0))
    throw_invalid(fmt::format("eps = {} outside the admissible range (0, pi/2)", eps));
}

CoefficientProfile::CoefficientProfile(ProfileKind kind, double eps, HalfWave half_wave,
                                       EndpointDerivatives ends, std::vector<double> breakpoints,
                                       std::string id)
    : kind_(kind),
      eps_(eps),
      half_wave_(std::make_shared<const HalfWave>(std::move(half_wave))),
      ends_(ends),
      id_(std::move(id)) {
  for (double b : breakpoints) {
    const double r = std::abs(wrap_angle(b));
    if (r < kDeltaMin || r > kPi - kDeltaMin)
      throw_invalid("breakpoints must exclude the zeros of f at multiples of pi");
    breakpoints_.push_back(r);
    breakpoints_.push_back(-r);
  }
  std::sort(breakpoints_.begin(), breakpoints_.end());
  breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
}

double CoefficientProfile::operator()(double x) const {
  const double r = wrap_angle(x);
  if (r == 0.0 || r == kPi) return 0.0;
  return r > 0.0 ? (*half_wave_)(r) : -(*half_wave_)(-r);
}

std::vector<double> CoefficientProfile::breakpoints_between(double a, double b) const {
  if (a > b) std::swap(a, b);
  std::vector<double> out;
  for (double p : breakpoints_)
    if (p > a && p < b) out.push_back(p);
  return out;
}

CoefficientProfile CoefficientProfile::with_eps(double eps) const {
  CoefficientProfile copy = *this;
  copy.eps_ = eps;
  return copy;
}

CoefficientProfile make_sine(double eps) {
  check_eps(eps);
  EndpointDerivatives ends{kFPrimeZero, -kFPrimeZero, 0.0, 0.0};
  return {ProfileKind::Sine, eps, [](double x) { return kFPrimeZero * std::sin(x); }, ends, {},
          "sine"};
}

CoefficientProfile make_piecewise_linear(double eps) {
  check_eps(eps);
  EndpointDerivatives ends{kFPrimeZero, -kFPrimeZero, 0.0, 0.0};
  auto tent = [](double x) { return x <= kPi / 2.0 ? kFPrimeZero * x : kFPrimeZero * (kPi - x); };
  return {ProfileKind::PiecewiseLinear, eps, tent, ends, {kPi / 2.0}, "piecewise_linear"};
}

CoefficientProfile make_custom(std::span<const std::pair<double, double>> samples, double eps,
                               const EndpointDerivatives& ends) {
  check_eps(eps);
  if (std::abs(ends.fprime0 - kFPrimeZero) > 1e-12)
    throw_invalid(fmt::format("f'(0) = {} but the normalisation requires 2/pi", ends.fprime0));
  if (!(ends.fprime_pi < 0.0)) throw_invalid("f'(pi) must be negative");

  std::vector<std::pair<double, double>> pts(samples.begin(), samples.end());
  std::sort(pts.begin(), pts.end());
  std::vector<double> x{0.0};
  std::vector<double> y{0.0};
  for (auto [xi, yi] : pts) {
    if (xi <= 0.0 || xi >= kPi) continue;
    if (!(yi > 0.0))
      throw_invalid(fmt::format("non-positive interior value f({}) = {}", xi, yi));
    if (xi <= x.back()) throw_invalid("sample abscissae must be distinct");
    x.push_back(xi);
    y.push_back(yi);
  }
  if (x.size() < 4) throw_invalid("custom profile needs at least three interior samples");
  x.push_back(kPi);
  y.push_back(0.0);

  const std::size_t n = x.size();
  std::vector<double> d(n);
  {
    boost::math::barycentric_rational<double> rational(x.data(), y.data(), n, 3);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = rational.prime(x[i]);
  }
  d.front() = ends.fprime0;
  d.back() = ends.fprime_pi;
  // Bernstein coefficients y_i ± h d_i / 3 of each piece must stay non-negative.
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double lo = -3.0 * y[i] / (x[i + 1] - x[i]);
    const double hi = 3.0 * y[i] / (x[i] - x[i - 1]);
    d[i] = std::clamp(d[i], lo, hi);
  }

  auto spline = std::make_shared<boost::math::interpolators::cubic_hermite<std::vector<double>>>(
      std::move(x), std::move(y), std::move(d));
  auto half = [spline](double t) { return (*spline)(std::clamp(t, 0.0, kPi)); };
  return {ProfileKind::Custom, eps, half, ends, {}, "custom"};
}

const ValidationCheck* ValidationReport::find(std::string_view name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

ValidationReport validate(const CoefficientProfile& profile, int grid_size) {
  if (grid_size < 16) throw_invalid("validate: grid_size must be at least 16");
  const auto& f = profile;
  const int n = grid_size;

  // Interior grid of (-pi, pi) that avoids 0 and ±pi.
  std::vector<double> xs(n);
  for (int k = 0; k < n; ++k) xs[k] = -kPi + 2.0 * kPi * (k + 0.5) / n;

  double scale = 0.0;
  for (double x : xs) scale = std::max(scale, std::abs(f(x)));
  if (scale == 0.0) scale = 1.0;

  double odd = 0.0;
  double anti = 0.0;
  double positivity = 0.0;
  for (double x : xs) {
    odd = std::max(odd, std::abs(f(-x) + f(x)));
    if (x < 0.0) anti = std::max(anti, std::abs(f(x + kPi) + f(x)));
    if (x > 0.0 && x < kPi) positivity = std::max(positivity, std::max(0.0, -f(x)));
  }
  // Positivity is strict: a zero interior sample counts as a violation of size scale.
  for (double x : xs)
    if (x > 0.0 && f(x) == 0.0) positivity = std::max(positivity, scale);

  const double zeros = std::max({std::abs(f(0.0)), std::abs(f(kPi)), std::abs(f(-kPi))});

  const double h = 1e-6;
  const double measured_slope = f(h) / h;
  const double slope_declared = std::abs(profile.fprime0() - kFPrimeZero);
  // The difference quotient carries an O(h f'') bias.
  const double slope_measured = std::max(0.0, std::abs(measured_slope - kFPrimeZero) - 10.0 * h);

  const double eps = profile.eps();
  const double eps_violation = eps <= 0.0 ? -eps : std::max(0.0, eps - kPi / 2.0);

  ValidationReport report;
  auto add = [&](std::string name, double violation, bool relative_to_scale = true) {
    const double v = relative_to_scale ? violation / scale : violation;
    report.checks.push_back({std::move(name), v, v < kValidationTolerance});
  };
  add("oddness", odd);
  add("anti_periodicity", anti);
  add("positivity", positivity);
  add("zeros_at_multiples_of_pi", zeros);
  add("fprime0_declared", slope_declared, false);
  add("fprime0_measured", slope_measured, false);
  report.checks.push_back({"eps_range", eps_violation, eps > 0.0 && eps < kPi / 2.0});
  report.passed = std::all_of(report.checks.begin(), report.checks.end(),
                              [](const ValidationCheck& c) { return c.passed; });
  return report;
}

DerivedWeights::DerivedWeights(CoefficientProfile profile) : profile_(std::move(profile)) {}

double DerivedWeights::log_ratio(double x) const {
  if (!(x >= kDeltaMin && x <= kPi - kDeltaMin))
    throw_invalid(fmt::format("p({}) requested inside the endpoint offset: endpoint too close", x));
  const auto& f = profile_;
  const double eps = f.eps();
  const double mid = kPi / 2.0;
  if (x == mid) return 0.0;

  std::vector<double> cuts;
  double err = 0.0;
  double value = 0.0;
  if (x < mid) {
    // t = e^s keeps the integrand bounded as t -> 0.
    for (double b : f.breakpoints_between(x, mid)) cuts.push_back(std::log(b));
    auto g = [&](double s) {
      const double t = std::exp(s);
      return t / (eps * f(t));
    };
    value = -integrate_split(g, std::log(x), std::log(mid), cuts, &err);
  } else {
    for (double b : f.breakpoints_between(mid, x)) cuts.push_back(std::log(kPi - b));
    auto g = [&](double s) {
      const double y = std::exp(s);
      return y / (eps * f(kPi - y));
    };
    value = integrate_split(g, std::log(kPi - x), std::log(mid), cuts, &err);
  }
  if (!std::isfinite(value) || err > 1e-9 * (1.0 + std::abs(value)))
    throw_numeric(fmt::format("quadrature for p did not converge at x = {}: endpoint too close", x));
  return value;
}

double DerivedWeights::p(double x) const { return profile_(x) * std::exp(log_ratio(x)); }

double DerivedWeights::w(double x) const { return std::exp(log_ratio(x)); }

double eval_p(const DerivedWeights& weights, double x) { return weights.p(x); }

double wkb_integral(const CoefficientProfile& profile) {
  const auto& f = profile;
  const double mid = kPi / 2.0;
  const double root_mid = std::sqrt(mid);
  double err_left = 0.0;
  double err_right = 0.0;

  // x = s^2 on [0, pi/2]; the integrand 2 s / sqrt(f(s^2)) -> 2 / sqrt(f'(0)).
  auto left = [&](double s) {
    const double x = s * s;
    if (x < kDeltaMin) return 2.0 / std::sqrt(f.fprime0());
    return 2.0 * s / std::sqrt(f(x));
  };
  // x = pi - s^2 on [pi/2, pi]. pi - y loses log10(pi / y) digits, and that
  // noise inflates the Kronrod error estimate, so tiny y uses the endpoint jet.
  const double fpp_pi = f.fsecond_pi().value_or(0.0);
  auto right = [&](double s) {
    const double y = s * s;
    if (y < 1e-6) return 2.0 / std::sqrt(-f.fprime_pi() + 0.5 * fpp_pi * y);
    return 2.0 * s / std::sqrt(f(kPi - y));
  };
  std::vector<double> cuts_left;
  std::vector<double> cuts_right;
  for (double b : f.breakpoints_between(0.0, mid)) cuts_left.push_back(std::sqrt(b));
  for (double b : f.breakpoints_between(mid, kPi)) cuts_right.push_back(std::sqrt(kPi - b));
  const double total = integrate_split(left, 0.0, root_mid, cuts_left, &err_left) +
                       integrate_split(right, 0.0, root_mid, cuts_right, &err_right);
  if (!std::isfinite(total) || err_left + err_right > 1e-8 * total)
    throw_numeric("WKB quadrature failed near the endpoints");
  return total;
}

double wkb_guess(const CoefficientProfile& profile, int n) {
  if (n < 1) throw_invalid("wkb_guess: n must be positive");
  const double integral = wkb_integral(profile);
  return (n / integral) * (n / integral);
}

}  // namespace ptsturm
