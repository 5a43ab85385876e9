// SPDX-License-Identifier: Apache-2.0

#include "ptsturm/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <span>

#include <fmt/format.h>

#include "ptsturm/bessel.hpp"
#include "ptsturm/parallel.hpp"

namespace ptsturm {
namespace {

// Pinned acceptance tolerances.
constexpr double kResidualFactor = 1e-6;   // |d(λ)| <= kResidualFactor (1 + |λ|)
constexpr double kWindingSnap = 0.01;
constexpr double kBesselOracleTol = 1e-5;
constexpr double kWronskianTol = 1e-8;
constexpr double kRayTol = 1e-4;
constexpr double kAlphaResidual = 1e-6;
constexpr double kAlphaR2 = 0.999;
constexpr double kGalerkinRealTol = 1e-8;
constexpr double kGalerkinMatchTol = 1e-4;
constexpr double kSymmetryTol = 1e-7;

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool passed = true;
  std::string detail;

  void fail_if(bool bad) { passed = passed && !bad; }
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

std::string config_name(const CoefficientProfile& p) { return fmt::format("{} eps={}", p.id(), p.eps()); }

Outcome check_reality(const VerifyOptions& o) {
  Outcome out;
  const CoefficientProfile configs[] = {make_sine(0.5), make_sine(1.0), make_piecewise_linear(0.5),
                                        make_piecewise_linear(1.0)};
  constexpr int kCount = 8;
  for (const auto& p : configs) {
    // One extra root places the box edge midway between the 8th and 9th.
    const RealEigsResult eigs = find_real_eigs(p, kCount + 1, o.spectrum.shoot.lam_max, o.spectrum);
    const std::vector<double> pos = eigs.positive();
    double worst = 0.0;
    for (const auto& e : eigs.eigs) {
      if (std::abs(e.lambda) <= pos[kCount - 1]) worst = std::max(worst, e.residual / (1.0 + std::abs(e.lambda)));
    }
    const double edge = 0.5 * (pos[kCount - 1] + pos[kCount]);
    const std::vector<double> roots = eigs.all_roots();
    const CertifyResult axis = certify_box(p, {-edge, edge, -2.0, 2.0}, roots, o.spectrum);
    const CertifyResult upper = certify_box(p, {-edge, edge, 0.25, 2.0}, roots, o.spectrum);
    const bool ok = worst <= kResidualFactor && axis.ok && upper.ok && axis.expected == 2 * kCount + 1 &&
                    std::abs(axis.winding - axis.count) <= kWindingSnap;
    out.fail_if(!ok);
    out.note(fmt::format("{}: Lambda={:.4f} count {}/{} off-axis {} worst residual {:.1e}", config_name(p), edge,
                         axis.count, axis.expected, upper.count, worst));
  }
  return out;
}

Outcome check_bessel_oracle(const VerifyOptions& o) {
  Outcome out;
  constexpr int kGrid = 10;
  for (double eps : {0.5, 1.0}) {
    const CoefficientProfile p = make_piecewise_linear(eps);
    const std::vector<double> errs = parallel_map(kGrid * kGrid, [&](std::size_t k) {
      const Complex lam{-5.0 + 10.0 * static_cast<double>(k / kGrid) / (kGrid - 1),
                        -5.0 + 10.0 * static_cast<double>(k % kGrid) / (kGrid - 1)};
      return relative_difference(phi_at_pi(p, lam, o.spectrum.shoot).phi_pi, bessel_phi_at_pi(eps, lam));
    });
    const double worst = *std::max_element(errs.begin(), errs.end());
    out.fail_if(!(worst <= kBesselOracleTol));
    out.note(fmt::format("{}: worst rel diff {:.2e} over {} points", config_name(p), worst, errs.size()));
  }
  return out;
}

Outcome check_wronskian(const VerifyOptions&) {
  Outcome out;
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  double worst_unsigned = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 100; ++k) {
    double nu = 1.05 + 2.9 * unit(rng);
    if (std::abs(nu - std::round(nu)) < 0.05) nu += 0.1;
    const Complex lam = std::polar(4.0 * std::sqrt(unit(rng)), 2.0 * kPi * unit(rng));
    const double s = -(0.1 + (kPi / 2.0 - 0.1) * unit(rng));
    const ZetaValues z = zeta_functions(nu, lam, s);
    const Complex numeric = z.zeta1 * z.dzeta2 - z.zeta2 * z.dzeta1;
    const Complex closed = zeta_wronskian(nu, lam, s);
    worst = std::max(worst, relative_difference(numeric, closed));
    worst_unsigned = std::min(worst_unsigned, relative_difference(numeric, -closed));
  }
  out.fail_if(!(worst <= kWronskianTol));
  out.note(fmt::format("100 triples: worst rel err {:.2e} (signed form); unsigned form off by >= {:.2f}", worst,
                       worst_unsigned));
  return out;
}

Outcome check_sector(const VerifyOptions& o) {
  Outcome out;
  for (const auto& p : {make_sine(0.5), make_piecewise_linear(0.5)}) {
    const RhoMap map = rho_map(p, 16, 64, 0.25, 4.0, kRayTol, o.spectrum.shoot);
    out.fail_if(map.violations != 0);
    out.note(fmt::format("{}: violations {}, flagged {}, max inner {:.6f}, min outer {:.6f}, ray dev {:.1e}",
                         config_name(p), map.violations, map.flagged, map.max_inner, map.min_outer,
                         map.max_ray_deviation));
  }
  return out;
}

Outcome check_alphas(const VerifyOptions& o) {
  Outcome out;
  constexpr int kCount = 12;
  constexpr int kTailCount = 20;
  for (const auto& p : {make_sine(0.5), make_piecewise_linear(0.5)}) {
    // The criterion is about the first 12; the next 8 only sharpen the tail sum.
    const AlphaResult a = find_alphas(p, kTailCount, o.spectrum);
    const auto first = [](const std::vector<double>& v) { return std::span<const double>(v).first(kCount); };
    const bool positive = std::all_of(a.r.begin(), a.r.begin() + kCount, [](double r) { return r > 0.0; });
    const double worst_res = *std::max_element(a.residuals.begin(), a.residuals.begin() + kCount);
    std::vector<double> n(kCount);
    for (int k = 0; k < kCount; ++k) n[k] = k + 1.0;
    const LinearFit fit = linear_fit(n, first(a.alphas));

    // 20 sample points inside |z| < alpha_1, away from the zeros and poles.
    std::vector<Complex> zs;
    for (double r : {0.3, 0.5, 0.7, 0.85, 0.95})
      for (double t : {0.0, kPi / 8.0, 3.0 * kPi / 8.0, 5.0 * kPi / 8.0}) zs.push_back(std::polar(r, t));
    const std::vector<double> excess = parallel_map(zs.size(), [&](std::size_t i) {
      const ProductRho prod = rho_product(a.alphas, zs[i], kCount);
      const RhoSample shot = rho_general(p, zs[i], o.spectrum.shoot);
      return std::abs(prod.value - shot.rho) / prod.tail_bound;
    });
    const double worst_ratio = *std::max_element(excess.begin(), excess.end());
    const bool ok = positive && worst_res <= kAlphaResidual && fit.r_squared >= kAlphaR2 && worst_ratio <= 1.0;
    out.fail_if(!ok);
    out.note(fmt::format("{}: alpha_1={:.6f} alpha_12={:.6f} R2={:.6f} worst residual {:.1e} "
                         "max |product - shooting| / tail bound {:.3f}",
                         config_name(p), a.alphas.front(), a.alphas[kCount - 1], fit.r_squared, worst_res, worst_ratio));
  }
  return out;
}

Outcome check_galerkin(const VerifyOptions& o) {
  Outcome out;
  constexpr double kEps = 0.5;
  const std::vector<Complex> all = galerkin_eigs(galerkin_matrix(galerkin_eps_tilde(kEps), 64));
  std::vector<Complex> low;
  for (Complex z : all)
    if (std::abs(z) > 1e-6 && low.size() < 6) low.push_back(z);
  const std::vector<double> shot = find_real_eigs(make_sine(kEps), 3, o.spectrum.shoot.lam_max, o.spectrum).positive();
  double worst_imag = 0.0;
  double worst_rel = 0.0;
  int positive = 0;
  for (Complex z : low) {
    worst_imag = std::max(worst_imag, std::abs(z.imag()));
    if (z.real() > 0.0) ++positive;
    double best = std::numeric_limits<double>::infinity();
    for (double s : shot) best = std::min(best, std::abs(std::abs(z.real()) - s) / s);
    worst_rel = std::max(worst_rel, best);
  }
  out.fail_if(!(low.size() == 6 && positive == 3 && worst_imag <= kGalerkinRealTol && worst_rel <= kGalerkinMatchTol));
  out.note(fmt::format("N=64: max |Im| {:.1e}, worst rel diff to shooting {:.2e}", worst_imag, worst_rel));
  return out;
}

Outcome check_delta_sweep(const VerifyOptions& o) {
  Outcome out;
  const double deltas[] = {0.3, 0.15, 0.075};
  const DeltaTable t = delta_family_experiment(make_sine(0.5), deltas, 4, o.spectrum);
  for (int n = 0; n < 4; ++n) {
    const double a = t.rows[0].differences[n], b = t.rows[1].differences[n], c = t.rows[2].differences[n];
    out.fail_if(!(a > b && b > c));
    out.note(fmt::format("n={}: {:.2e} > {:.2e} > {:.2e}", n + 1, a, b, c));
  }
  return out;
}

Outcome check_symmetry(const VerifyOptions& o) {
  Outcome out;
  constexpr double kFloor = 1e-14;
  std::mt19937_64 rng(kSeed + 8);
  std::uniform_real_distribution<double> re(-10.0, 10.0), im(-3.0, 3.0);
  std::vector<Complex> lams(50);
  for (auto& l : lams) l = {re(rng), im(rng)};
  for (const auto& p : {make_sine(0.5), make_piecewise_linear(0.5)}) {
    const auto& so = o.spectrum.shoot;
    struct Errs {
      double eq4, eq5, anti, quad;
    };
    const std::vector<Errs> errs = parallel_map(lams.size(), [&](std::size_t i) {
      const Complex l = lams[i];
      const Complex phi = phi_at_pi(p, l, so).phi_pi;
      const Complex phi_neg = phi_at_pi(p, -l, so).phi_pi;
      const Complex phi_left = phi_at_minus_pi(p, l, so).phi_pi;
      const Complex phi_refl = phi_at_pi(p, -std::conj(l), so).phi_pi;
      const Complex d = phi - phi_neg;
      const Complex d_conj = d_of_lambda(p, std::conj(l), so);
      return Errs{relative_difference(phi_left, phi_neg, kFloor), relative_difference(phi_refl, std::conj(phi), kFloor),
                  relative_difference(d_of_lambda(p, -l, so), -d, kFloor),
                  relative_difference(d_conj, -std::conj(d), kFloor)};
    });
    Errs worst{0, 0, 0, 0};
    for (const auto& e : errs) {
      worst.eq4 = std::max(worst.eq4, e.eq4);
      worst.eq5 = std::max(worst.eq5, e.eq5);
      worst.anti = std::max(worst.anti, e.anti);
      worst.quad = std::max(worst.quad, e.quad);
    }
    double imag_axis = 0.0;
    for (double r : {0.5, 1.0, 5.0, 20.0}) {
      const Complex v = phi_at_pi(p, Complex(0.0, -r), so).phi_pi;
      imag_axis = std::max(imag_axis, std::abs(v.imag()) / (1.0 + std::abs(v)));
    }
    out.fail_if(!(std::max({worst.eq4, worst.eq5, worst.anti, worst.quad}) <= kSymmetryTol && imag_axis <= 1e-8));
    out.note(fmt::format("{}: reversal {:.1e}, conjugation {:.1e}, d odd {:.1e}, d(conj) {:.1e}, Im on i-axis {:.1e}",
                         config_name(p), worst.eq4, worst.eq5, worst.anti, worst.quad, imag_axis));
  }
  return out;
}

using CheckFn = Outcome (*)(const VerifyOptions&);

struct Entry {
  const char* name;
  CheckFn fn;
};

const Entry kChecks[] = {
    {"reality", check_reality},     {"bessel_oracle", check_bessel_oracle}, {"wronskian", check_wronskian},
    {"sector", check_sector},       {"alphas", check_alphas},               {"galerkin", check_galerkin},
    {"delta_sweep", check_delta_sweep}, {"symmetry", check_symmetry},
};

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : kChecks) v.emplace_back(e.name);
    return v;
  }();
  return names;
}

CheckResult run_check(const std::string& name, const VerifyOptions& options) {
  for (std::size_t i = 0; i < std::size(kChecks); ++i) {
    if (name != kChecks[i].name) continue;
    CheckResult r;
    r.id = static_cast<int>(i) + 1;
    r.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Outcome o = kChecks[i].fn(options);
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const Error& e) {
      r.passed = false;
      r.detail = fmt::format("error: {}", e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }
  throw_invalid(fmt::format("unknown check '{}'", name));
}

std::vector<CheckResult> run_verify(const VerifyOptions& options) {
  std::vector<CheckResult> out;
  for (const auto& name : check_names()) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), name) == options.only.end()) {
      continue;
    }
    out.push_back(run_check(name, options));
  }
  return out;
}

std::string format_check(const CheckResult& r) {
  return fmt::format("{} [{}] {:<13} {:7.2f} s  {}", r.passed ? "PASS" : "FAIL", r.id, r.name, r.seconds, r.detail);
}

}  // namespace ptsturm
