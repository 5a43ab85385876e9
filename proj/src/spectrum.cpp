// SPDX-License-Identifier: Apache-2.0

#include "ptsturm/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "ptsturm/parallel.hpp"

namespace ptsturm {
namespace {

using RealFn = std::function<double(double)>;

struct Bracket {
  double a, b;    // in x
  double fa, fb;
};

// Maps the WKB variable t to the spectral variable x = eps (t / I)^2.
struct WkbScale {
  double eps, integral;
  double x(double t) const { return eps * (t / integral) * (t / integral); }
  double t(double x) const { return integral * std::sqrt(x / eps); }
};

// Samples F at t = step (k + 1/2), k = 0, 1, ..., until `need` sign changes
// are seen (need < 0: until t_end) or t passes t_end.
std::vector<Bracket> scan(const RealFn& F, const WkbScale& w, double step, int need, double t_end) {
  std::vector<Bracket> out;
  const std::size_t batch = std::max<std::size_t>(16, 4 * thread_count());
  double prev_x = std::numeric_limits<double>::quiet_NaN();
  double prev_f = 0.0;
  for (std::size_t k0 = 0;; k0 += batch) {
    std::vector<double> xs;
    for (std::size_t k = k0; k < k0 + batch; ++k) {
      const double t = step * (static_cast<double>(k) + 0.5);
      if (t > t_end) break;
      xs.push_back(w.x(t));
    }
    if (xs.empty()) return out;
    const std::vector<double> fs = parallel_map(xs.size(), [&](std::size_t i) { return F(xs[i]); });
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!std::isnan(prev_x) && (prev_f < 0.0) != (fs[i] < 0.0)) {
        out.push_back({prev_x, xs[i], prev_f, fs[i]});
        if (need >= 0 && static_cast<int>(out.size()) >= need) return out;
      }
      prev_x = xs[i];
      prev_f = fs[i];
    }
    if (xs.size() < batch) return out;
  }
}

// Scan with x4 refinement until two successive grids agree on the number of
// sign changes below the last root.
std::vector<Bracket> robust_scan(const RealFn& F, const WkbScale& w, int need, double x_hi,
                                 const SpectrumOptions& options, int& refinements, const char* what) {
  const double t_hi = w.t(x_hi);
  double step = options.scan_step;
  for (refinements = 0;; ++refinements) {
    std::vector<Bracket> coarse = scan(F, w, step, need, t_hi);
    if (static_cast<int>(coarse.size()) < need) {
      throw_numeric(fmt::format("{}: found {} of {} roots below {} (scan step {} in t = I sqrt(x/eps))", what,
                                coarse.size(), need, x_hi, step));
    }
    const double t_last = w.t(coarse.back().b);
    std::vector<Bracket> fine = scan(F, w, step / 4.0, -1, t_last);
    const auto below = std::count_if(fine.begin(), fine.end(), [&](const Bracket& b) { return b.b <= coarse.back().b; });
    if (below == need) {
      fine.resize(need);
      return fine;
    }
    if (refinements >= options.max_refinements) {
      throw_numeric(fmt::format("{}: scan did not stabilise after {} refinements (step {} found {}, step {} found {})",
                                what, refinements, step, need, step / 4.0, below));
    }
    step /= 4.0;
  }
}

double refine(const RealFn& F, const Bracket& br, double tol) {
  if (br.fa == 0.0) return br.a;
  if (br.fb == 0.0) return br.b;
  std::uintmax_t iters = 200;
  auto stop = [tol](double a, double b) { return std::abs(b - a) <= tol * std::max(std::abs(a), std::abs(b)); };
  const auto [lo, hi] = boost::math::tools::toms748_solve(F, br.a, br.b, br.fa, br.fb, stop, iters);
  return 0.5 * (lo + hi);
}

WkbScale wkb_scale(const CoefficientProfile& profile) { return {profile.eps(), wkb_integral(profile)}; }

Complex boundary_point(const Box& b, double s) {
  const double w = b.re1 - b.re0;
  const double h = b.im1 - b.im0;
  if (s < w) return {b.re0 + s, b.im0};
  s -= w;
  if (s < h) return {b.re1, b.im0 + s};
  s -= h;
  if (s < w) return {b.re1 - s, b.im1};
  s -= w;
  return {b.re0, b.im1 - s};
}

struct Sample {
  double s;
  Complex d;
};

struct Winding {
  double total = 0.0;
  int samples = 0;
  bool resolved = true;
};

Winding wind(const CoefficientProfile& profile, const Box& box, const SpectrumOptions& options) {
  const double perimeter = 2.0 * ((box.re1 - box.re0) + (box.im1 - box.im0));
  const double min_len = perimeter * std::ldexp(1.0, -24);
  auto d_at = [&](double s) { return d_of_lambda(profile, boundary_point(box, s), options.shoot); };

  constexpr std::size_t kInitial = 256;
  std::vector<double> s0(kInitial);
  for (std::size_t k = 0; k < kInitial; ++k) s0[k] = perimeter * static_cast<double>(k) / kInitial;
  const std::vector<Complex> d0 = parallel_map(kInitial, [&](std::size_t k) { return d_at(s0[k]); });
  std::vector<Sample> ring;
  for (std::size_t k = 0; k < kInitial; ++k) ring.push_back({s0[k], d0[k]});

  auto jump = [](Complex a, Complex b) { return std::arg(b / a); };
  auto next_s = [&](std::size_t i) { return i + 1 < ring.size() ? ring[i + 1].s : perimeter; };
  for (;;) {
    std::vector<std::size_t> split;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const Complex a = ring[i].d;
      const Complex b = ring[(i + 1) % ring.size()].d;
      if (std::abs(jump(a, b)) > kPi / 2.0 && next_s(i) - ring[i].s > min_len) split.push_back(i);
    }
    if (split.empty()) break;
    std::vector<double> mids(split.size());
    for (std::size_t j = 0; j < split.size(); ++j) mids[j] = 0.5 * (ring[split[j]].s + next_s(split[j]));
    const std::vector<Complex> dm = parallel_map(mids.size(), [&](std::size_t j) { return d_at(mids[j]); });
    for (std::size_t j = 0; j < mids.size(); ++j) ring.push_back({mids[j], dm[j]});
    std::sort(ring.begin(), ring.end(), [](const Sample& x, const Sample& y) { return x.s < y.s; });
  }

  Winding w;
  w.samples = static_cast<int>(ring.size());
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Complex a = ring[i].d;
    const Complex b = ring[(i + 1) % ring.size()].d;
    if (a == Complex{} || b == Complex{} || std::abs(jump(a, b)) > kPi / 2.0) w.resolved = false;
    w.total += jump(a, b);
  }
  w.total /= 2.0 * kPi;
  return w;
}

}  // namespace

std::vector<double> RealEigsResult::positive() const {
  std::vector<double> out;
  for (const auto& e : eigs)
    if (e.lambda > 0.0) out.push_back(e.lambda);
  return out;
}

std::vector<double> RealEigsResult::all_roots() const {
  std::vector<double> out{0.0};
  for (const auto& e : eigs) out.push_back(e.lambda);
  std::sort(out.begin(), out.end());
  return out;
}

RealEigsResult find_real_eigs(const CoefficientProfile& profile, int count, double lam_hi,
                              const SpectrumOptions& options) {
  if (count < 1) throw_invalid("find_real_eigs: count must be positive");
  if (!(lam_hi > 0.0 && lam_hi <= options.shoot.lam_max)) throw_invalid("search interval outside (0, lam_max]");
  ShootOptions so = options.shoot;
  so.estimate_error = false;
  const RealFn F = [&](double lam) { return phi_at_pi(profile, lam, so).phi_pi.imag(); };

  RealEigsResult result;
  const std::vector<Bracket> brackets =
      robust_scan(F, wkb_scale(profile), count, lam_hi, options, result.refinements, "find_real_eigs");
  const bool polish = options.polish_tol_rel < so.tol_rel;
  const std::vector<RealEig> found = parallel_map(brackets.size(), [&](std::size_t i) {
    double lam = refine(F, brackets[i], options.tol_root);
    if (!polish) return RealEig{lam, std::abs(d_of_lambda(profile, lam, so))};
    // Freeze a tight-tolerance discretisation at the coarse root and find the
    // root of that smooth function to a few ulps.
    ShootOptions fine = so;
    fine.tol_rel = options.polish_tol_rel;
    fine.tol_abs = std::min(so.tol_abs, options.polish_tol_rel * 1e-2);
    fine.record_grid = true;
    const TransferResult seed = phi_at_pi(profile, lam, fine);
    fine.record_grid = false;
    fine.grid = seed.grid;
    fine.delta0 = seed.delta0;
    fine.delta_pi = seed.delta_pi;
    const RealFn G = [&](double x) { return phi_at_pi(profile, x, fine).phi_pi.imag(); };
    const Bracket& br = brackets[i];
    double h = 1e-10 * std::max(1.0, lam);
    for (int k = 0; k < 12; ++k, h *= 8.0) {
      const double a = std::max(br.a, lam - h);
      const double b = std::min(br.b, lam + h);
      const Bracket tight{a, b, G(a), G(b)};
      if (tight.fa * tight.fb <= 0.0) {
        lam = refine(G, tight, 4.0 * std::numeric_limits<double>::epsilon());
        break;
      }
      if (a == br.a && b == br.b) break;  // no sign change: keep the coarse root
    }
    return RealEig{lam, std::abs(d_of_lambda(profile, lam, fine))};
  });
  for (const auto& e : found) {
    result.eigs.push_back(e);
    result.eigs.push_back({-e.lambda, e.residual});
  }
  std::sort(result.eigs.begin(), result.eigs.end(), [](const RealEig& a, const RealEig& b) { return a.lambda < b.lambda; });
  result.trivial_root_residual = std::abs(d_of_lambda(profile, 0.0, so));
  return result;
}

AlphaResult find_alphas(const CoefficientProfile& profile, int count, const SpectrumOptions& options) {
  if (count < 1 || count > 20) throw_invalid("find_alphas: count must be in [1, 20]");
  ShootOptions so = options.shoot;
  so.estimate_error = false;
  // φ(pi, -i r) is real for real r; its imaginary part is rounding noise.
  const RealFn F = [&](double r) { return phi_at_pi(profile, Complex(0.0, -r), so).phi_pi.real(); };

  AlphaResult result;
  const std::vector<Bracket> brackets =
      robust_scan(F, wkb_scale(profile), count, options.shoot.lam_max, options, result.refinements, "find_alphas");
  result.r = parallel_map(brackets.size(), [&](std::size_t i) { return refine(F, brackets[i], options.tol_root); });
  for (double r : result.r) {
    if (!(r > 0.0)) throw_numeric("find_alphas: non-positive zero");
    result.alphas.push_back(std::sqrt(r));
  }
  result.residuals = parallel_map(result.r.size(), [&](std::size_t i) {
    return std::abs(phi_at_pi(profile, Complex(0.0, -result.r[i]), so).phi_pi);
  });
  return result;
}

CertifyResult certify_box(const CoefficientProfile& profile, const Box& box, std::span<const double> found_roots,
                          const SpectrumOptions& options) {
  if (!(box.re1 > box.re0 && box.im1 > box.im0)) throw_invalid("certify_box: empty box");
  ShootOptions so = options.shoot;
  so.estimate_error = false;
  SpectrumOptions o = options;
  o.shoot = so;

  CertifyResult result;
  Box b = box;
  const double pad = 1e-3 * std::max(b.re1 - b.re0, b.im1 - b.im0);
  for (int attempt = 0; attempt <= 3; ++attempt) {
    const Winding w = wind(profile, b, o);
    result.samples += w.samples;
    if (w.resolved) {
      result.box = b;
      result.winding = w.total;
      result.count = static_cast<int>(std::lround(w.total));
      result.nudges = attempt;
      result.expected = static_cast<int>(std::count_if(found_roots.begin(), found_roots.end(), [&](double x) {
        return x > b.re0 && x < b.re1 && b.im0 < 0.0 && b.im1 > 0.0;
      }));
      result.ok = std::abs(w.total - result.count) <= 0.01 && result.count == result.expected;
      return result;
    }
    b = {b.re0 - pad, b.re1 + pad, b.im0 - pad, b.im1 + pad};
  }
  throw_numeric("root too close to contour");
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw_invalid("linear_fit: need two or more paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw_invalid("linear_fit: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
  return fit;
}

ProductRho rho_product(std::span<const double> alphas, Complex z, int truncation) {
  const int m = static_cast<int>(alphas.size());
  if (truncation < 1 || truncation > m) throw_invalid("rho_product: truncation exceeds the available alphas");
  ProductRho out;
  out.value = 1.0;
  const Complex z2 = z * z;
  for (int n = 0; n < truncation; ++n) {
    const Complex u = z2 / (alphas[n] * alphas[n]);
    if (std::abs(1.0 + u) < 1e-12 || std::abs(1.0 - u) < 1e-12) throw_numeric("pole/zero proximity");
    out.value *= (1.0 - u) / (1.0 + u);
  }

  // α_n is linear in n only asymptotically and the low zeros pull the slope
  // up, which would understate the tail; fit the upper half.
  const int first = m >= 4 ? m / 2 : 0;
  std::vector<double> idx(m - first);
  std::iota(idx.begin(), idx.end(), first + 1.0);
  const LinearFit fit = linear_fit(idx, alphas.subspan(first));
  double tail = 0.0;
  for (int n = truncation; n < m; ++n) tail += 1.0 / (alphas[n] * alphas[n]);
  // Σ_{n>m} (a n + b)^{-2} = a^{-2} ψ'(m + 1 + b/a).
  if (fit.slope > 0.0) {
    tail += boost::math::trigamma(m + 1.0 + fit.intercept / fit.slope) / (fit.slope * fit.slope);
  } else {
    tail = std::numeric_limits<double>::infinity();
  }
  out.tail_sum = tail;
  const double next_alpha = truncation < m ? alphas[truncation] : fit.slope * (truncation + 1) + fit.intercept;
  const double q = std::norm(z) / (next_alpha * next_alpha);
  out.tail_bound = q < 1.0 ? std::abs(out.value) * std::expm1(2.0 * std::norm(z) * tail / (1.0 - q * q))
                           : std::numeric_limits<double>::infinity();
  return out;
}

CoefficientProfile make_delta_linearized(const CoefficientProfile& profile, double delta) {
  if (!(delta > kDeltaMin && delta < kPi / 2.0)) throw_invalid("delta must lie in (delta_min, pi/2)");
  const double left = profile(delta);
  const double right = profile(kPi - delta);
  auto half = [profile, delta, left, right](double x) {
    if (x < delta) return left * x / delta;
    if (x > kPi - delta) return right * (kPi - x) / delta;
    return profile(x);
  };
  EndpointDerivatives ends{left / delta, -right / delta, 0.0, 0.0};
  std::vector<double> bps{delta, kPi - delta};
  for (double b : profile.breakpoints())
    if (b > delta && b < kPi - delta) bps.push_back(b);
  return {ProfileKind::Custom, profile.eps(), half, ends, bps, fmt::format("{}-linearized-{}", profile.id(), delta)};
}

DeltaTable delta_family_experiment(const CoefficientProfile& profile, std::span<const double> deltas, int count,
                                   const SpectrumOptions& options) {
  if (!profile.fsecond0() || !profile.fsecond_pi()) {
    throw_invalid("delta experiment needs f''(0) and f''(pi)");
  }
  for (std::size_t i = 1; i < deltas.size(); ++i) {
    if (!(deltas[i] < deltas[i - 1])) throw_invalid("deltas must be strictly decreasing");
  }
  const double lam_hi = options.shoot.lam_max;
  DeltaTable table;
  table.reference = find_real_eigs(profile, count, lam_hi, options).positive();
  for (double delta : deltas) {
    const CoefficientProfile fd = make_delta_linearized(profile, delta);
    DeltaRow row;
    row.delta = delta;
    row.fprime0 = fd.fprime0();
    row.lambdas = find_real_eigs(fd, count, lam_hi, options).positive();
    for (int n = 0; n < count; ++n) row.differences.push_back(std::abs(row.lambdas[n] - table.reference[n]));
    table.rows.push_back(std::move(row));
  }
  return table;
}

double hardy_check(double a, double b, const std::function<double(double)>& w,
                   const std::function<double(double)>& w_prime) {
  if (!(b > 0.0)) throw_invalid("hardy_check: b must be positive");
  double scale = 0.0;
  for (int k = 1; k < 64; ++k) scale = std::max(scale, std::abs(w(b * k / 64.0)));
  if (scale == 0.0) throw_invalid("hardy_check: w vanishes identically");
  const double edge = std::max(std::abs(w(b * 1e-12)), std::abs(w(b)));
  if (edge > 1e-4 * scale) throw_invalid("hardy_check: support touches an endpoint of (0, b)");

  boost::math::quadrature::tanh_sinh<double> integrator;
  auto lhs_f = [&](double t) {
    const double q = w(t) / t;  // t^{a-2} w^2 overflows and underflows near 0
    return std::pow(t, a) * q * q;
  };
  auto rhs_f = [&](double t) {
    const double v = w_prime(t);
    return std::pow(t, a) * v * v;
  };
  const double lhs = 0.25 * (1.0 - a) * (1.0 - a) * integrator.integrate(lhs_f, 0.0, b);
  const double rhs = integrator.integrate(rhs_f, 0.0, b);
  if (!(lhs > 0.0)) throw_numeric("hardy_check: left side vanished");
  return rhs / lhs;
}


Sector sector_of(double angle) {
  double a = std::fmod(angle, kPi);
  if (a < 0.0) a += kPi;
  constexpr double kRayTol = 1e-12;
  if (std::abs(a - kPi / 4.0) < kRayTol || std::abs(a - 3.0 * kPi / 4.0) < kRayTol) return Sector::Ray;
  return (a > kPi / 4.0 && a < 3.0 * kPi / 4.0) ? Sector::Outer : Sector::Inner;
}

std::string to_string(Sector sector) {
  switch (sector) {
    case Sector::Inner:
      return "inner";
    case Sector::Outer:
      return "outer";
    case Sector::Ray:
      return "ray";
  }
  return "inner";
}

RhoMap rho_map(const CoefficientProfile& profile, int radii, int angles, double r_min, double r_max, double ray_tol,
               const ShootOptions& options) {
  if (radii < 2 || angles < 2) throw_invalid("rho_map: grid sizes must be at least 2");
  if (!(r_min > 0.0 && r_max > r_min)) throw_invalid("rho_map: need 0 < r_min < r_max");
  RhoMap map;
  map.radii = radii;
  map.angles = angles;
  const std::size_t n = static_cast<std::size_t>(radii) * angles;
  map.cells = parallel_map(n, [&](std::size_t k) {
    RhoCell c;
    const int i = static_cast<int>(k) / angles;
    const int j = static_cast<int>(k) % angles;
    c.radius = r_min + (r_max - r_min) * i / (radii - 1);
    c.angle = 2.0 * kPi * j / angles;
    c.z = std::polar(c.radius, c.angle);
    c.sector = sector_of(c.angle);
    try {
      const RhoSample s = rho_general(profile, c.z, options);
      c.modulus = s.modulus;
      c.pole_proximity = std::abs(s.g_z) < kProximity || std::abs(s.g_iz) < kProximity;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Numeric) throw;
      c.modulus = std::numeric_limits<double>::infinity();
      c.pole_proximity = true;
    }
    if (!c.pole_proximity) {
      switch (c.sector) {
        case Sector::Inner:
          c.violates_claim = !(c.modulus < 1.0);
          break;
        case Sector::Outer:
          c.violates_claim = !(c.modulus > 1.0);
          break;
        case Sector::Ray:
          c.violates_claim = !(std::abs(c.modulus - 1.0) <= ray_tol);
          break;
      }
    }
    return c;
  });
  map.min_outer = std::numeric_limits<double>::infinity();
  for (const auto& c : map.cells) {
    if (c.pole_proximity) {
      ++map.flagged;
      continue;
    }
    if (c.violates_claim) ++map.violations;
    if (c.sector == Sector::Inner) map.max_inner = std::max(map.max_inner, c.modulus);
    if (c.sector == Sector::Outer) map.min_outer = std::min(map.min_outer, c.modulus);
    if (c.sector == Sector::Ray) map.max_ray_deviation = std::max(map.max_ray_deviation, std::abs(c.modulus - 1.0));
  }
  return map;
}

}  // namespace ptsturm
