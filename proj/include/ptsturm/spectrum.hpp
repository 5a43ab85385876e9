// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ptsturm/coeff.hpp"
#include "ptsturm/shoot.hpp"

namespace ptsturm {

struct SpectrumOptions {
  ShootOptions shoot;
  /// Relative bracket width at which root refinement stops.
  double tol_root = 1e-13;
  /// Scan step in the WKB variable t = I sqrt(|λ| / eps), where roots are
  /// spaced by roughly pi.
  double scan_step = 0.5;
  /// Each refinement divides the scan step by 4.
  int max_refinements = 3;
  /// Real eigenvalues are re-polished with this ODE tolerance (and a bracket
  /// of a few ulps). On the real axis |φ(pi, λ)| can reach 1e9, so the
  /// scan tolerance leaves Im φ, hence d, dominated by integration noise.
  /// A value >= shoot.tol_rel disables the pass.
  double polish_tol_rel = 1e-12;
};

struct RealEig {
  double lambda = 0.0;
  double residual = 0.0;  // |d(λ)|
};

struct RealEigsResult {
  /// Nonzero eigenvalues in ± pairs, ascending.
  std::vector<RealEig> eigs;
  /// λ = 0 is always a root of d (d is odd) and always an eigenvalue, with
  /// eigenfunction u = 1. It is reported here instead of in eigs.
  double trivial_root_residual = 0.0;
  int refinements = 0;

  /// The positive eigenvalues, ascending.
  std::vector<double> positive() const;
  /// Every root of d found, including 0 and the negative mirrors.
  std::vector<double> all_roots() const;
};

/// The lowest `count` positive roots of Im φ(pi, λ) (so of d on the real
/// axis) in (0, lam_hi], refined by TOMS 748 and mirrored to -λ. Throws
/// Numeric if fewer than count roots exist below lam_hi or if the scan
/// does not stabilise under refinement.
RealEigsResult find_real_eigs(const CoefficientProfile& profile, int count, double lam_hi,
                              const SpectrumOptions& options = {});

struct AlphaResult {
  std::vector<double> r;          // zeros of r -> φ(pi, -i r), ascending
  std::vector<double> alphas;     // sqrt(r)
  std::vector<double> residuals;  // |φ(pi, -i r_n)| = |g(i α_n)|
  int refinements = 0;
};

/// The first `count` (at most 20) zeros of the real function r -> φ(pi, -i r).
AlphaResult find_alphas(const CoefficientProfile& profile, int count, const SpectrumOptions& options = {});

struct Box {
  double re0 = 0.0, re1 = 0.0, im0 = 0.0, im1 = 0.0;
};

struct CertifyResult {
  Box box;          // the contour actually used (after nudging)
  double winding = 0.0;
  int count = 0;    // rounded winding number of d along the boundary
  int expected = 0; // real roots strictly inside the box
  bool ok = false;
  int samples = 0;
  int nudges = 0;
};

/// Argument-principle count of the zeros of d inside box. found_roots lists
/// every known real root (as RealEigsResult::all_roots). Samples start at 256
/// and segments whose phase jump exceeds pi/2 are bisected; a jump above pi
/// after the maximum depth moves the contour outwards (up to 3 times) and
/// then throws Numeric "root too close to contour".
CertifyResult certify_box(const CoefficientProfile& profile, const Box& box, std::span<const double> found_roots,
                          const SpectrumOptions& options = {});

struct ProductRho {
  Complex value;
  /// Bound on |ρ - value| from the omitted factors.
  double tail_bound = 0.0;
  /// Σ_{n>N} α_n^{-2}: known terms plus the fitted extrapolation.
  double tail_sum = 0.0;
};

/// ∏_{n<=N} (1 - z²/α_n²)/(1 + z²/α_n²). The tail is bounded by
/// |value| (exp(2|z|² S / (1 - q²)) - 1) with q = |z|²/α_{N+1}², which needs
/// q < 1. Given alphas beyond N enter S exactly; the rest of S comes from a
/// linear fit of the upper half of alphas. Throws Numeric near ±α_n, ±iα_n.
ProductRho rho_product(std::span<const double> alphas, Complex z, int truncation);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least squares y = slope x + intercept.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Tridiagonal matrix of L = i eps~ d/dx(sin x d/dx) + i d/dx on e^{inx},
/// |n| <= N. Column n holds L e_n:
///   -n e_n - (eps~ n(n+1)/2) e_{n+1} + (eps~ n(n-1)/2) e_{n-1}.
struct GalerkinMatrix {
  int N = 0;
  double eps_tilde = 0.0;
  /// Indexed by row k = n + N. lower[k] = M(k, k-1), upper[k] = M(k, k+1).
  std::vector<double> lower, diag, upper;

  int dimension() const noexcept { return 2 * N + 1; }
  double entry(int row, int col) const;
};

/// eps~ = 2 eps / pi, matching make_sine(eps).
inline double galerkin_eps_tilde(double eps) { return 2.0 * eps / kPi; }

/// Throws InvalidArgument unless 0 <= N <= 512 and eps_tilde >= 0.
GalerkinMatrix galerkin_matrix(double eps_tilde, int N);

/// All eigenvalues of the dense matrix (Eigen's complex Schur solver), by ascending |λ|.
std::vector<Complex> galerkin_eigs(const GalerkinMatrix& matrix);

/// f replaced by its chords on [0, δ] and [pi - δ, pi] (and the odd,
/// anti-periodic images). Endpoint slopes become f(δ)/δ and -f(pi-δ)/δ.
CoefficientProfile make_delta_linearized(const CoefficientProfile& profile, double delta);

struct DeltaRow {
  double delta = 0.0;
  double fprime0 = 0.0;
  std::vector<double> lambdas;      // lowest positive eigenvalues for f_δ
  std::vector<double> differences;  // |λ_n(δ) - λ_n|
};

struct DeltaTable {
  std::vector<double> reference;  // lowest positive eigenvalues for f
  std::vector<DeltaRow> rows;
};

/// Requires f''(0), f''(pi) to be declared and deltas strictly decreasing.
DeltaTable delta_family_experiment(const CoefficientProfile& profile, std::span<const double> deltas, int count,
                                   const SpectrumOptions& options = {});

/// RHS/LHS of ((1-a)²/4) ∫_0^b t^{a-2} |w|² dt <= ∫_0^b t^a |w'|² dt.
/// w must vanish at both ends of (0, b).
double hardy_check(double a, double b, const std::function<double(double)>& w,
                   const std::function<double(double)>& w_prime);


/// Sector of z for the |ρ| claim, by arg(±z): Inner for |arg| < pi/4, Outer
/// for pi/4 < |arg| < 3pi/4, Ray on the four bounding rays.
enum class Sector { Inner, Outer, Ray };

Sector sector_of(double angle);
std::string to_string(Sector sector);

struct RhoCell {
  double radius = 0.0;
  double angle = 0.0;
  Complex z;
  double modulus = 0.0;
  Sector sector = Sector::Inner;
  /// |g(z)| or |g(iz)| below kProximity, or ρ not computable.
  bool pole_proximity = false;
  bool violates_claim = false;
};

struct RhoMap {
  std::vector<RhoCell> cells;
  int radii = 0, angles = 0;
  double max_inner = 0.0;     // max |ρ| over inner cells
  double min_outer = 0.0;     // min |ρ| over outer cells
  double max_ray_deviation = 0.0;
  int violations = 0;
  int flagged = 0;
};

inline constexpr double kProximity = 1e-6;

/// |ρ| on the polar grid radius = linspace(r_min, r_max, radii), angle = 2 pi k / angles.
/// Ray cells violate the claim when ||ρ| - 1| > ray_tol.
RhoMap rho_map(const CoefficientProfile& profile, int radii, int angles, double r_min, double r_max, double ray_tol,
               const ShootOptions& options = {});

}  // namespace ptsturm
