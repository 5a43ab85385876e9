// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "ptsturm/spectrum.hpp"

namespace ptsturm {

double GalerkinMatrix::entry(int row, int col) const {
  const int dim = dimension();
  if (row < 0 || col < 0 || row >= dim || col >= dim) throw_invalid("GalerkinMatrix::entry out of range");
  if (row == col) return diag[row];
  if (row == col + 1) return lower[row];
  if (col == row + 1) return upper[row];
  return 0.0;
}

GalerkinMatrix galerkin_matrix(double eps_tilde, int N) {
  if (N < 0 || N > 512) throw_invalid(fmt::format("Galerkin N = {} outside [0, 512]", N));
  if (!(eps_tilde >= 0.0)) throw_invalid("Galerkin eps~ must be non-negative");
  GalerkinMatrix m;
  m.N = N;
  m.eps_tilde = eps_tilde;
  const int dim = m.dimension();
  m.lower.assign(dim, 0.0);
  m.diag.assign(dim, 0.0);
  m.upper.assign(dim, 0.0);
  for (int k = 0; k < dim; ++k) {
    const double n = k - N;
    m.diag[k] = -n;
    // Row k receives e_{n} from column n - 1 (coefficient of e_{(n-1)+1})
    // and from column n + 1 (coefficient of e_{(n+1)-1}).
    if (k > 0) m.lower[k] = -eps_tilde * (n - 1.0) * n / 2.0;
    if (k + 1 < dim) m.upper[k] = eps_tilde * (n + 1.0) * n / 2.0;
  }
  return m;
}

std::vector<Complex> galerkin_eigs(const GalerkinMatrix& matrix) {
  const int dim = matrix.dimension();
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    a(k, k) = matrix.diag[k];
    if (k > 0) a(k, k - 1) = matrix.lower[k];
    if (k + 1 < dim) a(k, k + 1) = matrix.upper[k];
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, false);
  if (solver.info() != Eigen::Success) throw_numeric("Galerkin eigensolver did not converge");
  std::vector<Complex> out(solver.eigenvalues().data(), solver.eigenvalues().data() + dim);
  std::sort(out.begin(), out.end(), [](Complex x, Complex y) {
    if (std::abs(x) != std::abs(y)) return std::abs(x) < std::abs(y);
    return x.real() < y.real();
  });
  return out;
}

}  // namespace ptsturm
