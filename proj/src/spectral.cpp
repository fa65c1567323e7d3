#include "sche/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sche {

double eigenvalue(int n_points, int index) {
  if (n_points < 2) {
    throw std::invalid_argument("eigenvalue: n_points must be >= 2");
  }
  if (index < 0 || index >= n_points) {
    throw std::out_of_range("eigenvalue: index " + std::to_string(index) +
                            " outside [0, " + std::to_string(n_points - 1) + "]");
  }
  const double s = std::sin(index * M_PI / (2.0 * n_points));
  const double t = 2.0 * n_points * s / M_PI;
  return t * t;
}

SpectralBasis make_spectral_basis(const Grid& grid) {
  const int n = grid.n_points;
  SpectralBasis basis;
  basis.grid = grid;
  basis.eigenvalues.resize(n);
  basis.eigenvectors.resize(n, n);

  for (int j = 0; j < n; ++j) {
    basis.eigenvalues[j] = eigenvalue(n, j);
  }

  // e_j(k) = sqrt(2/N) cos(j (2k-1) pi / (2N)). The angle j(2k-1) pi/(2N) is
  // reduced modulo 2 pi in exact integer arithmetic (period 4N in the integer
  // factor) before the cos call; without this, cancellation in the difference
  // stencil at large N pushes the eigen-identity residual past 1e-10.
  const double base = M_PI / (2.0 * n);
  const double amp = std::sqrt(2.0 / n);
  const double zero_mode = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) {
    basis.eigenvectors(k, 0) = zero_mode;
  }
  const std::int64_t period = 4 * static_cast<std::int64_t>(n);
  for (int j = 1; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const std::int64_t r = (static_cast<std::int64_t>(j) * (2 * k + 1)) % period;
      basis.eigenvectors(k, j) = amp * std::cos(static_cast<double>(r) * base);
    }
  }
  return basis;
}

static void check_size(const SpectralBasis& basis, const Eigen::VectorXd& v, const char* op) {
  if (v.size() != basis.grid.n_points) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch, basis has " +
                                std::to_string(basis.grid.n_points) + " modes but vector has " +
                                std::to_string(v.size()));
  }
}

Eigen::VectorXd to_spectral(const SpectralBasis& basis, const GridFunction& u) {
  check_size(basis, u, "to_spectral");
  return basis.eigenvectors.transpose() * u;
}

GridFunction from_spectral(const SpectralBasis& basis, const Eigen::VectorXd& coeffs) {
  check_size(basis, coeffs, "from_spectral");
  return basis.eigenvectors * coeffs;
}

Eigen::VectorXd semigroup_multipliers(const SpectralBasis& basis, double t, double gamma) {
  if (t < 0.0) throw std::invalid_argument("semigroup_multipliers: negative t");
  if (gamma < 0.0) throw std::invalid_argument("semigroup_multipliers: negative gamma");
  const int n = basis.grid.n_points;
  Eigen::VectorXd mult(n);
  for (int j = 0; j < n; ++j) {
    const double lambda = basis.eigenvalues[j];
    // std::pow(0, 0) = 1, std::pow(0, gamma > 0) = 0: exactly the zero-mode
    // convention needed here.
    mult[j] = std::pow(lambda, gamma) * std::exp(-lambda * lambda * t);
  }
  return mult;
}

GridFunction semigroup_apply(const SpectralBasis& basis, double t, double gamma,
                             const GridFunction& u) {
  check_size(basis, u, "semigroup_apply");
  const Eigen::VectorXd mult = semigroup_multipliers(basis, t, gamma);
  return from_spectral(basis, mult.cwiseProduct(to_spectral(basis, u)));
}

}  // namespace sche
