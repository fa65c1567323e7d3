#include "sche/norms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sche {

double lp_norm(const Grid& grid, const GridFunction& u, double p) {
  if (u.size() != grid.n_points) {
    throw std::invalid_argument("lp_norm: length mismatch");
  }
  if (std::isinf(p)) {
    // No h factor for the max norm.
    return u.size() == 0 ? 0.0 : u.cwiseAbs().maxCoeff();
  }
  if (!(p >= 1.0)) {
    throw std::invalid_argument("lp_norm: p must be >= 1 or infinity");
  }
  if (p == 2.0) {
    return std::sqrt(grid.h) * u.norm();
  }
  double sum = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    sum += std::pow(std::abs(u[i]), p);
  }
  return std::pow(grid.h * sum, 1.0 / p);
}

double inner_product(const Grid& grid, const GridFunction& u, const GridFunction& v) {
  if (u.size() != grid.n_points || v.size() != grid.n_points) {
    throw std::invalid_argument("inner_product: length mismatch");
  }
  return grid.h * u.dot(v);
}

static double spectral_weighted_l2(const SpectralBasis& basis, const GridFunction& u, int k) {
  const Eigen::VectorXd coeffs = to_spectral(basis, u);
  double sum = 0.0;
  for (int j = 0; j < coeffs.size(); ++j) {
    double w = 1.0;
    for (int i = 0; i < k; ++i) w *= basis.eigenvalues[j];
    sum += w * coeffs[j] * coeffs[j];
  }
  return std::sqrt(basis.grid.h * sum);
}

double seminorm(const SpectralBasis& basis, const GridFunction& u, int k) {
  if (k < 1 || k > 3) {
    throw std::invalid_argument("seminorm: k must be in {1, 2, 3}, got " + std::to_string(k));
  }
  return spectral_weighted_l2(basis, u, k);
}

double sobolev_norm(const SpectralBasis& basis, const GridFunction& u, int k) {
  if (k < 0) {
    throw std::invalid_argument("sobolev_norm: k must be >= 0");
  }
  const double l2 = lp_norm(basis.grid, u, 2.0);
  if (k == 0) return l2;
  double sum = l2 * l2;
  for (int i = 1; i <= k; ++i) {
    const double s = spectral_weighted_l2(basis, u, i);
    sum += s * s;
  }
  return std::sqrt(sum);
}

double evaluate_norm(const NormKind& kind, const SpectralBasis& basis, const GridFunction& u) {
  if (const auto* lp = std::get_if<LpKind>(&kind)) {
    return lp_norm(basis.grid, u, lp->p);
  }
  if (const auto* semi = std::get_if<SeminormKind>(&kind)) {
    return seminorm(basis, u, semi->k);
  }
  return sobolev_norm(basis, u, std::get<SobolevKind>(kind).k);
}

}  // namespace sche
