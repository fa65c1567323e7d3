// Test-only reference implementations, kept independent of the stepper's
// spectral recursion: the mild formula is evaluated term by term with fresh
// semigroup applications, and the drift-free solution in closed spectral
// form.
#pragma once

#include <vector>

#include "sche/scheme.hpp"

namespace sche_test {

/// Direct evaluation of the mild formula at every grid time:
///   U_{t_m} = e^{-A^2 t_m} U_0
///           + sum_{i<m} tau A e^{-A^2 (t_m - t_i)} Ftilde(U_{t_i})
///           + sum_{i<m} e^{-A^2 (t_m - t_i)} W_{i+1},
/// using earlier direct values (not the recursion) inside the drift sum.
inline std::vector<sche::GridFunction> mild_direct_path(const sche::SchemeConfig& cfg,
                                                        const sche::SheetIncrements& sheet) {
  const sche::SpectralBasis& basis = *cfg.basis;
  const double tau = cfg.tau;
  const double sigma = cfg.tamed.params.sigma;
  std::vector<sche::GridFunction> path;
  path.push_back(sche::initial_grid(cfg.tamed.params, basis.grid));
  for (int m = 1; m <= cfg.m_steps; ++m) {
    sche::GridFunction u = sche::semigroup_apply(basis, m * tau, 0.0, path[0]);
    for (int i = 0; i < m; ++i) {
      const double span = (m - i) * tau;
      const sche::GridFunction tamed = sche::tame(cfg.tamed, basis.grid, path[i]);
      // A e^{-A^2 s} = -(-A) e^{-A^2 s}, so the drift term enters negated.
      u -= tau * sche::semigroup_apply(basis, span, 1.0, tamed);
      u += sche::semigroup_apply(basis, span, 0.0,
                                 sche::scaled_step_increment(sheet, i + 1, sigma));
    }
    path.push_back(u);
  }
  return path;
}

/// Drift-free solution in closed spectral form:
///   uhat_M = e^{-lambda^2 T} uhat_0 + sum_i e^{-lambda^2 (T - t_i)} what_{i+1}.
inline sche::GridFunction linear_closed_form(const sche::SchemeConfig& cfg,
                                             const sche::SheetIncrements& sheet) {
  const sche::SpectralBasis& basis = *cfg.basis;
  const int n = basis.grid.n_points;
  const double tau = cfg.tau;
  const double horizon = cfg.m_steps * tau;
  const double sigma = cfg.tamed.params.sigma;
  Eigen::VectorXd uhat = sche::to_spectral(basis, sche::initial_grid(cfg.tamed.params, basis.grid));
  for (int j = 0; j < n; ++j) {
    const double lambda = basis.eigenvalues[j];
    uhat[j] *= std::exp(-lambda * lambda * horizon);
  }
  for (int i = 0; i < cfg.m_steps; ++i) {
    const Eigen::VectorXd what =
        sche::to_spectral(basis, sche::scaled_step_increment(sheet, i + 1, sigma));
    const double span = horizon - i * tau;
    for (int j = 0; j < n; ++j) {
      const double lambda = basis.eigenvalues[j];
      uhat[j] += std::exp(-lambda * lambda * span) * what[j];
    }
  }
  return sche::from_spectral(basis, uhat);
}

}  // namespace sche_test
