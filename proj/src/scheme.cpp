#include "sche/scheme.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace sche {

SchemeConfig make_scheme_config(const ModelParams& params,
                                std::shared_ptr<const SpectralBasis> basis, int m_steps) {
  validate(params);
  if (!basis) {
    throw std::invalid_argument("make_scheme_config: basis must not be null");
  }
  if (m_steps < 1) {
    throw std::invalid_argument("make_scheme_config: m_steps must be >= 1");
  }
  SchemeConfig cfg;
  cfg.m_steps = m_steps;
  cfg.tau = params.horizon / m_steps;
  if (std::abs(cfg.tau * m_steps - params.horizon) > 1e-14 * params.horizon) {
    throw std::invalid_argument("make_scheme_config: tau * M deviates from the horizon");
  }
  cfg.basis = std::move(basis);
  cfg.tamed = TamedDrift{params, cfg.tau};
  cfg.step_semigroup = semigroup_multipliers(*cfg.basis, cfg.tau, 0.0);
  const double h = cfg.basis->grid.h;
  const double ratio = std::pow(cfg.tau, 9) / h;
  if (ratio > 1.0) {
    std::fprintf(stderr,
                 "warning: step sizes outside the analyzed regime (tau^9/h = %.3e > 1); "
                 "results may not follow the predicted rates\n",
                 ratio);
  }
  return cfg;
}

divergence_error::divergence_error(int step_index, long trajectory)
    : std::runtime_error("trajectory diverged at step " + std::to_string(step_index) +
                         (trajectory >= 0 ? " (trajectory " + std::to_string(trajectory) + ")"
                                          : std::string())),
      step_index_(step_index),
      trajectory_(trajectory) {}

TrajectoryState step(const SchemeConfig& cfg, const TrajectoryState& state,
                     const GridFunction& noise_increment) {
  const SpectralBasis& basis = *cfg.basis;
  if (state.u.size() != basis.grid.n_points || noise_increment.size() != basis.grid.n_points) {
    throw std::invalid_argument("step: state/noise length does not match the grid");
  }
  const GridFunction tamed_drift = tame(cfg.tamed, basis.grid, state.u);
  const Eigen::VectorXd state_hat = to_spectral(basis, state.u + noise_increment);
  const Eigen::VectorXd drift_hat = to_spectral(basis, tamed_drift);
  const Eigen::VectorXd next_hat =
      cfg.step_semigroup.cwiseProduct(state_hat -
                                      cfg.tau * basis.eigenvalues.cwiseProduct(drift_hat));
  TrajectoryState next{state.step_index + 1, from_spectral(basis, next_hat)};
  if (!next.u.allFinite()) {
    throw divergence_error(next.step_index, -1);
  }
  return next;
}

static void check_record(const std::set<int>& record, int m_steps) {
  for (int idx : record) {
    if (idx < 0 || idx > m_steps) {
      throw std::invalid_argument("run_trajectory: requested snapshot " + std::to_string(idx) +
                                  " outside [0, " + std::to_string(m_steps) + "]");
    }
  }
}

Snapshots run_trajectory(const SchemeConfig& cfg, const SheetIncrements& sheet,
                         const std::set<int>& record, long trajectory_label) {
  if (sheet.m_steps != cfg.m_steps || sheet.n_cells != cfg.grid().n_points) {
    throw std::invalid_argument("run_trajectory: sheet is " + std::to_string(sheet.m_steps) +
                                "x" + std::to_string(sheet.n_cells) + " but the scheme needs " +
                                std::to_string(cfg.m_steps) + "x" +
                                std::to_string(cfg.grid().n_points));
  }
  if (std::abs(sheet.horizon - cfg.horizon()) > 1e-12 * cfg.horizon()) {
    throw std::invalid_argument("run_trajectory: sheet horizon mismatch");
  }
  check_record(record, cfg.m_steps);

  TrajectoryState state{0, initial_grid(cfg.tamed.params, cfg.grid())};
  if (!state.u.allFinite()) {
    throw divergence_error(0, trajectory_label);
  }
  Snapshots out;
  if (record.count(0)) out.emplace(0, state.u);
  const double sigma = cfg.tamed.params.sigma;
  try {
    for (int i = 0; i < cfg.m_steps; ++i) {
      state = step(cfg, state, scaled_step_increment(sheet, i + 1, sigma));
      if (record.count(state.step_index)) out.emplace(state.step_index, state.u);
    }
  } catch (divergence_error& err) {
    err.set_trajectory(trajectory_label);
    throw divergence_error(err.step_index(), trajectory_label);
  }
  return out;
}

Snapshots stochastic_convolution(const SchemeConfig& cfg, const SheetIncrements& sheet,
                                 double sigma, const std::set<int>& record,
                                 long trajectory_label) {
  SchemeConfig noise_only = cfg;
  noise_only.tamed.params.drift_enabled = false;
  noise_only.tamed.params.sigma = sigma;
  noise_only.tamed.params.initial = [](double) { return 0.0; };
  return run_trajectory(noise_only, sheet, record, trajectory_label);
}

}  // namespace sche
