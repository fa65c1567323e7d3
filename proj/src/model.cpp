#include "sche/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sche/norms.hpp"

namespace sche {

void validate(const ModelParams& params) {
  if (params.drift_enabled && !(params.a0 > 0.0)) {
    throw std::invalid_argument("ModelParams: a0 must be positive when the drift is enabled");
  }
  if (!(params.sigma >= 0.0)) {
    throw std::invalid_argument("ModelParams: sigma must be >= 0");
  }
  if (!(params.horizon > 0.0)) {
    throw std::invalid_argument("ModelParams: horizon must be positive");
  }
  if (!params.initial) {
    throw std::invalid_argument("ModelParams: initial function not set");
  }
  validate(params.hurst);
}

double f_scalar(const ModelParams& params, double x) {
  return ((params.a0 * x + params.a1) * x + params.a2) * x + params.a3;
}

GridFunction drift_vector(const ModelParams& params, const GridFunction& u) {
  if (!params.drift_enabled) {
    return GridFunction::Zero(u.size());
  }
  GridFunction out(u.size());
  for (int i = 0; i < u.size(); ++i) {
    out[i] = f_scalar(params, u[i]);
  }
  return out;
}

GridFunction tame(const TamedDrift& tamed, const Grid& grid, const GridFunction& u) {
  if (tamed.tau < 0.0) {
    throw std::invalid_argument("tame: tau must be >= 0");
  }
  GridFunction f = drift_vector(tamed.params, u);
  if (tamed.tau == 0.0) return f;
  const double denom = 1.0 + tamed.tau * lp_norm(grid, f, 2.0);
  return f / denom;
}

GridFunction initial_grid(const ModelParams& params, const Grid& grid) {
  GridFunction out(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    out[i] = params.initial(grid.points[i]);
  }
  return out;
}

double f_lipschitz_envelope_constant(const ModelParams& params) {
  return 4.0 * params.a0 + 2.0 * std::abs(params.a1) + std::abs(params.a2);
}

double f_one_sided_constant(const ModelParams& params) {
  return std::max(params.a1 * params.a1 / (3.0 * params.a0) - params.a2, 0.0);
}

}  // namespace sche
