#pragma once

#include <functional>

#include "sche/grid.hpp"
#include "sche/noise.hpp"
#include "sche/norms.hpp"

namespace sche {

/// Problem data: cubic drift f(x) = a0 x^3 + a1 x^2 + a2 x + a3 with a0 > 0,
/// additive noise intensity, Hurst pair, initial profile, and time horizon.
/// drift_enabled = false switches the drift off entirely (the linear equation
/// then has a closed spectral solution used as a test oracle).
struct ModelParams {
  double a0 = 1.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double sigma = 0.0;
  HurstPair hurst{0.5, 0.5};
  std::function<double(double)> initial = [](double) { return 0.0; };
  double horizon = 1.0;
  bool drift_enabled = true;
};

/// Validates the invariants (a0 > 0 when the drift is on, sigma >= 0, T > 0).
void validate(const ModelParams& params);

/// The tamed drift F(u) / (1 + tau ||F(u)||): tau = 0 disables taming.
struct TamedDrift {
  ModelParams params;
  double tau = 0.0;
};

double f_scalar(const ModelParams& params, double x);

/// Componentwise f; the zero vector when the drift is disabled.
GridFunction drift_vector(const ModelParams& params, const GridFunction& u);

GridFunction tame(const TamedDrift& tamed, const Grid& grid, const GridFunction& u);

GridFunction initial_grid(const ModelParams& params, const Grid& grid);

/// Constant C with |f(x)-f(y)| <= C (1 + x^2 + y^2) |x-y| for all x, y,
/// computed from the coefficients: 4 a0 + 2|a1| + |a2|.
double f_lipschitz_envelope_constant(const ModelParams& params);

/// Constant C with (y-x)(f(x)-f(y)) <= C |x-y|^2: the supremum of -f',
/// a1^2/(3 a0) - a2, clamped at zero.
double f_one_sided_constant(const ModelParams& params);

}  // namespace sche
