#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>

#include "sche/model.hpp"
#include "sche/noise.hpp"
#include "sche/spectral.hpp"

namespace sche {

/// Immutable per-run configuration of the exponential Euler stepper:
/// M time steps of size tau = T/M on the spatial basis `basis`, with the
/// drift tamed at strength tau. Shared read-only across trajectory workers.
struct SchemeConfig {
  int m_steps = 0;
  double tau = 0.0;
  std::shared_ptr<const SpectralBasis> basis;
  TamedDrift tamed;
  Eigen::VectorXd step_semigroup;  // exp(-lambda_j^2 tau), precomputed

  const Grid& grid() const { return basis->grid; }
  double horizon() const { return tamed.params.horizon; }
};

/// Validates and precomputes. Warns on stderr when h^{-1} tau^9 > 1 (the
/// stepsize regime the convergence theory assumes); this is a warning only.
SchemeConfig make_scheme_config(const ModelParams& params,
                                std::shared_ptr<const SpectralBasis> basis, int m_steps);

struct TrajectoryState {
  int step_index = 0;
  GridFunction u;
};

/// Thrown when a state stops being finite; carries the step at which the
/// scan tripped and, when known, the trajectory that produced it.
class divergence_error : public std::runtime_error {
 public:
  divergence_error(int step_index, long trajectory);
  int step_index() const { return step_index_; }
  long trajectory() const { return trajectory_; }
  void set_trajectory(long trajectory) { trajectory_ = trajectory; }

 private:
  int step_index_;
  long trajectory_ = -1;
};

/// One update U_{i+1} = e^{-A^2 tau} [ U_i + tau A F~(U_i) + noise ], with the
/// semigroup and A applied spectrally. The recursion is the exact grid-time
/// form of the mild solution: on one step the drift kernel and noise kernel
/// are constant in the floored time, so the step quadrature is exact.
TrajectoryState step(const SchemeConfig& cfg, const TrajectoryState& state,
                     const GridFunction& noise_increment);

using Snapshots = std::map<int, GridFunction>;

/// Iterates `step` from the sampled initial data, consuming row i+1 of the
/// sheet at step i. Returns exactly the requested snapshot indices.
/// `trajectory_label` only tags divergence errors.
Snapshots run_trajectory(const SchemeConfig& cfg, const SheetIncrements& sheet,
                         const std::set<int>& record, long trajectory_label = -1);

/// The noise-only part of the scheme (drift off, zero initial data) at noise
/// intensity `sigma`; the object whose time regularity the Hoelder estimator
/// measures.
Snapshots stochastic_convolution(const SchemeConfig& cfg, const SheetIncrements& sheet,
                                 double sigma, const std::set<int>& record,
                                 long trajectory_label = -1);

}  // namespace sche
