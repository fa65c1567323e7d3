#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "sche/grid.hpp"
#include "sche/rng.hpp"

namespace sche {

/// Anisotropic Hurst parameters, time first. Both in [1/2, 1); 1/2 means
/// independent (white) increments in that coordinate.
struct HurstPair {
  double h1 = 0.5;
  double h2 = 0.5;
};

void validate(const HurstPair& hurst);

/// Rectangle increments of the driving sheet over the M x N time-space cells:
/// d(i, k) is the double difference of the sheet over [t_i, t_{i+1}] x
/// [k h, (k+1) h]. Increments, not sheet values, are the stored primitive:
/// the stepper consumes only increments and block-sum coarsening is exact on
/// them.
struct SheetIncrements {
  int m_steps = 0;
  int n_cells = 0;
  double horizon = 0.0;
  HurstPair hurst;
  std::uint64_t seed = 0;
  Eigen::MatrixXd d;  // m_steps x n_cells
};

/// Covariance of temporal fBm increments over [t_{i-1}, t_i] and
/// [t_{j-1}, t_j] with t_i = i tau (indices 1-based):
///   (|t_i - t_{j-1}|^{2H} + |t_{i-1} - t_j|^{2H}
///    - |t_i - t_j|^{2H} - |t_{i-1} - t_{j-1}|^{2H}) / 2.
double increment_covariance_time(double h1, double tau, int i, int j);

/// Spatial mirror of the above with cell width h.
double increment_covariance_space(double h2, double h, int k, int l);

/// Lower-triangular Cholesky factors of the temporal and spatial increment
/// covariance matrices. Built once per study and shared read-only across
/// trajectory workers.
struct CholeskyFactorPair {
  HurstPair hurst;
  int m_steps = 0;
  int n_cells = 0;
  double horizon = 0.0;
  Eigen::MatrixXd l_time;   // M x M
  Eigen::MatrixXd l_space;  // N x N
};

/// Factors the two increment covariance matrices. On a non-positive pivot a
/// diagonal jitter of 1e-12 * trace / dim is added once with a warning on
/// stderr; a second failure throws with the offending pivot index.
CholeskyFactorPair make_cholesky_pair(const HurstPair& hurst, int m_steps, int n_cells,
                                      double horizon);

/// d = L1 * G * L2^T with G i.i.d. standard normal, so d carries exactly the
/// separable covariance R1 (x) R2.
SheetIncrements generate_sheet(const CholeskyFactorPair& factors, GaussianStream& normals,
                               std::uint64_t seed_label = 0);

/// Convenience: factors + generation in one call, with the normal stream
/// derived from (seed, stream_id).
SheetIncrements generate_sheet(const HurstPair& hurst, int m_steps, int n_cells, double horizon,
                               std::uint64_t seed, std::uint64_t stream_id);

/// Block sums over r_time x r_space groups of fine cells; exact restriction
/// of the same noise realization onto the coarser grid. Requires that the
/// ratios divide the fine dimensions.
SheetIncrements coarsen(const SheetIncrements& sheet, int r_time, int r_space);

/// The noise forcing consumed by one stepper update: component k equals
/// sigma * (N/pi) * d(step_index, k). step_index is 1-based.
GridFunction scaled_step_increment(const SheetIncrements& sheet, int step_index, double sigma);

/// Binary replay format: little-endian header (M, N as u64; T, H1, H2 as f64;
/// seed as u64) followed by the increments, row-major f64.
void save_sheet(const SheetIncrements& sheet, const std::string& path);
SheetIncrements load_sheet(const std::string& path);

}  // namespace sche
