#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sche/model.hpp"
#include "sche/scheme.hpp"

namespace sche {

enum class StudyMode { temporal, spatial, joint };

std::string to_string(StudyMode mode);
StudyMode study_mode_from_string(const std::string& text);

/// A Monte-Carlo strong-convergence study: one reference resolution
/// (m_ref, n_ref), a list of coarser (M, N) levels that divide it, and K
/// coupled trajectories. Coupling is by noise coarsening: every level of a
/// trajectory consumes block sums of the same fine sheet.
struct StudyConfig {
  ModelParams params;
  int n_ref = 0;
  int m_ref = 0;
  std::vector<std::pair<int, int>> coarse_levels;  // (M, N), coarse to fine
  int trajectories = 0;
  std::uint64_t seed = 0;
  StudyMode mode = StudyMode::temporal;
  int workers = 1;
};

void validate(const StudyConfig& study);

/// Builds the level list for a mode: temporal fixes N = n_ref, spatial fixes
/// M = m_ref, joint zips the two lists (equal lengths required).
std::vector<std::pair<int, int>> make_levels(StudyMode mode, int m_ref, int n_ref,
                                             const std::vector<int>& m_list,
                                             const std::vector<int>& n_list);

struct LevelResult {
  int m_steps = 0;
  int n_cells = 0;
  double error = 0.0;
  double order = 0.0;  // NaN on the coarsest level or for degenerate ratios
  double runtime_s = 0.0;
};

/// Thrown by run_study when more than 1% of trajectories diverge.
class study_divergence_error : public std::runtime_error {
 public:
  study_divergence_error(int diverged, int total);
  int diverged() const { return diverged_; }
  int total() const { return total_; }

 private:
  int diverged_;
  int total_;
};

struct RateTable {
  HurstPair hurst;
  StudyMode mode = StudyMode::temporal;
  int trajectories = 0;
  std::uint64_t seed = 0;
  double expected_rate = 0.0;
  double ls_order = 0.0;  // least-squares slope over all levels
  std::vector<LevelResult> rows;
  int diverged = 0;
  double total_runtime_s = 0.0;
};

/// One trajectory's snapshots at the coarse time points, ordered in time.
using PathAtCoarseTimes = std::vector<GridFunction>;

/// The study error at one level:
///   E = max over coarse times of sqrt( (1/K) sum_k max over coarse points of
///       |coarse - reference|^2 ),
/// with the reference brought onto the coarse points by polygonal
/// interpolation. The k-sum adds its terms in sorted order, so E is exactly
/// invariant under permutation of trajectory assignments.
double error_metric(const std::vector<PathAtCoarseTimes>& reference_paths,
                    const std::vector<PathAtCoarseTimes>& coarse_paths, const Grid& fine_grid,
                    const Grid& coarse_grid);

/// Runs one coupled (reference, coarse) pair for trajectory k of a study:
/// the fine sheet comes from substream k, the coarse run consumes its block
/// sums, and both paths are recorded at the coarse time points (reference on
/// the fine grid, coarse on its own grid).
std::pair<PathAtCoarseTimes, PathAtCoarseTimes> coupled_pair_run(const StudyConfig& study,
                                                                 std::pair<int, int> level,
                                                                 int trajectory);

/// Pairwise dyadic orders log2(E_{j-1} / E_j); NaN where a ratio degenerates
/// (zero or non-finite error).
std::vector<double> fit_orders(const std::vector<double>& errors);

/// Least-squares slope of log2 E against the dyadic level index (sign flipped
/// so that halving errors per level gives +1). NaN with fewer than two usable
/// levels.
double least_squares_order(const std::vector<double>& errors);

RateTable run_study(const StudyConfig& study);

/// Configuration of the time-regularity estimate of the stochastic
/// convolution (drift off, zero initial data).
struct HolderConfig {
  HurstPair hurst;
  double sigma = 1.0;
  double horizon = 1.0;
  int m_steps = 1024;
  int n_cells = 32;
  int trajectories = 500;
  std::uint64_t seed = 0;
  int max_lag = 0;  // 0: m_steps / 32
  int workers = 1;
};

/// Theoretical exponent (4 H1 + H2 - 1 - beta) / 4.
double holder_exponent_theory(const HurstPair& hurst, double beta = 0.0);

/// Regresses log of the mean squared l2 increment of the stochastic
/// convolution on log of the time lag over dyadic lags, averaging over the
/// second half of [0, T]; returns half the slope. Needs >= 3 usable lags.
double estimate_holder_exponent(const HolderConfig& cfg);

/// CSV with a two-line metadata header (H1,H2,mode,K,seed) followed by the
/// level rows. All numbers round-trip at full double precision. Runtimes are
/// deliberately not part of this file so that identical configs yield
/// byte-identical tables; they live in the run sidecar.
std::string rate_table_csv(const RateTable& table);

/// gnuplot script for the log-log error plot of a written rate-table CSV.
std::string gnuplot_script(const RateTable& table, const std::string& csv_filename);

}  // namespace sche
