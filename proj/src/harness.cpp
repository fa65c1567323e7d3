#include "sche/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "sche/norms.hpp"

namespace sche {

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

/// Runs fn(k) for k in [0, count) on `workers` threads. Exceptions are
/// captured and the first one rethrown after all workers join.
void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, workers);
  if (workers == 1 || count <= 1) {
    for (int k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= count) return;
      try {
        fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min(workers, count);
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

/// Sum with the addends sorted first: the reduction over trajectories is then
/// exactly invariant under permutation of trajectory assignments.
double sorted_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return std::accumulate(values.begin(), values.end(), 0.0);
}

/// Linear interpolation weights of the fine-grid polygonal interpolant at the
/// coarse grid points: value_j = (1 - w) u[idx] + w u[idx + use_next].
struct InterpWeight {
  int index;
  int use_next;  // 0 in the constant end zones
  double w;
};

std::vector<InterpWeight> make_interp_weights(const Grid& fine, const Grid& coarse) {
  std::vector<InterpWeight> weights;
  weights.reserve(coarse.n_points);
  for (int j = 0; j < coarse.n_points; ++j) {
    const double x = coarse.points[j];
    if (x <= fine.points[0]) {
      weights.push_back({0, 0, 0.0});
      continue;
    }
    if (x >= fine.points[fine.n_points - 1]) {
      weights.push_back({fine.n_points - 1, 0, 0.0});
      continue;
    }
    int i = static_cast<int>((x / fine.h) - 0.5);
    if (i < 0) i = 0;
    if (i > fine.n_points - 2) i = fine.n_points - 2;
    while (i + 1 < fine.n_points && fine.points[i + 1] <= x) ++i;
    while (i > 0 && fine.points[i] > x) --i;
    // A node hit gets weight exactly 0, reproducing fine values bit for bit.
    const double w = x == fine.points[i] ? 0.0 : (x - fine.points[i]) / fine.h;
    weights.push_back({i, 1, w});
  }
  return weights;
}

double interp_at(const GridFunction& u, const InterpWeight& w) {
  return u[w.index] + w.w * (u[w.index + w.use_next] - u[w.index]);
}

double expected_rate_for(StudyMode mode, const HurstPair& hurst) {
  switch (mode) {
    case StudyMode::temporal:
      return hurst.h1 - 0.125;
    case StudyMode::spatial:
      return 1.0;
    case StudyMode::joint:
      return std::min(1.0, hurst.h1 - 0.125);
  }
  return 0.0;
}

}  // namespace

std::string to_string(StudyMode mode) {
  switch (mode) {
    case StudyMode::temporal: return "temporal";
    case StudyMode::spatial: return "spatial";
    case StudyMode::joint: return "joint";
  }
  return "?";
}

study_divergence_error::study_divergence_error(int diverged, int total)
    : std::runtime_error("run_study: " + std::to_string(diverged) + " of " +
                         std::to_string(total) + " trajectories diverged (> 1%)"),
      diverged_(diverged),
      total_(total) {}

StudyMode study_mode_from_string(const std::string& text) {
  if (text == "temporal") return StudyMode::temporal;
  if (text == "spatial") return StudyMode::spatial;
  if (text == "joint") return StudyMode::joint;
  throw std::invalid_argument("unknown study mode '" + text +
                              "' (expected temporal, spatial or joint)");
}

void validate(const StudyConfig& study) {
  validate(study.params);
  if (!is_power_of_two(study.m_ref) || !is_power_of_two(study.n_ref)) {
    throw std::invalid_argument("StudyConfig: reference resolutions must be powers of two");
  }
  if (study.n_ref < 2) {
    throw std::invalid_argument("StudyConfig: n_ref must be >= 2");
  }
  if (study.trajectories < 2) {
    throw std::invalid_argument("StudyConfig: at least 2 trajectories required");
  }
  if (study.coarse_levels.empty()) {
    throw std::invalid_argument("StudyConfig: no coarse levels");
  }
  for (const auto& [m, n] : study.coarse_levels) {
    if (m < 1 || n < 2 || study.m_ref % m != 0 || study.n_ref % n != 0) {
      throw std::invalid_argument("StudyConfig: level (" + std::to_string(m) + ", " +
                                  std::to_string(n) + ") does not divide the reference (" +
                                  std::to_string(study.m_ref) + ", " +
                                  std::to_string(study.n_ref) + ")");
    }
  }
}

std::vector<std::pair<int, int>> make_levels(StudyMode mode, int m_ref, int n_ref,
                                             const std::vector<int>& m_list,
                                             const std::vector<int>& n_list) {
  std::vector<std::pair<int, int>> levels;
  switch (mode) {
    case StudyMode::temporal:
      for (int m : m_list) levels.emplace_back(m, n_ref);
      break;
    case StudyMode::spatial:
      for (int n : n_list) levels.emplace_back(m_ref, n);
      break;
    case StudyMode::joint:
      if (m_list.size() != n_list.size()) {
        throw std::invalid_argument("joint mode needs equally long M and N level lists");
      }
      for (std::size_t i = 0; i < m_list.size(); ++i) {
        levels.emplace_back(m_list[i], n_list[i]);
      }
      break;
  }
  return levels;
}

double error_metric(const std::vector<PathAtCoarseTimes>& reference_paths,
                    const std::vector<PathAtCoarseTimes>& coarse_paths, const Grid& fine_grid,
                    const Grid& coarse_grid) {
  const std::size_t k_count = reference_paths.size();
  if (k_count == 0 || coarse_paths.size() != k_count) {
    throw std::invalid_argument("error_metric: trajectory counts differ or are empty");
  }
  const std::size_t n_times = reference_paths[0].size();
  if (n_times == 0) {
    throw std::invalid_argument("error_metric: no snapshots");
  }
  for (std::size_t k = 0; k < k_count; ++k) {
    if (reference_paths[k].size() != n_times || coarse_paths[k].size() != n_times) {
      throw std::invalid_argument("error_metric: missing snapshots for trajectory " +
                                  std::to_string(k));
    }
    for (std::size_t i = 0; i < n_times; ++i) {
      if (reference_paths[k][i].size() != fine_grid.n_points ||
          coarse_paths[k][i].size() != coarse_grid.n_points) {
        throw std::invalid_argument("error_metric: grid mismatch in snapshots");
      }
    }
  }

  const auto weights = make_interp_weights(fine_grid, coarse_grid);
  double worst = 0.0;
  std::vector<double> contributions(k_count);
  for (std::size_t i = 0; i < n_times; ++i) {
    for (std::size_t k = 0; k < k_count; ++k) {
      double maxsq = 0.0;
      const GridFunction& ref = reference_paths[k][i];
      const GridFunction& coarse = coarse_paths[k][i];
      for (int j = 0; j < coarse_grid.n_points; ++j) {
        const double diff = coarse[j] - interp_at(ref, weights[j]);
        maxsq = std::max(maxsq, diff * diff);
      }
      contributions[k] = maxsq;
    }
    worst = std::max(worst, sorted_sum(contributions) / static_cast<double>(k_count));
  }
  return std::sqrt(worst);
}

namespace {

/// Per-study immutable context shared by all trajectory workers.
struct StudyContext {
  StudyConfig study;
  std::shared_ptr<const SpectralBasis> fine_basis;
  SchemeConfig fine_cfg;
  CholeskyFactorPair factors;
  std::set<int> fine_record;                      // union of all levels' time points
  std::vector<SchemeConfig> level_cfgs;           // one per level
  std::vector<std::set<int>> level_records;       // all coarse step indices
  std::vector<std::vector<int>> fine_time_index;  // level -> coarse i -> fine step
  std::vector<std::vector<InterpWeight>> level_weights;
};

StudyContext make_context(const StudyConfig& study) {
  validate(study);
  StudyContext ctx;
  ctx.study = study;
  const Grid fine_grid = build_grid(study.n_ref);
  ctx.fine_basis = std::make_shared<SpectralBasis>(make_spectral_basis(fine_grid));
  ctx.fine_cfg = make_scheme_config(study.params, ctx.fine_basis, study.m_ref);
  ctx.factors =
      make_cholesky_pair(study.params.hurst, study.m_ref, study.n_ref, study.params.horizon);

  std::map<int, std::shared_ptr<const SpectralBasis>> bases_by_n;
  bases_by_n[study.n_ref] = ctx.fine_basis;
  for (const auto& [m, n] : study.coarse_levels) {
    auto& basis = bases_by_n[n];
    if (!basis) {
      basis = std::make_shared<SpectralBasis>(make_spectral_basis(build_grid(n)));
    }
    ctx.level_cfgs.push_back(make_scheme_config(study.params, basis, m));
    std::set<int> rec;
    std::vector<int> fine_idx;
    const int ratio = study.m_ref / m;
    for (int i = 0; i <= m; ++i) {
      rec.insert(i);
      fine_idx.push_back(i * ratio);
      ctx.fine_record.insert(i * ratio);
    }
    ctx.level_records.push_back(std::move(rec));
    ctx.fine_time_index.push_back(std::move(fine_idx));
    ctx.level_weights.push_back(make_interp_weights(fine_grid, basis->grid));
  }
  return ctx;
}

}  // namespace

std::pair<PathAtCoarseTimes, PathAtCoarseTimes> coupled_pair_run(const StudyConfig& study,
                                                                 std::pair<int, int> level,
                                                                 int trajectory) {
  StudyConfig one_level = study;
  one_level.coarse_levels = {level};
  StudyContext ctx = make_context(one_level);

  GaussianStream normals(study.seed, static_cast<std::uint64_t>(trajectory));
  const SheetIncrements sheet = generate_sheet(ctx.factors, normals, study.seed);
  const Snapshots ref = run_trajectory(ctx.fine_cfg, sheet, ctx.fine_record, trajectory);
  const SheetIncrements coarse_sheet =
      coarsen(sheet, study.m_ref / level.first, study.n_ref / level.second);
  const Snapshots coarse =
      run_trajectory(ctx.level_cfgs[0], coarse_sheet, ctx.level_records[0], trajectory);

  PathAtCoarseTimes ref_path, coarse_path;
  for (int i = 0; i <= level.first; ++i) {
    ref_path.push_back(ref.at(ctx.fine_time_index[0][i]));
    coarse_path.push_back(coarse.at(i));
  }
  return {std::move(ref_path), std::move(coarse_path)};
}

std::vector<double> fit_orders(const std::vector<double>& errors) {
  if (errors.size() < 2) {
    throw std::invalid_argument("fit_orders: need at least 2 levels");
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> orders;
  for (std::size_t j = 1; j < errors.size(); ++j) {
    const double a = errors[j - 1];
    const double b = errors[j];
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
      orders.push_back(nan);
    } else {
      orders.push_back(std::log2(a / b));
    }
  }
  return orders;
}

double least_squares_order(const std::vector<double>& errors) {
  std::vector<double> xs, ys;
  for (std::size_t j = 0; j < errors.size(); ++j) {
    if (errors[j] > 0.0 && std::isfinite(errors[j])) {
      xs.push_back(static_cast<double>(j));
      ys.push_back(std::log2(errors[j]));
    }
  }
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return -sxy / sxx;
}

RateTable run_study(const StudyConfig& study) {
  const double t_start = now_seconds();
  StudyContext ctx = make_context(study);
  const int k_count = study.trajectories;
  const std::size_t n_levels = study.coarse_levels.size();

  // maxsq[level][coarse time][trajectory]; divergent trajectories are
  // excluded from every level.
  std::vector<std::vector<std::vector<double>>> maxsq(n_levels);
  for (std::size_t l = 0; l < n_levels; ++l) {
    maxsq[l].assign(static_cast<std::size_t>(study.coarse_levels[l].first) + 1,
                    std::vector<double>(k_count, 0.0));
  }
  std::vector<char> diverged(k_count, 0);
  std::vector<double> level_runtime(n_levels, 0.0);
  std::mutex runtime_mutex;

  parallel_for(k_count, study.workers, [&](int k) {
    GaussianStream normals(study.seed, static_cast<std::uint64_t>(k));
    const SheetIncrements sheet = generate_sheet(ctx.factors, normals, study.seed);
    Snapshots ref;
    try {
      ref = run_trajectory(ctx.fine_cfg, sheet, ctx.fine_record, k);
    } catch (const divergence_error&) {
      diverged[k] = 1;
      return;
    }
    std::vector<double> local_runtime(n_levels, 0.0);
    for (std::size_t l = 0; l < n_levels; ++l) {
      const auto [m, n] = study.coarse_levels[l];
      const double t0 = now_seconds();
      Snapshots coarse;
      try {
        coarse = run_trajectory(ctx.level_cfgs[l],
                                coarsen(sheet, study.m_ref / m, study.n_ref / n),
                                ctx.level_records[l], k);
      } catch (const divergence_error&) {
        diverged[k] = 1;
        return;
      }
      const auto& weights = ctx.level_weights[l];
      for (int i = 0; i <= m; ++i) {
        const GridFunction& ref_u = ref.at(ctx.fine_time_index[l][i]);
        const GridFunction& coarse_u = coarse.at(i);
        double worst = 0.0;
        for (int j = 0; j < n; ++j) {
          const double diff = coarse_u[j] - interp_at(ref_u, weights[j]);
          worst = std::max(worst, diff * diff);
        }
        maxsq[l][i][k] = worst;
      }
      local_runtime[l] += now_seconds() - t0;
    }
    std::lock_guard<std::mutex> lock(runtime_mutex);
    for (std::size_t l = 0; l < n_levels; ++l) level_runtime[l] += local_runtime[l];
  });

  const int n_diverged = std::accumulate(diverged.begin(), diverged.end(), 0);
  if (n_diverged * 100 > k_count) {
    throw study_divergence_error(n_diverged, k_count);
  }
  const int k_valid = k_count - n_diverged;
  if (k_valid < 2) {
    throw std::runtime_error("run_study: fewer than 2 usable trajectories");
  }

  RateTable table;
  table.hurst = study.params.hurst;
  table.mode = study.mode;
  table.trajectories = study.trajectories;
  table.seed = study.seed;
  table.expected_rate = expected_rate_for(study.mode, study.params.hurst);
  table.diverged = n_diverged;

  std::vector<double> errors;
  for (std::size_t l = 0; l < n_levels; ++l) {
    double worst = 0.0;
    for (const auto& per_k : maxsq[l]) {
      std::vector<double> values;
      values.reserve(k_valid);
      for (int k = 0; k < k_count; ++k) {
        if (!diverged[k]) values.push_back(per_k[k]);
      }
      worst = std::max(worst, sorted_sum(std::move(values)) / k_valid);
    }
    errors.push_back(std::sqrt(worst));
  }
  const std::vector<double> orders =
      n_levels >= 2 ? fit_orders(errors) : std::vector<double>{};
  for (std::size_t l = 0; l < n_levels; ++l) {
    LevelResult row;
    row.m_steps = study.coarse_levels[l].first;
    row.n_cells = study.coarse_levels[l].second;
    row.error = errors[l];
    row.order = l == 0 ? std::numeric_limits<double>::quiet_NaN() : orders[l - 1];
    row.runtime_s = level_runtime[l];
    table.rows.push_back(row);
  }
  table.ls_order = least_squares_order(errors);
  table.total_runtime_s = now_seconds() - t_start;
  return table;
}

double holder_exponent_theory(const HurstPair& hurst, double beta) {
  return (4.0 * hurst.h1 + hurst.h2 - 1.0 - beta) / 4.0;
}

double estimate_holder_exponent(const HolderConfig& cfg) {
  validate(cfg.hurst);
  if (cfg.m_steps < 8 || cfg.n_cells < 2 || cfg.trajectories < 2) {
    throw std::invalid_argument("estimate_holder_exponent: resolution or sample count too small");
  }
  const int max_lag = cfg.max_lag > 0 ? cfg.max_lag : cfg.m_steps / 32;
  std::vector<int> lags;
  for (int lag = 1; lag <= max_lag; lag *= 2) lags.push_back(lag);
  if (lags.size() < 3) {
    throw std::invalid_argument("estimate_holder_exponent: fewer than 3 usable lags");
  }

  ModelParams params;
  params.drift_enabled = false;
  params.sigma = cfg.sigma;
  params.hurst = cfg.hurst;
  params.horizon = cfg.horizon;
  params.initial = [](double) { return 0.0; };
  const auto basis = std::make_shared<SpectralBasis>(make_spectral_basis(build_grid(cfg.n_cells)));
  const SchemeConfig scheme_cfg = make_scheme_config(params, basis, cfg.m_steps);
  const CholeskyFactorPair factors =
      make_cholesky_pair(cfg.hurst, cfg.m_steps, cfg.n_cells, cfg.horizon);
  std::set<int> record;
  for (int i = cfg.m_steps / 2; i <= cfg.m_steps; ++i) record.insert(i);

  const double h = basis->grid.h;
  // mean_incsq[lag][k]: average over start times of h |O_{i+lag} - O_i|^2.
  std::vector<std::vector<double>> mean_incsq(lags.size(),
                                              std::vector<double>(cfg.trajectories, 0.0));
  parallel_for(cfg.trajectories, cfg.workers, [&](int k) {
    GaussianStream normals(cfg.seed, static_cast<std::uint64_t>(k));
    const SheetIncrements sheet = generate_sheet(factors, normals, cfg.seed);
    const Snapshots conv = stochastic_convolution(scheme_cfg, sheet, cfg.sigma, record, k);
    for (std::size_t li = 0; li < lags.size(); ++li) {
      const int lag = lags[li];
      double sum = 0.0;
      int count = 0;
      for (int i = cfg.m_steps / 2; i + lag <= cfg.m_steps; ++i) {
        sum += h * (conv.at(i + lag) - conv.at(i)).squaredNorm();
        ++count;
      }
      mean_incsq[li][k] = sum / count;
    }
  });

  const double tau = cfg.horizon / cfg.m_steps;
  std::vector<double> log_lag, log_mean;
  for (std::size_t li = 0; li < lags.size(); ++li) {
    const double mean = sorted_sum(mean_incsq[li]) / cfg.trajectories;
    if (!(mean > 0.0)) continue;
    log_lag.push_back(std::log(lags[li] * tau));
    log_mean.push_back(std::log(mean));
  }
  if (log_lag.size() < 3) {
    throw std::runtime_error("estimate_holder_exponent: fewer than 3 usable lags");
  }
  const double n = static_cast<double>(log_lag.size());
  const double mx = std::accumulate(log_lag.begin(), log_lag.end(), 0.0) / n;
  const double my = std::accumulate(log_mean.begin(), log_mean.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < log_lag.size(); ++i) {
    sxy += (log_lag[i] - mx) * (log_mean[i] - my);
    sxx += (log_lag[i] - mx) * (log_lag[i] - mx);
  }
  return 0.5 * sxy / sxx;
}

namespace {

std::string format_full(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string rate_table_csv(const RateTable& table) {
  std::string out = "H1,H2,mode,K,seed\n";
  out += format_full(table.hurst.h1) + "," + format_full(table.hurst.h2) + "," +
         to_string(table.mode) + "," + std::to_string(table.trajectories) + "," +
         std::to_string(table.seed) + "\n";
  out += "M,N,error,order,expected_rate\n";
  for (const auto& row : table.rows) {
    out += std::to_string(row.m_steps) + "," + std::to_string(row.n_cells) + "," +
           format_full(row.error) + "," + format_full(row.order) + "," +
           format_full(table.expected_rate) + "\n";
  }
  return out;
}

std::string gnuplot_script(const RateTable& table, const std::string& csv_filename) {
  const char* xlabel = table.mode == StudyMode::spatial ? "N" : "M";
  const int xcol = table.mode == StudyMode::spatial ? 2 : 1;
  std::string s;
  s += "set datafile separator ','\n";
  s += "set logscale xy 2\n";
  s += std::string("set xlabel '") + xlabel + "'\n";
  s += "set ylabel 'E(M,N)'\n";
  s += "set key top right\n";
  s += "set title 'strong error, H=(" + format_full(table.hurst.h1) + "," +
       format_full(table.hurst.h2) + "), " + to_string(table.mode) + "'\n";
  const double rate = table.expected_rate;
  const auto& rows = table.rows;
  if (!rows.empty() && rows.front().error > 0.0) {
    const double x0 = table.mode == StudyMode::spatial ? rows.front().n_cells
                                                       : rows.front().m_steps;
    const double e0 = rows.front().error;
    s += "ref(x) = " + format_full(e0) + " * (x / " + format_full(x0) + ") ** (-" +
         format_full(rate) + ")\n";
  } else {
    s += "ref(x) = 1.0\n";
  }
  s += "plot '" + csv_filename + "' skip 3 using " + std::to_string(xcol) +
       ":3 with linespoints title 'measured', ref(x) with lines dashtype 2 title 'slope " +
       format_full(rate) + "'\n";
  return s;
}

}  // namespace sche
