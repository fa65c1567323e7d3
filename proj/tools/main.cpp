// Command-line front end: batch simulation, convergence studies and the
// built-in verification suites. See --help for subcommands and exit codes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <thread>

#include <CLI11.hpp>

#include "sche/config.hpp"
#include "sche/expr.hpp"
#include "sche/harness.hpp"
#include "sche/norms.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitCheckFailed = 4;
constexpr int kExitIo = 5;

struct CliError {
  int code;
  std::string message;
};

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(content.data(), static_cast<std::streamsize>(content.size()))) {
    throw CliError{kExitIo, "cannot write " + path.string()};
  }
}

std::filesystem::path prepare_output_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw CliError{kExitIo, "cannot create output directory " + dir + ": " + ec.message()};
  return dir;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::string config_path;
  std::string snapshots = "0,1";
  std::string out_dir;
  std::string dump_noise;
  std::string load_noise;
  int m_override = 0;
  int n_override = 0;
  std::uint64_t trajectory = 0;
};

int cmd_simulate(const SimulateOptions& opt) {
  sche::RunConfig config = sche::load_run_config(opt.config_path);
  if (!opt.out_dir.empty()) config.output_dir = opt.out_dir;
  const int m = opt.m_override > 0 ? opt.m_override : config.m_ref;
  const int n = opt.n_override > 0 ? opt.n_override : config.n_ref;

  auto basis = std::make_shared<sche::SpectralBasis>(sche::make_spectral_basis(sche::build_grid(n)));
  const sche::SchemeConfig scheme_cfg = sche::make_scheme_config(config.params, basis, m);
  const double tau = scheme_cfg.tau;

  std::vector<double> times;
  {
    std::string list = opt.snapshots;
    for (char& c : list) {
      if (c == ',') c = ' ';
    }
    std::istringstream in(list);
    double t = 0.0;
    while (in >> t) times.push_back(t);
    if (!in.eof() || times.empty()) {
      throw CliError{kExitConfig, "--snapshots: expected a comma-separated list of times"};
    }
  }
  std::set<int> record;
  std::vector<std::pair<double, int>> requested;
  for (double t : times) {
    if (t < 0.0 || t > config.params.horizon * (1.0 + 1e-12)) {
      throw CliError{kExitConfig, "--snapshots: time " + format_full(t) + " outside [0, T]"};
    }
    const int index = std::min(m, std::max(0, static_cast<int>(std::lround(t / tau))));
    record.insert(index);
    requested.emplace_back(t, index);
  }

  sche::SheetIncrements sheet;
  if (!opt.load_noise.empty()) {
    sheet = sche::load_sheet(opt.load_noise);
  } else {
    sche::GaussianStream normals(config.seed, opt.trajectory);
    sheet = sche::generate_sheet(
        sche::make_cholesky_pair(config.params.hurst, m, n, config.params.horizon), normals,
        config.seed);
  }
  if (!opt.dump_noise.empty()) sche::save_sheet(sheet, opt.dump_noise);

  const sche::Snapshots snaps =
      sche::run_trajectory(scheme_cfg, sheet, record, static_cast<long>(opt.trajectory));

  const auto dir = prepare_output_dir(config.output_dir);
  std::string meta;
  meta += "command = simulate\n";
  meta += "timestamp = " + timestamp_utc() + "\n";
  meta += "config = " + opt.config_path + "\n";
  meta += "seed = " + std::to_string(config.seed) + "\n";
  meta += "trajectory = " + std::to_string(opt.trajectory) + "\n";
  meta += "m_steps = " + std::to_string(m) + "\n";
  meta += "n_points = " + std::to_string(n) + "\n";
  meta += "noise_source = " + (opt.load_noise.empty() ? std::string("generated") : opt.load_noise) +
          "\n";
  meta += "h1 = " + format_full(config.params.hurst.h1) + "\n";
  meta += "h2 = " + format_full(config.params.hurst.h2) + "\n";
  meta += "sigma = " + format_full(config.params.sigma) + "\n";
  meta += "initial = " + config.initial_expression + "\n";
  for (const auto& [t, index] : requested) {
    const std::string name = "snapshot_" + std::to_string(index) + ".csv";
    std::string csv = "x,u\n";
    const sche::GridFunction& u = snaps.at(index);
    for (int j = 0; j < n; ++j) {
      csv += format_full(basis->grid.points[j]) + "," + format_full(u[j]) + "\n";
    }
    write_file(dir / name, csv);
    meta += "snapshot_" + std::to_string(index) + " = t " + format_full(index * tau) +
            " (requested " + format_full(t) + ") -> " + name + "\n";
    std::printf("wrote %s (t = %s)\n", (dir / name).c_str(), format_full(index * tau).c_str());
  }
  write_file(dir / "simulate.meta", meta);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// convergence

struct ConvergenceOptions {
  std::string config_path;
  std::string mode;
  std::string out_dir;
  int trajectories = 0;
  int workers = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int cmd_convergence(const ConvergenceOptions& opt) {
  sche::RunConfig config = sche::load_run_config(opt.config_path);
  if (!opt.mode.empty()) config.mode = sche::study_mode_from_string(opt.mode);
  if (opt.trajectories > 0) config.trajectories = opt.trajectories;
  if (opt.seed_set) config.seed = opt.seed;
  if (opt.workers > 0) config.workers = opt.workers;
  if (!opt.out_dir.empty()) config.output_dir = opt.out_dir;

  sche::StudyConfig study = sche::make_study_config(config);
  study.workers = resolve_workers(config.workers);
  sche::validate(study);

  const sche::RateTable table = sche::run_study(study);

  const auto dir = prepare_output_dir(config.output_dir);
  const std::string base = "rates_" + sche::to_string(table.mode);
  const std::string csv_name = base + ".csv";
  if (config.write_csv) write_file(dir / csv_name, sche::rate_table_csv(table));
  if (config.write_gnuplot) {
    write_file(dir / (base + ".gp"), sche::gnuplot_script(table, csv_name));
  }

  std::string meta;
  meta += "command = convergence\n";
  meta += "timestamp = " + timestamp_utc() + "\n";
  meta += "config = " + opt.config_path + "\n";
  meta += "mode = " + sche::to_string(table.mode) + "\n";
  meta += "trajectories = " + std::to_string(table.trajectories) + "\n";
  meta += "seed = " + std::to_string(table.seed) + "\n";
  meta += "expected_rate = " + format_full(table.expected_rate) + "\n";
  meta += "ls_order = " + format_full(table.ls_order) + "\n";
  meta += "diverged = " + std::to_string(table.diverged) + "\n";
  meta += "runtime_total_s = " + format_full(table.total_runtime_s) + "\n";
  for (const auto& row : table.rows) {
    meta += "runtime_M" + std::to_string(row.m_steps) + "_N" + std::to_string(row.n_cells) +
            "_s = " + format_full(row.runtime_s) + "\n";
  }
  write_file(dir / (base + ".meta"), meta);

  std::printf("# H = (%g, %g), mode = %s, K = %d, seed = %llu\n", table.hurst.h1, table.hurst.h2,
              sche::to_string(table.mode).c_str(), table.trajectories,
              static_cast<unsigned long long>(table.seed));
  std::printf("%8s %8s %14s %10s %14s\n", "M", "N", "error", "order", "expected");
  for (const auto& row : table.rows) {
    std::printf("%8d %8d %14.6e %10.5f %14.3f\n", row.m_steps, row.n_cells, row.error, row.order,
                table.expected_rate);
  }
  std::printf("least-squares order: %.5f (expected %.3f)\n", table.ls_order, table.expected_rate);
  if (config.write_csv) std::printf("wrote %s\n", (dir / csv_name).c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// noise-check

struct NoiseCheckOptions {
  std::string config_path;
  int samples = 100000;
  int m = 4;
  int n = 4;
  std::string dump;
};

int cmd_noise_check(const NoiseCheckOptions& opt) {
  const sche::RunConfig config = sche::load_run_config(opt.config_path);
  const sche::HurstPair hurst = config.params.hurst;
  const double horizon = config.params.horizon;
  const int m = opt.m, n = opt.n;
  if (m < 1 || n < 1 || opt.samples < 100) {
    throw CliError{kExitConfig, "noise-check: need m, n >= 1 and samples >= 100"};
  }

  const sche::CholeskyFactorPair factors = sche::make_cholesky_pair(hurst, m, n, horizon);
  const double tau = horizon / m;
  const double h = M_PI / n;

  // Cholesky reconstruction error against the analytic covariances.
  auto recon_error = [](const Eigen::MatrixXd& l, auto cov_fn) {
    const int dim = static_cast<int>(l.rows());
    Eigen::MatrixXd r(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) r(i, j) = cov_fn(i + 1, j + 1);
    }
    return ((l * l.transpose() - r).norm()) / r.norm();
  };
  const double recon_time = recon_error(factors.l_time, [&](int i, int j) {
    return sche::increment_covariance_time(hurst.h1, tau, i, j);
  });
  const double recon_space = recon_error(factors.l_space, [&](int i, int j) {
    return sche::increment_covariance_space(hurst.h2, h, i, j);
  });

  // Empirical covariance of the flattened sheet against R1 (x) R2.
  const int dim = m * n;
  Eigen::MatrixXd second_moment = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd flat(dim);
  for (int s = 0; s < opt.samples; ++s) {
    sche::GaussianStream normals(config.seed, static_cast<std::uint64_t>(s));
    const sche::SheetIncrements sheet = sche::generate_sheet(factors, normals, config.seed);
    if (s == 0 && !opt.dump.empty()) sche::save_sheet(sheet, opt.dump);
    for (int i = 0; i < m; ++i) {
      for (int k = 0; k < n; ++k) flat[i * n + k] = sheet.d(i, k);
    }
    second_moment.noalias() += flat * flat.transpose();
  }
  second_moment /= static_cast<double>(opt.samples);

  double max_dev = 0.0;
  int worst_a = 0, worst_b = 0;
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      const int i = a / n + 1, k = a % n + 1;
      const int ip = b / n + 1, kp = b % n + 1;
      const double cov = sche::increment_covariance_time(hurst.h1, tau, i, ip) *
                         sche::increment_covariance_space(hurst.h2, h, k, kp);
      const double var_a = sche::increment_covariance_time(hurst.h1, tau, i, i) *
                           sche::increment_covariance_space(hurst.h2, h, k, k);
      const double var_b = sche::increment_covariance_time(hurst.h1, tau, ip, ip) *
                           sche::increment_covariance_space(hurst.h2, h, kp, kp);
      const double se = std::sqrt((var_a * var_b + cov * cov) / opt.samples);
      const double dev = std::abs(second_moment(a, b) - cov) / se;
      if (dev > max_dev) {
        max_dev = dev;
        worst_a = a;
        worst_b = b;
      }
    }
  }

  std::printf("noise check: H = (%g, %g), sheet %dx%d, %d samples, seed %llu\n", hurst.h1,
              hurst.h2, m, n, opt.samples, static_cast<unsigned long long>(config.seed));
  std::printf("  Cholesky reconstruction (rel. Frobenius): time %.3e, space %.3e\n", recon_time,
              recon_space);
  std::printf("  max standardized covariance deviation: %.3f at entries (%d,%d)x(%d,%d)\n",
              max_dev, worst_a / n + 1, worst_a % n + 1, worst_b / n + 1, worst_b % n + 1);
  const bool ok = recon_time <= 1e-8 && recon_space <= 1e-8 && max_dev < 5.0;
  std::printf("  verdict: %s\n", ok ? "PASS" : "FAIL");
  return ok ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// operator-check

struct OperatorCheckOptions {
  std::vector<int> n_list = {8, 16, 32, 64, 128, 256, 512};
  std::uint64_t seed = 12345;
};

int cmd_operator_check(const OperatorCheckOptions& opt) {
  bool all_ok = true;
  std::mt19937_64 engine(opt.seed);
  std::normal_distribution<double> normal;
  for (int n : opt.n_list) {
    const sche::Grid grid = sche::build_grid(n);
    const sche::SpectralBasis basis = sche::make_spectral_basis(grid);

    double eigen_resid = 0.0;
    for (int j = 0; j < n; ++j) {
      const sche::GridFunction lhs = sche::apply_laplacian(grid, basis.eigenvectors.col(j));
      eigen_resid = std::max(
          eigen_resid,
          (lhs + basis.eigenvalues[j] * basis.eigenvectors.col(j)).cwiseAbs().maxCoeff());
    }
    const double ortho = (basis.eigenvectors.transpose() * basis.eigenvectors -
                          Eigen::MatrixXd::Identity(n, n))
                             .cwiseAbs()
                             .maxCoeff();

    sche::GridFunction u(n), v(n);
    for (int i = 0; i < n; ++i) {
      u[i] = normal(engine);
      v[i] = normal(engine);
    }
    const double sym_lhs = sche::inner_product(grid, sche::apply_laplacian(grid, u), v);
    const double sym_rhs = sche::inner_product(grid, u, sche::apply_laplacian(grid, v));
    const double symmetry = std::abs(sym_lhs - sym_rhs) / std::max(1.0, std::abs(sym_lhs));
    sche::GridFunction w = u / u.norm();
    const sche::GridFunction via_two =
        sche::semigroup_apply(basis, 0.25e-3, 0.0, sche::semigroup_apply(basis, 0.75e-3, 0.0, w));
    const sche::GridFunction via_one = sche::semigroup_apply(basis, 1e-3, 0.0, w);
    const double semigroup_law = (via_two - via_one).cwiseAbs().maxCoeff();

    const double l2 = sche::lp_norm(grid, u, 2.0);
    const double semi1 = sche::seminorm(basis, u, 1);
    bool pointwise_ok = true;
    for (int i = 0; i < n; ++i) {
      pointwise_ok = pointwise_ok && M_PI * u[i] * u[i] <= l2 * l2 + 2.0 * M_PI * l2 * semi1;
    }
    const double linf = sche::lp_norm(grid, u, std::numeric_limits<double>::infinity());
    const bool linf_ok = linf * linf <= l2 * l2 / M_PI + 2.0 * l2 * semi1;

    const double bridge = std::abs(l2 * l2 - grid.h * u.squaredNorm());
    const bool bridge_ok = bridge <= 1e-13 * l2 * l2;

    // Smoothing: mode multipliers stay below the analytic supremum of
    // x^gamma exp(-x^2 t), so norms contract accordingly.
    bool smoothing_ok = true;
    sche::GridFunction centered = u;
    centered.array() -= u.mean();
    for (double gamma : {0.5, 1.0, 2.0}) {
      for (double t : {1e-3, 1e-1}) {
        const double sup = std::pow(gamma / (2.0 * std::exp(1.0) * t), gamma / 2.0);
        const double lhs = sche::lp_norm(grid, sche::semigroup_apply(basis, t, gamma, centered), 2.0);
        smoothing_ok =
            smoothing_ok && lhs <= sup * sche::lp_norm(grid, centered, 2.0) * (1.0 + 1e-12);
      }
    }

    bool holder_ok = true;
    const double ps[] = {1.0, 2.0, 6.0, std::numeric_limits<double>::infinity()};
    for (std::size_t a = 0; a < std::size(ps); ++a) {
      for (std::size_t b = a; b < std::size(ps); ++b) {
        const double factor = std::isinf(ps[b]) ? std::pow(M_PI, 1.0 / ps[a])
                                                : std::pow(M_PI, 1.0 / ps[a] - 1.0 / ps[b]);
        holder_ok = holder_ok && sche::lp_norm(grid, u, ps[a]) <=
                                     factor * sche::lp_norm(grid, u, ps[b]) * (1.0 + 1e-12);
      }
    }

    const bool ok = eigen_resid <= 1e-10 && ortho <= 1e-12 && symmetry <= 1e-12 &&
                    semigroup_law <= 1e-12 && pointwise_ok && linf_ok && bridge_ok &&
                    smoothing_ok && holder_ok;
    all_ok = all_ok && ok;
    std::printf(
        "N = %4d: eigen %.2e ortho %.2e symmetry %.2e semigroup %.2e pointwise %s linf %s "
        "bridge %s smoothing %s lp-scale %s -> %s\n",
        n, eigen_resid, ortho, symmetry, semigroup_law, pointwise_ok ? "ok" : "FAIL",
        linf_ok ? "ok" : "FAIL", bridge_ok ? "ok" : "FAIL", smoothing_ok ? "ok" : "FAIL",
        holder_ok ? "ok" : "FAIL", ok ? "PASS" : "FAIL");
  }
  return all_ok ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// holder

struct HolderOptions {
  std::string config_path;
  int trajectories = 500;
  int m = 1024;
  int n = 32;
  int workers = 0;
};

int cmd_holder(const HolderOptions& opt) {
  const sche::RunConfig config = sche::load_run_config(opt.config_path);
  sche::HolderConfig holder;
  holder.hurst = config.params.hurst;
  holder.sigma = config.params.sigma > 0.0 ? config.params.sigma : 1.0;
  holder.horizon = config.params.horizon;
  holder.m_steps = opt.m;
  holder.n_cells = opt.n;
  holder.trajectories = opt.trajectories;
  holder.seed = config.seed;
  holder.workers = resolve_workers(opt.workers > 0 ? opt.workers : config.workers);

  const double estimate = sche::estimate_holder_exponent(holder);
  const double theory = sche::holder_exponent_theory(holder.hurst);
  std::printf("time regularity of the stochastic convolution, H = (%g, %g):\n", holder.hurst.h1,
              holder.hurst.h2);
  std::printf("  estimated exponent:   %.5f  (K = %d, M = %d, N = %d)\n", estimate,
              holder.trajectories, holder.m_steps, holder.n_cells);
  std::printf("  theoretical exponent: %.5f\n", theory);
  std::printf("  difference:           %+.5f\n", estimate - theory);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "sche - tamed exponential Euler solver for the stochastic Cahn-Hilliard equation\n"
      "driven by a fractional Brownian sheet, with a Monte-Carlo convergence harness."};
  app.require_subcommand(1);
  app.footer(
      "Exit codes:\n"
      "  0  success\n"
      "  1  unexpected error\n"
      "  2  configuration or argument error\n"
      "  3  divergence threshold breached in a study\n"
      "  4  verification check failed\n"
      "  5  output I/O error\n"
      "The SCHE_SEED environment variable overrides the configured seed.");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "run one trajectory and write snapshots");
  simulate->add_option("--config", sim.config_path, "config file")->required();
  simulate->add_option("--snapshots", sim.snapshots, "comma-separated snapshot times");
  simulate->add_option("--out-dir", sim.out_dir, "output directory (overrides config)");
  simulate->add_option("--m", sim.m_override, "time steps (overrides m_ref)");
  simulate->add_option("--n", sim.n_override, "grid points (overrides n_ref)");
  simulate->add_option("--trajectory", sim.trajectory, "substream index (default 0)");
  simulate->add_option("--dump-noise", sim.dump_noise, "write the consumed noise sheet (binary)");
  simulate->add_option("--load-noise", sim.load_noise, "replay a dumped noise sheet");

  ConvergenceOptions conv;
  auto* convergence =
      app.add_subcommand("convergence", "Monte-Carlo strong-convergence study and rate table");
  convergence->add_option("--config", conv.config_path, "config file")->required();
  convergence->add_option("--mode", conv.mode, "temporal | spatial | joint (overrides config)");
  convergence->add_option("--trajectories", conv.trajectories, "trajectory count override");
  convergence->add_option("--workers", conv.workers, "worker threads (0 = all cores)");
  convergence->add_option("--out-dir", conv.out_dir, "output directory (overrides config)");
  convergence->add_option("--seed", conv.seed, "seed override")
      ->each([&](const std::string&) { conv.seed_set = true; });

  NoiseCheckOptions noise;
  auto* noise_check =
      app.add_subcommand("noise-check", "empirical vs analytic noise covariance report");
  noise_check->add_option("--config", noise.config_path, "config file")->required();
  noise_check->add_option("--samples", noise.samples, "number of sheets (default 100000)");
  noise_check->add_option("--m", noise.m, "time cells (default 4)");
  noise_check->add_option("--n", noise.n, "space cells (default 4)");
  noise_check->add_option("--dump", noise.dump, "write the first sheet (binary)");

  OperatorCheckOptions oper;
  auto* operator_check =
      app.add_subcommand("operator-check", "difference-operator and norm invariant suite");
  operator_check->add_option("--n-list", oper.n_list, "grid sizes to check")->delimiter(',');
  operator_check->add_option("--seed", oper.seed, "seed for the random probe vectors");

  HolderOptions holder;
  auto* holder_cmd = app.add_subcommand(
      "holder", "estimated vs theoretical time regularity of the stochastic convolution");
  holder_cmd->add_option("--config", holder.config_path, "config file")->required();
  holder_cmd->add_option("--trajectories", holder.trajectories, "sample count (default 500)");
  holder_cmd->add_option("--m", holder.m, "time steps (default 1024)");
  holder_cmd->add_option("--n", holder.n, "grid points (default 32)");
  holder_cmd->add_option("--workers", holder.workers, "worker threads (0 = all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*convergence) return cmd_convergence(conv);
    if (*noise_check) return cmd_noise_check(noise);
    if (*operator_check) return cmd_operator_check(oper);
    if (*holder_cmd) return cmd_holder(holder);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.code;
  } catch (const sche::study_divergence_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitDivergence;
  } catch (const sche::divergence_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitDivergence;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
