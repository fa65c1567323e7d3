// Acceptance suite: runs every release criterion end to end and prints one
// PASS/FAIL line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sche/expr.hpp"
#include "sche/harness.hpp"
#include "sche/norms.hpp"

using namespace sche;

namespace {

constexpr std::uint64_t kSeed = 20260810;

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ModelParams example_params(double h1, double h2) {
  ModelParams params;
  params.a0 = 1.0 / 3.0;
  params.a1 = 1.0 / 3.0;
  params.a2 = -1.0 / 3.0;
  params.a3 = 1.0 / 3.0;
  params.sigma = 1.0 / 3.0;
  params.hurst = {h1, h2};
  params.horizon = 1.0;
  params.initial = parse_expression("1/3 + sqrt(3)*cos(x)/3");
  return params;
}

StudyConfig temporal_study(double h1, double h2, int m_ref) {
  StudyConfig study;
  study.params = example_params(h1, h2);
  study.m_ref = m_ref;
  study.n_ref = 64;
  study.mode = StudyMode::temporal;
  study.coarse_levels = make_levels(StudyMode::temporal, m_ref, 64, {8, 16, 32, 64, 128}, {});
  study.trajectories = 200;
  study.seed = kSeed;
  study.workers = 1;
  return study;
}

std::string rate_detail(const char* label, const RateTable& table, double expect, double tol,
                        double runtime) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s: ls order %.4f (expected %.3f +- %.2f), %.1f s", label,
                table.ls_order, expect, tol, runtime);
  return buf;
}

RateTable temporal_criterion(int criterion, double h1, double h2, int m_ref, double expect) {
  const auto t0 = std::chrono::steady_clock::now();
  const RateTable table = run_study(temporal_study(h1, h2, m_ref));
  const double runtime = seconds_since(t0);
  char label[128];
  std::snprintf(label, sizeof(label), "temporal rate, H = (%g, %g)", h1, h2);
  const bool pass =
      std::abs(table.ls_order - expect) <= 0.15 && table.diverged == 0 && runtime <= 600.0;
  report(criterion, pass, rate_detail(label, table, expect, 0.15, runtime));
  return table;
}

void criterion_spatial() {
  StudyConfig study;
  study.params = example_params(0.75, 0.5);
  study.m_ref = 1024;
  study.n_ref = 256;
  study.mode = StudyMode::spatial;
  study.coarse_levels = make_levels(StudyMode::spatial, 1024, 256, {}, {8, 16, 32, 64});
  study.trajectories = 200;
  study.seed = kSeed;
  study.workers = 1;
  const auto t0 = std::chrono::steady_clock::now();
  const RateTable table = run_study(study);
  const double runtime = seconds_since(t0);
  // One-sided: overshoot above 1 is permitted.
  const bool pass = table.ls_order >= 0.85 && table.diverged == 0;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "spatial rate, H = (0.75, 0.5): ls order %.4f (required >= 0.85), %.1f s",
                table.ls_order, runtime);
  report(4, pass, buf);
}

void criterion_holder() {
  struct Case {
    double h1, h2;
  };
  bool pass = true;
  std::string detail = "stochastic-convolution regularity:";
  for (const Case& c : {Case{0.5, 0.75}, Case{0.75, 0.5}, Case{0.95, 0.75}}) {
    HolderConfig cfg;
    cfg.hurst = {c.h1, c.h2};
    cfg.sigma = 1.0 / 3.0;
    cfg.horizon = 1.0;
    cfg.m_steps = 1024;
    cfg.n_cells = 32;
    cfg.trajectories = 500;
    cfg.seed = kSeed;
    cfg.workers = 1;
    const double estimate = estimate_holder_exponent(cfg);
    const double theory = holder_exponent_theory(cfg.hurst);
    pass = pass && std::abs(estimate - theory) <= 0.08;
    char buf[96];
    std::snprintf(buf, sizeof(buf), " H=(%g,%g) est %.4f vs %.4f;", c.h1, c.h2, estimate, theory);
    detail += buf;
  }
  report(5, pass, detail + " tolerance 0.08");
}

void criterion_linear_oracle() {
  ModelParams params = example_params(0.75, 0.5);
  params.drift_enabled = false;
  const auto basis = std::make_shared<SpectralBasis>(make_spectral_basis(build_grid(16)));
  const SchemeConfig cfg = make_scheme_config(params, basis, 64);
  const CholeskyFactorPair factors = make_cholesky_pair(params.hurst, 64, 16, 1.0);
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    GaussianStream normals(kSeed, k);
    const SheetIncrements sheet = generate_sheet(factors, normals, kSeed);
    const Snapshots snaps = run_trajectory(cfg, sheet, {64});
    const GridFunction oracle = sche_test::linear_closed_form(cfg, sheet);
    worst = std::max(worst, (snaps.at(64) - oracle).cwiseAbs().maxCoeff());
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "drift-free stepper vs closed spectral solution (N=16, M=64, 10 paths): "
                "max deviation %.2e (tol 1e-10)",
                worst);
  report(6, worst <= 1e-10, buf);
}

void criterion_mild_equivalence() {
  double worst = 0.0;
  for (int n : {2, 4, 8}) {
    for (int m : {2, 4, 8}) {
      const auto basis = std::make_shared<SpectralBasis>(make_spectral_basis(build_grid(n)));
      const ModelParams params = example_params(0.5, 0.75);
      const SchemeConfig cfg = make_scheme_config(params, basis, m);
      const SheetIncrements sheet = generate_sheet(
          params.hurst, m, n, 1.0, kSeed, static_cast<std::uint64_t>(100 * n + m));
      std::set<int> record;
      for (int i = 0; i <= m; ++i) record.insert(i);
      const Snapshots snaps = run_trajectory(cfg, sheet, record);
      const std::vector<GridFunction> direct = sche_test::mild_direct_path(cfg, sheet);
      for (int i = 0; i <= m; ++i) {
        worst = std::max(worst, (snaps.at(i) - direct[i]).cwiseAbs().maxCoeff());
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "recursion vs direct mild formula on (N, M) in {2,4,8}^2: max deviation %.2e "
                "(tol 1e-10)",
                worst);
  report(7, worst <= 1e-10, buf);
}

void criterion_operator_suite() {
  std::mt19937_64 engine(kSeed);
  std::normal_distribution<double> normal;
  double worst_eigen = 0.0, worst_ortho = 0.0, worst_semigroup = 0.0;
  bool inequalities = true;
  for (int n : {8, 16, 32, 64, 128, 256, 512}) {
    const Grid grid = build_grid(n);
    const SpectralBasis basis = make_spectral_basis(grid);
    for (int j = 0; j < n; ++j) {
      const GridFunction lhs = apply_laplacian(grid, basis.eigenvectors.col(j));
      worst_eigen = std::max(
          worst_eigen,
          (lhs + basis.eigenvalues[j] * basis.eigenvectors.col(j)).cwiseAbs().maxCoeff());
    }
    worst_ortho = std::max(worst_ortho, (basis.eigenvectors.transpose() * basis.eigenvectors -
                                         Eigen::MatrixXd::Identity(n, n))
                                            .cwiseAbs()
                                            .maxCoeff());
    GridFunction u(n);
    for (int i = 0; i < n; ++i) u[i] = normal(engine);
    const GridFunction w = u / u.norm();
    const GridFunction two =
        semigroup_apply(basis, 0.25e-3, 0.0, semigroup_apply(basis, 0.75e-3, 0.0, w));
    const GridFunction one = semigroup_apply(basis, 1e-3, 0.0, w);
    worst_semigroup = std::max(worst_semigroup, (two - one).cwiseAbs().maxCoeff());

    const double l2 = lp_norm(grid, u, 2.0);
    const double semi1 = seminorm(basis, u, 1);
    for (int i = 0; i < n; ++i) {
      inequalities = inequalities && M_PI * u[i] * u[i] <= l2 * l2 + 2.0 * M_PI * l2 * semi1;
    }
    const double linf = lp_norm(grid, u, std::numeric_limits<double>::infinity());
    inequalities = inequalities && linf * linf <= l2 * l2 / M_PI + 2.0 * l2 * semi1;
  }
  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "operator suite N in {8..512}: eigen %.2e (1e-10), ortho %.2e (1e-12), "
                "semigroup %.2e (1e-12), explicit-constant inequalities %s",
                worst_eigen, worst_ortho, worst_semigroup, inequalities ? "hold" : "VIOLATED");
  report(8, worst_eigen <= 1e-10 && worst_ortho <= 1e-12 && worst_semigroup <= 1e-12 &&
                inequalities,
         buf);
}

void criterion_noise_suite() {
  // Cholesky reconstruction at study scale.
  double worst_recon = 0.0;
  for (const HurstPair& hurst : {HurstPair{0.75, 0.6}, HurstPair{0.95, 0.75}}) {
    const int m = 512, n = 64;
    const CholeskyFactorPair pair = make_cholesky_pair(hurst, m, n, 1.0);
    Eigen::MatrixXd r1(m, m), r2(n, n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        r1(i, j) = increment_covariance_time(hurst.h1, 1.0 / m, i + 1, j + 1);
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        r2(i, j) = increment_covariance_space(hurst.h2, M_PI / n, i + 1, j + 1);
      }
    }
    worst_recon = std::max(worst_recon,
                           (pair.l_time * pair.l_time.transpose() - r1).norm() / r1.norm());
    worst_recon = std::max(worst_recon,
                           (pair.l_space * pair.l_space.transpose() - r2).norm() / r2.norm());
  }

  // Empirical covariance, 1e5 sheets of 4x4, fully fractional pair.
  const HurstPair hurst{0.75, 0.75};
  const int m = 4, n = 4, samples = 100000;
  const CholeskyFactorPair factors = make_cholesky_pair(hurst, m, n, 1.0);
  Eigen::MatrixXd r1(m, m), r2(n, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) r1(i, j) = increment_covariance_time(hurst.h1, 0.25, i + 1, j + 1);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      r2(i, j) = increment_covariance_space(hurst.h2, M_PI / n, i + 1, j + 1);
    }
  }
  const int dim = m * n;
  Eigen::MatrixXd second_moment = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd flat(dim);
  for (int s = 0; s < samples; ++s) {
    GaussianStream normals(kSeed, static_cast<std::uint64_t>(s));
    const SheetIncrements sheet = generate_sheet(factors, normals);
    for (int i = 0; i < m; ++i) {
      for (int k = 0; k < n; ++k) flat[i * n + k] = sheet.d(i, k);
    }
    second_moment.noalias() += flat * flat.transpose();
  }
  second_moment /= static_cast<double>(samples);
  double max_dev = 0.0;
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      const double cov = r1(a / n, b / n) * r2(a % n, b % n);
      const double var_a = r1(a / n, a / n) * r2(a % n, a % n);
      const double var_b = r1(b / n, b / n) * r2(b % n, b % n);
      const double se = std::sqrt((var_a * var_b + cov * cov) / samples);
      max_dev = std::max(max_dev, std::abs(second_moment(a, b) - cov) / se);
    }
  }

  // Case-1 reduction: temporal white noise, row cross-covariances vanish.
  const HurstPair case1{0.5, 0.75};
  const CholeskyFactorPair f1 = make_cholesky_pair(case1, m, n, 1.0);
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < samples / 2; ++s) {
    GaussianStream normals(kSeed + 1, static_cast<std::uint64_t>(s));
    const SheetIncrements sheet = generate_sheet(f1, normals);
    cross.noalias() += sheet.d.row(0).transpose() * sheet.d.row(2);
  }
  cross /= static_cast<double>(samples / 2);
  double max_cross = 0.0;
  const double var_entry = 0.25 * std::pow(M_PI / n, 2 * case1.h2);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      const double se = std::sqrt(var_entry * var_entry / (samples / 2));
      max_cross = std::max(max_cross, std::abs(cross(k, l)) / se);
    }
  }

  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "noise suite: reconstruction %.2e (1e-8); covariance max dev %.2f SE; "
                "independent-rows max dev %.2f SE (both < 5)",
                worst_recon, max_dev, max_cross);
  report(9, worst_recon <= 1e-8 && max_dev < 5.0 && max_cross < 5.0, buf);
}

void criterion_determinism(const RateTable& first) {
  const RateTable again = run_study(temporal_study(0.5, 0.75, 1024));
  const std::string csv_a = rate_table_csv(first);
  const std::string csv_b = rate_table_csv(again);
  report(10, csv_a == csv_b,
         csv_a == csv_b ? "repeated study produced a byte-identical rate table CSV"
                        : "repeated study produced a DIFFERENT rate table CSV");
}

}  // namespace

int main() {
  std::printf("acceptance suite (seed %llu)\n", static_cast<unsigned long long>(kSeed));
  const RateTable c1 = temporal_criterion(1, 0.5, 0.75, 1024, 0.375);
  temporal_criterion(2, 0.75, 0.5, 1024, 0.625);
  temporal_criterion(3, 0.95, 0.75, 512, 0.825);
  criterion_spatial();
  criterion_holder();
  criterion_linear_oracle();
  criterion_mild_equivalence();
  criterion_operator_suite();
  criterion_noise_suite();
  criterion_determinism(c1);
  if (failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criterion(s) failed\n", failures);
  }
  return failures;
}
