#include "sche/noise.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace sche {

void validate(const HurstPair& hurst) {
  if (!(hurst.h1 >= 0.5 && hurst.h1 < 1.0) || !(hurst.h2 >= 0.5 && hurst.h2 < 1.0)) {
    throw std::invalid_argument("HurstPair: parameters must lie in [0.5, 1)");
  }
}

double increment_covariance_time(double h1, double tau, int i, int j) {
  if (i < 1 || j < 1) {
    throw std::invalid_argument("increment_covariance_time: indices must be >= 1");
  }
  if (!(tau > 0.0)) {
    throw std::invalid_argument("increment_covariance_time: tau must be positive");
  }
  // Stationary form of
  //   (|t_i - t_{j-1}|^{2H} + |t_{i-1} - t_j|^{2H}
  //    - |t_i - t_j|^{2H} - |t_{i-1} - t_{j-1}|^{2H}) / 2
  // with the lag pulled out in integer arithmetic; for H = 1/2 distinct
  // increments come out exactly zero.
  const double e = 2.0 * h1;
  const double m = std::abs(i - j);
  return 0.5 * std::pow(tau, e) *
         (std::pow(m + 1.0, e) - 2.0 * std::pow(m, e) + std::pow(std::abs(m - 1.0), e));
}

double increment_covariance_space(double h2, double h, int k, int l) {
  if (k < 1 || l < 1) {
    throw std::invalid_argument("increment_covariance_space: indices must be >= 1");
  }
  if (!(h > 0.0)) {
    throw std::invalid_argument("increment_covariance_space: h must be positive");
  }
  return increment_covariance_time(h2, h, k, l);
}

namespace {

// In-place lower Cholesky that reports the offending pivot on failure.
// Returns the pivot index of the first non-positive diagonal, or -1.
int cholesky_in_place(Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double d = a(k, k) - a.row(k).head(k).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d)) {
      return static_cast<int>(k);
    }
    const double s = std::sqrt(d);
    a(k, k) = s;
    const Eigen::Index rest = n - k - 1;
    if (rest > 0) {
      a.col(k).tail(rest) =
          (a.col(k).tail(rest) - a.bottomLeftCorner(rest, k) * a.row(k).head(k).transpose()) / s;
    }
  }
  a.triangularView<Eigen::StrictlyUpper>().setZero();
  return -1;
}

Eigen::MatrixXd factor_covariance(const Eigen::MatrixXd& cov, const char* label) {
  Eigen::MatrixXd work = cov;
  int pivot = cholesky_in_place(work);
  if (pivot < 0) return work;
  const double jitter = 1e-12 * cov.trace() / static_cast<double>(cov.rows());
  std::fprintf(stderr,
               "warning: %s increment covariance not numerically positive definite "
               "(pivot %d); retrying with diagonal jitter %.3e\n",
               label, pivot, jitter);
  work = cov;
  work.diagonal().array() += jitter;
  pivot = cholesky_in_place(work);
  if (pivot >= 0) {
    throw std::runtime_error(std::string("Cholesky failure for ") + label +
                             " increment covariance at pivot " + std::to_string(pivot));
  }
  return work;
}

}  // namespace

CholeskyFactorPair make_cholesky_pair(const HurstPair& hurst, int m_steps, int n_cells,
                                      double horizon) {
  validate(hurst);
  if (m_steps < 1 || n_cells < 1) {
    throw std::invalid_argument("make_cholesky_pair: dimensions must be >= 1");
  }
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("make_cholesky_pair: horizon must be positive");
  }
  const double tau = horizon / m_steps;
  const double h = M_PI / n_cells;

  CholeskyFactorPair pair;
  pair.hurst = hurst;
  pair.m_steps = m_steps;
  pair.n_cells = n_cells;
  pair.horizon = horizon;

  // H = 1/2 increments are independent, the covariance is step^{2H} I and the
  // factor is exactly diagonal.
  if (hurst.h1 == 0.5) {
    pair.l_time = std::sqrt(tau) * Eigen::MatrixXd::Identity(m_steps, m_steps);
  } else {
    Eigen::MatrixXd r_time(m_steps, m_steps);
    for (int i = 0; i < m_steps; ++i) {
      for (int j = 0; j <= i; ++j) {
        const double c = increment_covariance_time(hurst.h1, tau, i + 1, j + 1);
        r_time(i, j) = c;
        r_time(j, i) = c;
      }
    }
    pair.l_time = factor_covariance(r_time, "temporal");
  }
  if (hurst.h2 == 0.5) {
    pair.l_space = std::sqrt(h) * Eigen::MatrixXd::Identity(n_cells, n_cells);
  } else {
    Eigen::MatrixXd r_space(n_cells, n_cells);
    for (int k = 0; k < n_cells; ++k) {
      for (int l = 0; l <= k; ++l) {
        const double c = increment_covariance_space(hurst.h2, h, k + 1, l + 1);
        r_space(k, l) = c;
        r_space(l, k) = c;
      }
    }
    pair.l_space = factor_covariance(r_space, "spatial");
  }
  return pair;
}

SheetIncrements generate_sheet(const CholeskyFactorPair& factors, GaussianStream& normals,
                               std::uint64_t seed_label) {
  const int m = factors.m_steps;
  const int n = factors.n_cells;
  Eigen::MatrixXd gauss(m, n);
  // Row-major fill order is part of the reproducibility contract.
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < n; ++k) {
      gauss(i, k) = normals();
    }
  }
  SheetIncrements sheet;
  sheet.m_steps = m;
  sheet.n_cells = n;
  sheet.horizon = factors.horizon;
  sheet.hurst = factors.hurst;
  sheet.seed = seed_label;
  if (factors.hurst.h1 == 0.5) {
    sheet.d = std::sqrt(factors.horizon / m) * gauss;
  } else {
    sheet.d = factors.l_time.triangularView<Eigen::Lower>() * gauss;
  }
  if (factors.hurst.h2 == 0.5) {
    sheet.d *= std::sqrt(M_PI / n);
  } else {
    sheet.d = sheet.d * factors.l_space.triangularView<Eigen::Lower>().transpose();
  }
  return sheet;
}

SheetIncrements generate_sheet(const HurstPair& hurst, int m_steps, int n_cells, double horizon,
                               std::uint64_t seed, std::uint64_t stream_id) {
  const CholeskyFactorPair factors = make_cholesky_pair(hurst, m_steps, n_cells, horizon);
  GaussianStream normals(seed, stream_id);
  return generate_sheet(factors, normals, seed);
}

SheetIncrements coarsen(const SheetIncrements& sheet, int r_time, int r_space) {
  if (r_time < 1 || r_space < 1) {
    throw std::invalid_argument("coarsen: ratios must be >= 1");
  }
  if (sheet.m_steps % r_time != 0 || sheet.n_cells % r_space != 0) {
    throw std::invalid_argument("coarsen: ratios must divide the sheet dimensions (" +
                                std::to_string(sheet.m_steps) + "x" +
                                std::to_string(sheet.n_cells) + " by " +
                                std::to_string(r_time) + "x" + std::to_string(r_space) + ")");
  }
  SheetIncrements out;
  out.m_steps = sheet.m_steps / r_time;
  out.n_cells = sheet.n_cells / r_space;
  out.horizon = sheet.horizon;
  out.hurst = sheet.hurst;
  out.seed = sheet.seed;
  out.d.setZero(out.m_steps, out.n_cells);
  for (int i = 0; i < out.m_steps; ++i) {
    for (int k = 0; k < out.n_cells; ++k) {
      out.d(i, k) = sheet.d.block(i * r_time, k * r_space, r_time, r_space).sum();
    }
  }
  return out;
}

GridFunction scaled_step_increment(const SheetIncrements& sheet, int step_index, double sigma) {
  if (step_index < 1 || step_index > sheet.m_steps) {
    throw std::out_of_range("scaled_step_increment: step index " + std::to_string(step_index) +
                            " outside [1, " + std::to_string(sheet.m_steps) + "]");
  }
  // One 1/sqrt(h) = sqrt(N/pi) comes from the normalized increment vector,
  // a second from the noise coefficient of the discrete equation; together
  // the cell increment enters scaled by sigma N / pi (white noise then has
  // the discrete-delta variance sigma^2 tau / h per point).
  const double scale = sigma * (sheet.n_cells / M_PI);
  return scale * sheet.d.row(step_index - 1).transpose();
}

namespace {

void put_u64(std::string& buf, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) buf.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

void put_f64(std::string& buf, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(buf, bits);
}

std::uint64_t get_u64(const char* p) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[b])) << (8 * b);
  return v;
}

double get_f64(const char* p) {
  const std::uint64_t bits = get_u64(p);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void save_sheet(const SheetIncrements& sheet, const std::string& path) {
  std::string buf;
  buf.reserve(48 + 8 * static_cast<std::size_t>(sheet.m_steps) * sheet.n_cells);
  put_u64(buf, static_cast<std::uint64_t>(sheet.m_steps));
  put_u64(buf, static_cast<std::uint64_t>(sheet.n_cells));
  put_f64(buf, sheet.horizon);
  put_f64(buf, sheet.hurst.h1);
  put_f64(buf, sheet.hurst.h2);
  put_u64(buf, sheet.seed);
  for (int i = 0; i < sheet.m_steps; ++i) {
    for (int k = 0; k < sheet.n_cells; ++k) {
      put_f64(buf, sheet.d(i, k));
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(buf.data(), static_cast<std::streamsize>(buf.size()))) {
    throw std::runtime_error("save_sheet: cannot write " + path);
  }
}

SheetIncrements load_sheet(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_sheet: cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 48) throw std::runtime_error("load_sheet: truncated header in " + path);
  SheetIncrements sheet;
  sheet.m_steps = static_cast<int>(get_u64(buf.data()));
  sheet.n_cells = static_cast<int>(get_u64(buf.data() + 8));
  sheet.horizon = get_f64(buf.data() + 16);
  sheet.hurst.h1 = get_f64(buf.data() + 24);
  sheet.hurst.h2 = get_f64(buf.data() + 32);
  sheet.seed = get_u64(buf.data() + 40);
  const std::size_t want = 48 + 8ull * sheet.m_steps * sheet.n_cells;
  if (sheet.m_steps < 1 || sheet.n_cells < 1 || buf.size() != want) {
    throw std::runtime_error("load_sheet: size mismatch in " + path);
  }
  sheet.d.resize(sheet.m_steps, sheet.n_cells);
  const char* p = buf.data() + 48;
  for (int i = 0; i < sheet.m_steps; ++i) {
    for (int k = 0; k < sheet.n_cells; ++k, p += 8) {
      sheet.d(i, k) = get_f64(p);
    }
  }
  return sheet;
}

}  // namespace sche
