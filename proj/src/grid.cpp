#include "sche/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sche {

Grid build_grid(int n_points) {
  if (n_points < 2) {
    throw std::invalid_argument("build_grid: n_points must be >= 2, got " +
                                std::to_string(n_points));
  }
  Grid grid;
  grid.n_points = n_points;
  grid.h = M_PI / n_points;
  grid.points.resize(n_points);
  for (int i = 0; i < n_points; ++i) {
    grid.points[i] = (i + 0.5) * grid.h;
  }
  return grid;
}

static void check_length(const Grid& grid, const GridFunction& u, const char* op) {
  if (u.size() != grid.n_points) {
    throw std::invalid_argument(std::string(op) + ": length mismatch, grid has " +
                                std::to_string(grid.n_points) + " points but vector has " +
                                std::to_string(u.size()));
  }
}

GridFunction apply_laplacian(const Grid& grid, const GridFunction& u) {
  check_length(grid, u, "apply_laplacian");
  const int n = grid.n_points;
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  GridFunction out(n);
  out[0] = (-u[0] + u[1]) * inv_h2;
  for (int i = 1; i + 1 < n; ++i) {
    out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_h2;
  }
  out[n - 1] = (u[n - 2] - u[n - 1]) * inv_h2;
  return out;
}

GridFunction apply_bilaplacian(const Grid& grid, const GridFunction& u) {
  return apply_laplacian(grid, apply_laplacian(grid, u));
}

double polygonal_interpolate(const Grid& grid, const GridFunction& u, double x) {
  check_length(grid, u, "polygonal_interpolate");
  const int n = grid.n_points;
  if (x <= grid.points[0]) return u[0];
  if (x >= grid.points[n - 1]) return u[n - 1];
  // x in (x_1, x_N): locate the cell [x_i, x_{i+1}) containing x. A node hit
  // resolves to weight 0 so grid values are reproduced exactly.
  int i = static_cast<int>((x / grid.h) - 0.5);
  if (i < 0) i = 0;
  if (i > n - 2) i = n - 2;
  while (i + 1 < n && grid.points[i + 1] <= x) ++i;
  while (i > 0 && grid.points[i] > x) --i;
  const double theta = (x - grid.points[i]) / grid.h;
  return u[i] + theta * (u[i + 1] - u[i]);
}

}  // namespace sche
