#pragma once

#include <Eigen/Core>

namespace sche {

/// A real-valued function sampled on the spatial grid, one value per point.
using GridFunction = Eigen::VectorXd;

/// Staggered 1-D mesh on [0, pi]: N cell-centered points x_i = (i - 1/2) h
/// with h = pi/N, so cell boundaries sit at multiples of h and coarse cells
/// are exact unions of fine cells.
struct Grid {
  int n_points = 0;
  double h = 0.0;
  Eigen::VectorXd points;
};

/// Builds the staggered grid. Rejects n_points < 2.
Grid build_grid(int n_points);

/// Second-order difference with homogeneous Neumann boundary rows:
/// first row (-u_1+u_2)/h^2, interior (u_{i-1}-2u_i+u_{i+1})/h^2,
/// last row (u_{N-1}-u_N)/h^2.
GridFunction apply_laplacian(const Grid& grid, const GridFunction& u);

/// Fourth-order difference: the Laplacian stencil applied twice.
GridFunction apply_bilaplacian(const Grid& grid, const GridFunction& u);

/// Piecewise-linear interpolant of grid values: constant on [0, x_1] and
/// [x_N, pi], linear between adjacent grid points.
double polygonal_interpolate(const Grid& grid, const GridFunction& u, double x);

}  // namespace sche
