#pragma once

#include <Eigen/Core>

#include "sche/grid.hpp"

namespace sche {

/// Eigenpairs of the negated Neumann difference operator on the staggered
/// grid, built from the closed form (no numerical eigensolver):
///   lambda_{N,j} = 4 N^2 sin^2(j pi / (2N)) / pi^2,
///   e_j(k) = sqrt(2/N) cos(j (k - 1/2) pi / N)  (e_0(k) = 1/sqrt(N)).
/// Columns of `eigenvectors` are Euclidean-orthonormal. Immutable after
/// construction and safe to share across threads.
struct SpectralBasis {
  Grid grid;
  Eigen::VectorXd eigenvalues;   // lambda_{N,0..N-1}, increasing, lambda_0 = 0
  Eigen::MatrixXd eigenvectors;  // column j = e_j
};

/// Closed-form eigenvalue lambda_{N,j}; rejects j outside [0, N-1].
double eigenvalue(int n_points, int index);

SpectralBasis make_spectral_basis(const Grid& grid);

/// Coefficients hat(u)_j = <u, e_j> (Euclidean).
Eigen::VectorXd to_spectral(const SpectralBasis& basis, const GridFunction& u);

GridFunction from_spectral(const SpectralBasis& basis, const Eigen::VectorXd& coeffs);

/// Applies lambda^gamma * exp(-lambda^2 t) mode by mode; exact for the
/// discrete system. gamma = 0 with t = 0 is the identity; for gamma > 0 the
/// zero mode is annihilated. Rejects negative t or gamma.
GridFunction semigroup_apply(const SpectralBasis& basis, double t, double gamma,
                             const GridFunction& u);

/// The per-mode multipliers lambda^gamma exp(-lambda^2 t) used above, exposed
/// so steppers can fuse them into spectral recursions.
Eigen::VectorXd semigroup_multipliers(const SpectralBasis& basis, double t, double gamma);

}  // namespace sche
