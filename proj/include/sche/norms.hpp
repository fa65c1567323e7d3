#pragma once

#include <variant>

#include "sche/grid.hpp"
#include "sche/spectral.hpp"

namespace sche {

/// (h sum |u_i|^p)^(1/p) for finite p >= 1; max |u_i| for p = infinity.
/// Pass std::numeric_limits<double>::infinity() for the max norm.
double lp_norm(const Grid& grid, const GridFunction& u, double p);

/// h sum u_i v_i.
double inner_product(const Grid& grid, const GridFunction& u, const GridFunction& v);

/// |u|_{k,N} = l2 norm of the k/2-th power of the negated difference operator
/// applied to u, evaluated spectrally. k in {1, 2, 3}.
double seminorm(const SpectralBasis& basis, const GridFunction& u, int k);

/// k = 0: the l2 norm; k >= 1: sqrt(l2^2 + sum of squared seminorms 1..k).
double sobolev_norm(const SpectralBasis& basis, const GridFunction& u, int k);

struct LpKind {
  double p;
};
struct SeminormKind {
  int k;
};
struct SobolevKind {
  int k;
};
using NormKind = std::variant<LpKind, SeminormKind, SobolevKind>;

/// Dispatches to the norm selected by `kind`. Seminorm and Sobolev kinds need
/// the spectral basis; the lp kind uses only its grid.
double evaluate_norm(const NormKind& kind, const SpectralBasis& basis, const GridFunction& u);

}  // namespace sche
