// Explicit planar domains and fixed-point constructions.
#pragma once

#include <vector>

#include "mdyn/maps.hpp"
#include "mdyn/region.hpp"

namespace mdyn {

struct DomainResult {
  Region region;
  int depth = 0;          // iterations performed
  double unresolved = 0;  // mass change of the last iteration
  bool converged = false;
};

// Sorted orbit points of both interval endpoints (one-sided), plus 0 for the
// Nakada and CKS families.  Throws if an orbit is neither finite nor periodic
// within the horizon.
std::vector<Scalar> endpoint_partition(const PiecewiseMap& T, int horizon = 1000);

// Decreasing fixed point K -> I x [0, b] u T(K) from I x [0, 1] on the endpoint
// partition, b = 1 / (d_alpha(alpha) + 1).  Fiber endpoints are floating.
DomainResult nakada_lambda(const Scalar& alpha, int depth = 200);

// d_alpha(alpha): digit of alpha itself.
long nakada_alpha_digit(const Scalar& alpha);

// [0,1] x [-1,0] u  U_{i=1..n-2} [r_i, r_{i-1}] x [-1/r_{i-1}, 0]
Region cks_omega_one(int n);
// Omega minus the images of D = (eps0, t] x [-1/t, 0] under (A C^2)^i, i = 0..n-2.
Region accelerated_gamma(int n);

// Increasing fixed point with single-interval fibers on the endpoint partition,
// seeded by I x {0}.  Meant for T_{n,alpha} with small alpha.
DomainResult hull_domain(const PiecewiseMap& T, int max_iters = 5000);

struct FixedPointResult {
  Region region;
  double displacement = 0;  // Hausdorff distance of the last two fiber families
  int iterations = 0;
};
// Gridded orbit closure of I x {0}: x-grid of the given width, fibers merged
// across gaps narrower than the width.
FixedPointResult fixed_point_domain(const PiecewiseMap& T, int iters, double resolution);

}  // namespace mdyn
