// Bijectivity checks for planar extensions and ergodicity certificates.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mdyn/maps.hpp"
#include "mdyn/region.hpp"

namespace mdyn {

// Image of R under the planar extension, cell by cell over the cylinder
// decomposition.  Near accumulation points of cylinders the pieces form
// parabolic families M_k = P^k M_0; their images are summed in closed form when
// the families tile, otherwise a few members are imaged and the rest is
// counted in `unresolved`.
struct PlanarImage {
  std::vector<Cell> cells;
  double unresolved = 0;  // mu-mass of source pieces without an image
  int pieces = 0;
  int tails = 0, tails_closed_form = 0;
};
PlanarImage planar_image(const PiecewiseMap& T, const Region& R, double w_min = 1e-6);

struct BijectivityReport {
  double mass = 0;       // mu(R)
  double overlap = 0;    // pairwise overlaps among image cells
  double uncovered = 0;  // R minus image
  double excess = 0;     // image minus R
  double unresolved = 0;
  double defect = 0;  // max(overlap, excess, uncovered - unresolved)
  double threshold = 0;
  bool pass = false;
  int pieces = 0, tails = 0, tails_closed_form = 0;
};
// Passes when defect <= tol * mu(R) (tol alone when mu(R) is infinite).
BijectivityReport check_bijectivity(const PiecewiseMap& T, const Region& R, double tol,
                                    double w_min = 1e-6);

struct FiberSymmetry {
  long d = 0;
  double overlap = 0;  // Lebesgue length of Phi(x') n W^t Phi(x)
  double gap = 0;      // length of [0,1] not covered by Phi(x') u W^t Phi(x)
  bool ok = false;
};
// Pairs x in the (+1:d) cylinder with x' = pairing(x) (W by default).
std::vector<FiberSymmetry> nakada_fiber_symmetry(const Region& R, const Scalar& alpha,
                                                 const std::vector<long>& ds, double tol,
                                                 const Moebius& pairing = mat::W());

struct CertifyParams {
  double tol = 1e-9;    // bijectivity tolerance relative to mu
  int slabs = 64;       // x-subdivision for fiber bounds
  int grid = 2000;      // slabs for the ratio enclosure
  int horizon = 200;    // orbit horizon for bounded non-full range
  double w_min = 1e-3;  // cylinder resolution
  int candidates = 40;  // full cylinders tried for (c)/(d)
};

struct OrbitEvidence {
  std::string start;   // endpoint of a non-full cylinder
  std::string status;  // terminates | periodic | unproven
  int length = 0;
};

struct Certificate {
  bool granted = false;
  std::vector<std::string> failed;  // hypotheses a, b, c, d or "bijectivity"
  double b = 0, B = 0;              // fiber bounds
  double hyperbola_gap = 0;         // min |1 + xy| over cell corners
  double ratio_min = 0, ratio_max = 0;  // image-fiber / receiving-fiber over the full cylinder
  double rho = 0;                       // max(ratio_max, 1 - ratio_min)
  int r = 0;  // minimal r with rho^(r-1) B < b
  std::optional<Cylinder> full_cylinder;
  std::vector<OrbitEvidence> orbits;
  BijectivityReport bijectivity;
};
Certificate certify(const PiecewiseMap& T, const Region& R, const CertifyParams& p = {});

}  // namespace mdyn
