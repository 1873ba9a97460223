// Arnoux's transversal: lifting a planar extension to the geodesic flow on
// PSL2(R).  A(x, y) = ((x, xy - 1), (1, y)), g_t = diag(e^(t/2), e^(-t/2)).
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mdyn/maps.hpp"
#include "mdyn/region.hpp"

namespace mdyn {

using Mat2 = std::array<double, 4>;  // row major

// Lebesgue-preserving form of the planar step:
// x' = M x, y' = det M ((cx + d)^2 y - c(cx + d)).
std::pair<Scalar, Scalar> leb_step(const Moebius& M, const Scalar& x, const Scalar& y);

Mat2 arnoux_A(double x, double y);

struct FlowSample {
  double x = 0, y = 0;
  Mat2 A{}, A_next{}, M{};
  double t0 = 0;   // flow time, -2 ln(cx + d) with cx + d > 0
  int det = 1;     // +1: M A g = A', -1: M A g = A' U
  double residual = 0;
};

// Max-entry residual of M A(x, y) g_t0 against A(x', y') (times U when
// det M = -1), up to sign.  (x', y') is taken from leb_step.
FlowSample verify_flow_relation(const Moebius& M, const Scalar& x, const Scalar& y);
// Same check against a caller-supplied image point.
FlowSample flow_residual(const Moebius& M, double x, double y, double x_next, double y_next);

// Digit matrices M_(eps:d), d <= d_max, and U.
std::vector<Moebius> nakada_generators(long d_max);

struct FirstReturnParams {
  long samples = 100000;
  std::uint64_t seed = 1;
  int word_length = 0;  // 0 skips the competitor search
  long search_samples = 1000;
  double margin = 1e-9;  // a competitor must land this far inside R
};

struct Competitor {
  double x = 0, y = 0;
  Moebius N;
  double time = 0, return_time = 0;
};

struct FirstReturnReport {
  long samples = 0;
  double tau_min = 0, tau_mean = 0;  // return time ln|T'(x)| = -2 ln|cx + d|
  long negative = 0;                 // samples with negative return time
  int word_length = 0;
  long words = 0;                    // reduced words searched
  std::vector<Competitor> competitors;  // empty: none up to word_length
};

// Samples R uniformly in area.  The search looks for words N in `generators`
// (and inverses) with T_N(x, y) in R and 0 <= time(N, x) < return time.
FirstReturnReport first_return_diagnostics(const PiecewiseMap& T, const Region& R,
                                           const std::vector<Moebius>& generators,
                                           const FirstReturnParams& p = {});

}  // namespace mdyn
