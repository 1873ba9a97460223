// Piecewise Moebius interval maps: Nakada alpha-continued fractions, the
// triangle-group family T_{n,alpha} and the accelerated first-return map g.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mdyn/moebius.hpp"

namespace mdyn {

enum class Family { nakada, cks, cks_accel };

// Which one-sided limit to use when x sits on a cylinder boundary.  `exact`
// follows the defining formula; `right`/`left` evaluate T(x+)/T(x-).
enum class Side { exact, right, left };

inline Side flip(Side s) {
  return s == Side::right ? Side::left : (s == Side::left ? Side::right : s);
}

struct Digit {
  // nakada {eps, d}; cks {k, l}; cks_accel {k, l, j}
  std::vector<long> tag;
  Moebius M;

  std::string label(Family f) const;
  bool operator==(const Digit& o) const { return tag == o.tag; }
};

struct OrbitPoint {
  Scalar value;
  std::optional<Digit> digit;  // nullopt: terminal point (digit infinity)
  int step = 0;
};

struct Cylinder {
  Scalar lo, hi;  // closure of the cylinder
  Digit digit;
  bool full = false;
};

// Interval with possibly infinite ends (nullopt = -inf / +inf).
struct Arc {
  std::optional<Scalar> lo, hi;
};

// Real components of {x : M x in [p, q]} (at most two, when the preimage wraps
// through infinity).
std::vector<Arc> preimage_arcs(const Moebius& M, const Scalar& p, const Scalar& q);

class PiecewiseMap {
 public:
  static PiecewiseMap nakada(const Scalar& alpha);
  static PiecewiseMap cks(int n, const Scalar& alpha);
  static PiecewiseMap cks_accelerated(int n);

  Family family() const { return family_; }
  const Scalar& alpha() const { return alpha_; }
  int n() const { return n_; }
  const Scalar& lo() const { return lo_; }
  const Scalar& hi() const { return hi_; }
  Scalar length() const { return hi_ - lo_; }
  std::string name() const;

  bool contains(const Scalar& x) const { return lo_ <= x && x < hi_; }

  // nullopt marks a terminal point: Nakada x = 0, or an accumulation point of
  // cylinders (CKS poles, the parabolic fixed point of g).
  std::optional<Digit> digit_at(const Scalar& x, Side side = Side::exact) const;
  Scalar step(const Scalar& x, Side side = Side::exact) const;
  // Points x_0 .. x_steps; stops early at a terminal point.  The side flag is
  // propagated through orientation-reversing digits.
  std::vector<OrbitPoint> orbit(const Scalar& x, int steps, Side side = Side::exact) const;
  Scalar derivative(const Scalar& x) const;  // det M / (cx + d)^2

  Digit make_digit(const std::vector<long>& tag) const;
  std::vector<Cylinder> cylinders(const Digit& d) const;
  Cylinder cylinder(const Digit& d) const;  // first component; throws if empty
  std::optional<Cylinder> cylinder_at(const Scalar& x, Side side = Side::exact) const;

  // Parabolic element fixing t and eps0 = U^-1 0 (accelerated map only).
  const Moebius& parabolic() const { return U_; }
  const Scalar& eps0() const { return eps0_; }
  const Scalar& t() const { return t_; }

  // Floating versions for long orbits.  Return NaN at a terminal point.
  double step_double(double x) const;
  double log_derivative_double(double x) const;  // ln |T'(x)|
  double lo_double() const { return lo_d_; }
  double hi_double() const { return hi_d_; }

 private:
  PiecewiseMap() = default;
  bool in_T(const Scalar& z, Side side) const;
  void check_domain(const Scalar& x, Side side) const;
  std::optional<Digit> cks_digit(const Scalar& x, Side side) const;
  std::optional<Digit> accel_digit(const Scalar& x, Side side) const;
  Scalar accel_b(long j) const;  // b_j = U^-j eps0, b_0 = eps0
  bool is_full(const Scalar& a, const Scalar& b, const Moebius& M) const;
  // Floating digit matrix as (a, b, c, d); false at a terminal point.
  bool digit_double(double x, double m[4]) const;

  Family family_ = Family::nakada;
  Scalar alpha_;
  int n_ = 0;
  Scalar lo_, hi_;
  Scalar Tlo_, Thi_;  // interval of the underlying T (differs for cks_accel)
  Scalar t_;          // interval length for CKS
  Moebius A_, C_;
  Moebius U_, Uinv_;
  Scalar eps0_;
  Scalar w0_, ws_;  // exact chart: w(b_j) = w0 + j ws
  double alpha_d_ = 0, lo_d_ = 0, hi_d_ = 0, t_d_ = 0, Tlo_d_ = 0, Thi_d_ = 0;
  double eps0_d_ = 0, w0_d_ = 0, s_d_ = 0;  // translation chart w = 1/(y - t) for U
};

// Cylinder decomposition of [a, b] found by midpoint probing.  Gaps narrower
// than w_min (around accumulation points) are returned as tails.
struct SplitPiece {
  Scalar lo, hi;
  Digit digit;
  bool full = false;
};
struct SplitResult {
  std::vector<SplitPiece> pieces;  // sorted by lo
  std::vector<std::pair<Scalar, Scalar>> tails;
  double tail_width = 0;
};
SplitResult split_by_cylinders(const PiecewiseMap& T, const Scalar& a, const Scalar& b,
                               double w_min);

// Exact test for the small-parameter regime of T_{n,alpha}: true when C x
// never lands back in the interval (every digit has l = 1).
bool cks_only_l_one(int n, const Scalar& alpha);

}  // namespace mdyn
