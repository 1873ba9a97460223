// Projective 2x2 matrices with determinant +-1 acting on the extended real line.
#pragma once

#include <optional>
#include <string>

#include "mdyn/scalar.hpp"

namespace mdyn {

class Moebius {
 public:
  Moebius() : a(1), b(0), c(0), d(1) {}
  // Rescales so that det = +-1; throws if |det| is not the square of a rational.
  Moebius(Scalar a, Scalar b, Scalar c, Scalar d);

  static Moebius identity() { return {}; }

  Scalar det() const { return a * d - b * c; }
  int det_sign() const { return det().sign(); }

  ExtReal apply(const ExtReal& x) const;
  Scalar apply(const Scalar& x) const;  // throws std::domain_error at the pole
  // Finite pole -d/c, or nullopt when the pole is at infinity.
  std::optional<Scalar> pole() const;

  Moebius operator*(const Moebius& o) const;
  Moebius inverse() const;
  Moebius transpose() const { return raw(a, c, b, d); }
  Moebius conjugate_by_R() const { return raw(d, -c, -b, a); }  // R M R^-1
  Moebius pow(long k) const;
  Moebius negated() const { return raw(-a, -b, -c, -d); }

  bool projective_eq(const Moebius& o) const;
  bool operator==(const Moebius& o) const {
    return a == o.a && b == o.b && c == o.c && d == o.d;
  }
  std::string str() const;

  Scalar a, b, c, d;

 private:
  static Moebius raw(Scalar a, Scalar b, Scalar c, Scalar d);
};

// 2 ln|cx + d|.  Independent of the sign of the representative.
double tau(const Moebius& M, const Scalar& x);

namespace mat {
Moebius R();                         // [[0,-1],[1,0]]
Moebius W();                         // [[1,0],[-1,-1]]
Moebius U();                         // diag(1,-1)
Moebius shift(const Scalar& lambda);  // x -> x + lambda
Moebius nakada_M(int eps, long d);   // [[-d, eps],[1, 0]]
Moebius nakada_N(int eps, long d);   // [[0, 1],[eps, d]]
Moebius cks_A(int n);                // [[1, t],[0, 1]], t = 1 + nu_n
Moebius cks_C();                     // [[-1, 1],[-1, 0]], order three
Scalar cks_t(int n);
}  // namespace mat

}  // namespace mdyn
