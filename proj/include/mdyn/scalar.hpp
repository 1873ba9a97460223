// Exact scalars over Q and the real fields Q(nu_n), nu_n = 2 cos(pi/n).
#pragma once

#include <gmpxx.h>

#include <compare>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace mdyn {

using Poly = std::vector<mpq_class>;  // coefficients, lowest degree first

// Monic minimal polynomial of 2cos(pi/n) over Q, derived from the cyclotomic
// polynomial of order 2n. Throws std::invalid_argument for n < 3.
Poly minimal_polynomial(int n);

// Rational isolating interval [lo, hi] for nu_n with width <= 2^-bits.
std::pair<mpq_class, mpq_class> nu_enclosure(int n, int bits);

// Element of Q (field index 0) or of Q(nu_n).  Values whose nu-coefficients
// vanish are stored as plain rationals, so a nonzero field index always means
// an irrational value.
class Scalar {
 public:
  Scalar() = default;
  Scalar(long v) : q_(v) {}  // NOLINT(google-explicit-constructor)
  Scalar(int v) : q_(v) {}   // NOLINT(google-explicit-constructor)
  Scalar(const mpq_class& q) : q_(q) { q_.canonicalize(); }  // NOLINT
  Scalar(long p, long q);

  static Scalar parse(const std::string& s);  // "p/q", "p", or decimal "0.39"
  static Scalar nu(int n);
  static Scalar field(int n, Poly coeffs);
  static Scalar from_double(double v);  // exact binary value

  int field_index() const { return n_; }
  bool is_rational() const { return n_ == 0; }
  const mpq_class& rational() const { return q_; }
  Poly coefficients() const;  // length 1 for rationals

  int sign() const;
  bool is_zero() const { return n_ == 0 && sgn(q_) == 0; }
  double to_double() const;
  std::pair<mpq_class, mpq_class> enclosure(int bits) const;
  mpz_class floor() const;
  Scalar abs() const { return sign() < 0 ? -*this : *this; }

  std::string str() const;

  Scalar operator-() const;
  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  Scalar& operator/=(const Scalar& o);
  Scalar inverse() const;

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
  friend bool operator==(const Scalar& a, const Scalar& b);
  friend std::strong_ordering operator<=>(const Scalar& a, const Scalar& b);
  friend std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

 private:
  static int common_field(const Scalar& a, const Scalar& b);
  void normalize();

  int n_ = 0;
  mpq_class q_;  // value when n_ == 0
  Poly c_;       // coefficients in nu_n when n_ != 0
};

// Scalar or the point at infinity of the extended real line.
struct ExtReal {
  bool inf = false;
  Scalar v;

  ExtReal() = default;
  ExtReal(const Scalar& s) : v(s) {}  // NOLINT(google-explicit-constructor)
  static ExtReal infinity() {
    ExtReal e;
    e.inf = true;
    return e;
  }
  bool operator==(const ExtReal& o) const { return inf == o.inf && (inf || v == o.v); }
  std::string str() const { return inf ? std::string("inf") : v.str(); }
  double to_double() const;
};

}  // namespace mdyn
