#include "mdyn/moebius.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mdyn {

Moebius::Moebius(Scalar a_, Scalar b_, Scalar c_, Scalar d_)
    : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {
  Scalar D = det();
  if (D == Scalar(1) || D == Scalar(-1)) return;
  if (!D.is_rational() || D.is_zero())
    throw std::domain_error("Moebius: determinant must be +-1 up to a rational square");
  mpq_class q = abs(D.rational());
  mpz_class rn, rd;
  if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t()))
    throw std::domain_error("Moebius: determinant is not a rational square");
  mpz_sqrt(rn.get_mpz_t(), q.get_num_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), q.get_den_mpz_t());
  Scalar s(mpq_class(rn, rd));
  a /= s;
  b /= s;
  c /= s;
  d /= s;
}

Moebius Moebius::raw(Scalar a, Scalar b, Scalar c, Scalar d) {
  Moebius m;
  m.a = std::move(a);
  m.b = std::move(b);
  m.c = std::move(c);
  m.d = std::move(d);
  return m;
}

ExtReal Moebius::apply(const ExtReal& x) const {
  if (x.inf) {
    if (c.is_zero()) return ExtReal::infinity();
    return ExtReal(a / c);
  }
  Scalar den = c * x.v + d;
  if (den.is_zero()) return ExtReal::infinity();
  return ExtReal((a * x.v + b) / den);
}

Scalar Moebius::apply(const Scalar& x) const {
  Scalar den = c * x + d;
  if (den.is_zero()) throw std::domain_error("Moebius::apply at pole " + x.str());
  return (a * x + b) / den;
}

std::optional<Scalar> Moebius::pole() const {
  if (c.is_zero()) return std::nullopt;
  return -d / c;
}

Moebius Moebius::operator*(const Moebius& o) const {
  return raw(a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d);
}

Moebius Moebius::inverse() const {
  if (det_sign() > 0) return raw(d, -b, -c, a);
  return raw(-d, b, c, -a);
}

Moebius Moebius::pow(long k) const {
  Moebius base = k < 0 ? inverse() : *this;
  unsigned long e = k < 0 ? static_cast<unsigned long>(-k) : static_cast<unsigned long>(k);
  Moebius acc;
  while (e) {
    if (e & 1) acc = acc * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return acc;
}

bool Moebius::projective_eq(const Moebius& o) const {
  return *this == o || *this == o.negated();
}

std::string Moebius::str() const {
  std::ostringstream os;
  os << "[[" << a << "," << b << "],[" << c << "," << d << "]]";
  return os.str();
}

double tau(const Moebius& M, const Scalar& x) {
  Scalar den = M.c * x + M.d;
  if (den.is_zero()) throw std::domain_error("tau: x is the pole of M");
  return 2.0 * std::log(std::fabs(den.to_double()));
}

namespace mat {

Moebius R() { return {0, -1, 1, 0}; }
Moebius W() { return {1, 0, -1, -1}; }
Moebius U() { return {1, 0, 0, -1}; }
Moebius shift(const Scalar& lambda) { return {1, lambda, 0, 1}; }
Moebius nakada_M(int eps, long d) { return {Scalar(-d), Scalar(eps), 1, 0}; }
Moebius nakada_N(int eps, long d) { return {0, 1, Scalar(eps), Scalar(d)}; }
Scalar cks_t(int n) { return Scalar(1) + Scalar::nu(n); }
Moebius cks_A(int n) { return {1, cks_t(n), 0, 1}; }
Moebius cks_C() { return {-1, 1, -1, 0}; }

}  // namespace mat

}  // namespace mdyn
