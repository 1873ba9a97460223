#include "mdyn/scalar.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mdyn {
namespace {

using ZPoly = std::vector<mpz_class>;

void trim(ZPoly& p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
}

// Exact division of integer polynomials with monic divisor.
ZPoly exact_div(ZPoly num, const ZPoly& den) {
  const size_t dn = den.size() - 1;
  ZPoly quo(num.size() - dn, 0);
  for (size_t i = num.size(); i-- > dn;) {
    mpz_class c = num[i];
    quo[i - dn] = c;
    if (c != 0)
      for (size_t j = 0; j <= dn; ++j) num[i - dn + j] -= c * den[j];
  }
  return quo;
}

ZPoly cyclotomic(int m, std::map<int, ZPoly>& memo) {
  if (auto it = memo.find(m); it != memo.end()) return it->second;
  ZPoly p(m + 1, 0);
  p[0] = -1;
  p[m] = 1;
  for (int d = 1; d < m; ++d)
    if (m % d == 0) p = exact_div(p, cyclotomic(d, memo));
  trim(p);
  memo[m] = p;
  return p;
}

struct FieldData {
  Poly minpoly;
  int degree = 0;
  mpq_class lo, hi;  // isolating interval for nu_n
  int bits = 0;      // -log2 of current width
};

std::mutex g_field_mutex;
std::map<int, FieldData>& field_table() {
  static std::map<int, FieldData> table;
  return table;
}

mpq_class eval_exact(const Poly& p, const mpq_class& x) {
  mpq_class acc = 0;
  for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

FieldData& field_locked(int n) {
  auto& tab = field_table();
  auto it = tab.find(n);
  if (it != tab.end()) return it->second;
  if (n < 3) throw std::invalid_argument("field index n must be >= 3");

  std::map<int, ZPoly> memo;
  ZPoly phi = cyclotomic(2 * n, memo);
  const int m = static_cast<int>(phi.size() - 1) / 2;
  // Phi(z)/z^m = a_m + sum_k a_{m+k} (z^k + z^-k), and z^k + z^-k = D_k(z + 1/z).
  std::vector<ZPoly> D(m + 1);
  D[0] = ZPoly{2};
  if (m >= 1) D[1] = ZPoly{0, 1};
  for (int k = 2; k <= m; ++k) {
    ZPoly next(k + 1, 0);
    for (size_t i = 0; i < D[k - 1].size(); ++i) next[i + 1] += D[k - 1][i];
    for (size_t i = 0; i < D[k - 2].size(); ++i) next[i] -= D[k - 2][i];
    D[k] = next;
  }
  ZPoly P(m + 1, 0);
  P[0] = phi[m];
  for (int k = 1; k <= m; ++k)
    for (size_t i = 0; i < D[k].size(); ++i) P[i] += phi[m + k] * D[k][i];

  FieldData fd;
  fd.degree = m;
  for (auto& c : P) fd.minpoly.emplace_back(c);

  const double nu = 2.0 * std::cos(std::numbers::pi / n);
  fd.lo = mpq_class(std::ldexp(std::floor(std::ldexp(nu, 40)) - 1.0, -40));
  fd.hi = mpq_class(std::ldexp(std::floor(std::ldexp(nu, 40)) + 2.0, -40));
  fd.lo.canonicalize();
  fd.hi.canonicalize();
  if (sgn(eval_exact(fd.minpoly, fd.lo)) * sgn(eval_exact(fd.minpoly, fd.hi)) >= 0)
    throw std::runtime_error("failed to isolate 2cos(pi/n)");
  fd.bits = 38;
  return tab.emplace(n, std::move(fd)).first->second;
}

const FieldData& field_data(int n) {
  std::lock_guard<std::mutex> lock(g_field_mutex);
  return field_locked(n);
}

int degree_of(int n) { return field_data(n).degree; }

// Interval Horner evaluation for a polynomial at a positive interval [L, H].
std::pair<mpq_class, mpq_class> eval_interval(const Poly& c, const mpq_class& L,
                                              const mpq_class& H) {
  mpq_class a = 0, b = 0;
  for (size_t i = c.size(); i-- > 0;) {
    mpq_class a1 = a * L, a2 = a * H, b1 = b * L, b2 = b * H;
    a = (a1 < a2 ? a1 : a2) + c[i];
    b = (b1 > b2 ? b1 : b2) + c[i];
  }
  return {a, b};
}

Poly reduce(Poly r, const Poly& P) {
  const size_t deg = P.size() - 1;
  for (size_t i = r.size(); i-- > deg;) {
    if (r[i] == 0) continue;
    mpq_class c = r[i];
    for (size_t j = 0; j <= deg; ++j) r[i - deg + j] -= c * P[j];
  }
  r.resize(deg, 0);
  return r;
}

void ptrim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

std::pair<Poly, Poly> pdivmod(Poly a, const Poly& b) {
  Poly q;
  ptrim(a);
  if (a.size() < b.size()) return {Poly{0}, a};
  q.assign(a.size() - b.size() + 1, 0);
  const mpq_class lead = b.back();
  const size_t db = b.size() - 1;
  for (size_t i = a.size(); i-- > db;) {
    mpq_class c = a[i] / lead;
    q[i - db] = c;
    if (c != 0)
      for (size_t j = 0; j <= db; ++j) a[i - db + j] -= c * b[j];
  }
  a.resize(b.size() - 1);
  ptrim(a);
  return {q, a};
}

Poly psub(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  ptrim(r);
  return r;
}

Poly pmul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

Poly as_coeffs(const Scalar& s, int n) {
  Poly v = s.coefficients();
  v.resize(degree_of(n), 0);
  return v;
}

}  // namespace

Poly minimal_polynomial(int n) { return field_data(n).minpoly; }

std::pair<mpq_class, mpq_class> nu_enclosure(int n, int bits) {
  std::lock_guard<std::mutex> lock(g_field_mutex);
  FieldData& fd = field_locked(n);
  const int slo = sgn(eval_exact(fd.minpoly, fd.lo));
  while (fd.bits < bits) {
    mpq_class mid = (fd.lo + fd.hi) / 2;
    int s = sgn(eval_exact(fd.minpoly, mid));
    if (s == 0) throw std::logic_error("rational root of an irreducible polynomial");
    (s == slo ? fd.lo : fd.hi) = mid;
    ++fd.bits;
  }
  return {fd.lo, fd.hi};
}

Scalar::Scalar(long p, long q) : q_(p, q) {
  if (q == 0) throw std::domain_error("zero denominator");
  q_.canonicalize();
}

Scalar Scalar::parse(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty scalar string");
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    mpz_class num(digits, 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, s.size() - dot - 1);
    return Scalar(mpq_class(num, den));
  }
  mpq_class q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
  if (q.get_den() == 0) throw std::domain_error("zero denominator");
  q.canonicalize();
  return Scalar(q);
}

Scalar Scalar::nu(int n) {
  Poly c(degree_of(n), 0);
  if (c.size() == 1) {
    c[0] = -minimal_polynomial(n)[0];  // degree one: nu = -constant term
  } else {
    c[1] = 1;
  }
  return field(n, c);
}

Scalar Scalar::field(int n, Poly coeffs) {
  Scalar s;
  const Poly& P = field_data(n).minpoly;
  s.n_ = n;
  s.c_ = reduce(std::move(coeffs), P);
  s.normalize();
  return s;
}

Scalar Scalar::from_double(double v) {
  if (!std::isfinite(v)) throw std::domain_error("non-finite double");
  return Scalar(mpq_class(v));
}

Poly Scalar::coefficients() const { return n_ == 0 ? Poly{q_} : c_; }

void Scalar::normalize() {
  if (n_ == 0) return;
  for (size_t i = 1; i < c_.size(); ++i)
    if (c_[i] != 0) return;
  q_ = c_.empty() ? mpq_class(0) : c_[0];
  c_.clear();
  n_ = 0;
}

int Scalar::common_field(const Scalar& a, const Scalar& b) {
  if (a.n_ == 0) return b.n_;
  if (b.n_ == 0 || a.n_ == b.n_) return a.n_;
  throw std::domain_error("cannot mix scalars from different number fields");
}

Scalar Scalar::operator-() const {
  Scalar r = *this;
  r.q_ = -r.q_;
  for (auto& c : r.c_) c = -c;
  return r;
}

Scalar& Scalar::operator+=(const Scalar& o) {
  const int n = common_field(*this, o);
  if (n == 0) {
    q_ += o.q_;
    return *this;
  }
  Poly a = as_coeffs(*this, n), b = as_coeffs(o, n);
  for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  n_ = n;
  c_ = std::move(a);
  normalize();
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) { return *this += -o; }

Scalar& Scalar::operator*=(const Scalar& o) {
  const int n = common_field(*this, o);
  if (n == 0) {
    q_ *= o.q_;
    return *this;
  }
  if (o.n_ == 0 || n_ == 0) {
    const mpq_class& f = o.n_ == 0 ? o.q_ : q_;
    Poly a = n_ == 0 ? o.c_ : c_;
    for (auto& c : a) c *= f;
    n_ = n;
    c_ = std::move(a);
    normalize();
    return *this;
  }
  c_ = reduce(pmul(c_, o.c_), field_data(n).minpoly);
  normalize();
  return *this;
}

Scalar Scalar::inverse() const {
  if (n_ == 0) {
    if (sgn(q_) == 0) throw std::domain_error("division by zero");
    return Scalar(mpq_class(1) / q_);
  }
  const Poly& P = field_data(n_).minpoly;
  Poly r0 = P, r1 = c_, s0{0}, s1{1};
  ptrim(r1);
  while (r1.size() > 1) {
    auto [q, rem] = pdivmod(r0, r1);
    r0 = std::move(r1);
    r1 = std::move(rem);
    Poly ns = psub(s0, pmul(q, s1));
    s0 = std::move(s1);
    s1 = std::move(ns);
  }
  if (r1.empty() || r1[0] == 0) throw std::domain_error("division by zero");
  for (auto& c : s1) c /= r1[0];
  return field(n_, s1);
}

Scalar& Scalar::operator/=(const Scalar& o) {
  if (o.n_ == 0) {
    if (sgn(o.q_) == 0) throw std::domain_error("division by zero");
    if (n_ == 0) {
      q_ /= o.q_;
    } else {
      for (auto& c : c_) c /= o.q_;
    }
    return *this;
  }
  return *this *= o.inverse();
}

bool operator==(const Scalar& a, const Scalar& b) {
  if (a.n_ == 0 && b.n_ == 0) return a.q_ == b.q_;
  if (a.n_ == 0 || b.n_ == 0) return false;
  Scalar::common_field(a, b);
  return a.c_ == b.c_;
}

std::strong_ordering operator<=>(const Scalar& a, const Scalar& b) {
  int s;
  if (a.n_ == 0 && b.n_ == 0) {
    s = cmp(a.q_, b.q_);
  } else {
    s = (a - b).sign();
  }
  return s < 0 ? std::strong_ordering::less
               : (s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

int Scalar::sign() const {
  if (n_ == 0) return sgn(q_);
  // Fast path: double evaluation with a rounding bound.
  const double nu = 2.0 * std::cos(std::numbers::pi / n_);
  double sum = 0, mag = 0, p = 1;
  bool finite = true;
  for (const auto& c : c_) {
    const double cd = c.get_d();
    if (!std::isfinite(cd) || (cd == 0 && c != 0)) {
      finite = false;
      break;
    }
    sum += cd * p;
    mag += std::fabs(cd * p);
    p *= nu;
  }
  if (finite) {
    const double bound = mag * (4.0 * c_.size() + 8.0) * 0x1p-52;
    if (std::fabs(sum) > 2 * bound) return sum > 0 ? 1 : -1;
  }
  for (int bits = 64;; bits *= 2) {
    auto [lo, hi] = enclosure(bits);
    if (sgn(lo) > 0) return 1;
    if (sgn(hi) < 0) return -1;
  }
}

std::pair<mpq_class, mpq_class> Scalar::enclosure(int bits) const {
  if (n_ == 0) return {q_, q_};
  mpq_class target(1);
  target /= mpq_class(mpz_class(1) << bits);
  for (int nb = bits + 16;; nb += 32) {
    auto [L, H] = nu_enclosure(n_, nb);
    auto [a, b] = eval_interval(c_, L, H);
    if (b - a <= target) return {a, b};
  }
}

double Scalar::to_double() const {
  if (n_ == 0) return q_.get_d();
  const double nu = 2.0 * std::cos(std::numbers::pi / n_);
  long double sum = 0, mag = 0, p = 1;
  bool finite = true;
  for (const auto& c : c_) {
    const double cd = c.get_d();
    if (!std::isfinite(cd)) {
      finite = false;
      break;
    }
    sum += cd * p;
    mag += std::fabs(cd * p);
    p *= nu;
  }
  if (finite && std::fabs(sum) > 1e6L * mag * 0x1p-52L) return static_cast<double>(sum);
  for (int bits = 64;; bits *= 2) {
    auto [lo, hi] = enclosure(bits);
    mpq_class w = hi - lo;
    mpq_class m = (lo + hi) / 2;
    const mpq_class am = sgn(m) < 0 ? mpq_class(-m) : m;
    if (sgn(m) != 0 && w * mpq_class(mpz_class(1) << 54) <= am) return m.get_d();
    if (bits > 4096) return m.get_d();
  }
}

mpz_class Scalar::floor() const {
  if (n_ == 0) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q_.get_num_mpz_t(), q_.get_den_mpz_t());
    return r;
  }
  const double d = to_double();
  if (std::isfinite(d) && std::fabs(d) < 1e15) {
    mpz_class k(std::floor(d));
    while ((*this - Scalar(mpq_class(k))).sign() < 0) --k;
    while ((*this - Scalar(mpq_class(k + 1))).sign() >= 0) ++k;
    return k;
  }
  for (int bits = 64;; bits *= 2) {
    auto [lo, hi] = enclosure(bits);
    mpz_class a, b;
    mpz_fdiv_q(a.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
    mpz_fdiv_q(b.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
    if (a == b) return a;
  }
}

std::string Scalar::str() const {
  if (n_ == 0) return q_.get_str();
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    if (!first) os << (sgn(c_[i]) > 0 ? "+" : "");
    os << c_[i].get_str();
    if (i >= 1) os << "*nu" << n_;
    if (i >= 2) os << "^" << i;
    first = false;
  }
  return os.str();
}

double ExtReal::to_double() const {
  return inf ? std::numeric_limits<double>::infinity() : v.to_double();
}

}  // namespace mdyn
