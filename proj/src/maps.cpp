#include "mdyn/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mdyn {
namespace {

const Scalar& max_s(const Scalar& a, const Scalar& b) { return a < b ? b : a; }
const Scalar& min_s(const Scalar& a, const Scalar& b) { return a < b ? a : b; }

// Intersection of arcs with a finite closed interval; keeps positive-length parts.
std::vector<std::pair<Scalar, Scalar>> clip(const std::vector<Arc>& arcs, const Scalar& lo,
                                            const Scalar& hi) {
  std::vector<std::pair<Scalar, Scalar>> out;
  for (const auto& a : arcs) {
    Scalar l = a.lo ? max_s(*a.lo, lo) : lo;
    Scalar h = a.hi ? min_s(*a.hi, hi) : hi;
    if (l < h) out.emplace_back(std::move(l), std::move(h));
  }
  std::sort(out.begin(), out.end(), [](auto& p, auto& q) { return p.first < q.first; });
  return out;
}

std::vector<std::pair<Scalar, Scalar>> clip(const std::vector<std::pair<Scalar, Scalar>>& ivs,
                                            const std::vector<Arc>& arcs) {
  std::vector<std::pair<Scalar, Scalar>> out;
  for (const auto& [l, h] : ivs) {
    auto part = clip(arcs, l, h);
    out.insert(out.end(), part.begin(), part.end());
  }
  std::sort(out.begin(), out.end(), [](auto& p, auto& q) { return p.first < q.first; });
  return out;
}

Moebius translation_power(const Scalar& t, long k) { return Moebius(1, Scalar(k) * t, 0, 1); }

const double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::vector<Arc> preimage_arcs(const Moebius& M, const Scalar& p, const Scalar& q) {
  const Moebius Mi = M.inverse();
  ExtReal u = Mi.apply(ExtReal(p)), v = Mi.apply(ExtReal(q));
  if (M.c.is_zero()) {
    return {Arc{min_s(u.v, v.v), max_s(u.v, v.v)}};
  }
  const Scalar w = M.a / M.c;  // image of infinity
  const bool incr = M.det_sign() > 0;
  if (p < w && w < q) {
    return {Arc{std::nullopt, min_s(u.v, v.v)}, Arc{max_s(u.v, v.v), std::nullopt}};
  }
  if (w < p || q < w) return {Arc{min_s(u.v, v.v), max_s(u.v, v.v)}};
  if (w == p) {
    if (incr) return {Arc{std::nullopt, v.v}};
    return {Arc{v.v, std::nullopt}};
  }
  if (incr) return {Arc{u.v, std::nullopt}};
  return {Arc{std::nullopt, u.v}};
}

std::string Digit::label(Family f) const {
  std::ostringstream os;
  if (f == Family::nakada) {
    os << "(" << (tag[0] > 0 ? "+1" : "-1") << ":" << tag[1] << ")";
  } else {
    os << "(" << tag[0] << "," << tag[1] << ")";
    if (f == Family::cks_accel && tag.size() > 2 && tag[2] != 0) os << "U^" << tag[2];
  }
  return os.str();
}

PiecewiseMap PiecewiseMap::nakada(const Scalar& alpha) {
  if (alpha.sign() <= 0 || alpha > Scalar(1))
    throw std::invalid_argument("nakada: alpha must lie in (0, 1]");
  PiecewiseMap m;
  m.family_ = Family::nakada;
  m.alpha_ = alpha;
  m.lo_ = m.Tlo_ = alpha - Scalar(1);
  m.hi_ = m.Thi_ = alpha;
  m.t_ = 1;
  m.alpha_d_ = alpha.to_double();
  m.lo_d_ = m.Tlo_d_ = m.lo_.to_double();
  m.hi_d_ = m.Thi_d_ = m.hi_.to_double();
  m.t_d_ = 1;
  return m;
}

PiecewiseMap PiecewiseMap::cks(int n, const Scalar& alpha) {
  if (n < 3) throw std::invalid_argument("cks: n must be >= 3");
  if (alpha.sign() < 0 || alpha > Scalar(1))
    throw std::invalid_argument("cks: alpha must lie in [0, 1]");
  PiecewiseMap m;
  m.family_ = Family::cks;
  m.alpha_ = alpha;
  m.n_ = n;
  m.t_ = mat::cks_t(n);
  m.lo_ = m.Tlo_ = (alpha - Scalar(1)) * m.t_;
  m.hi_ = m.Thi_ = alpha * m.t_;
  m.A_ = mat::cks_A(n);
  m.C_ = mat::cks_C();
  m.alpha_d_ = alpha.to_double();
  m.t_d_ = m.t_.to_double();
  m.lo_d_ = m.Tlo_d_ = m.lo_.to_double();
  m.hi_d_ = m.Thi_d_ = m.hi_.to_double();
  return m;
}

PiecewiseMap PiecewiseMap::cks_accelerated(int n) {
  PiecewiseMap m = cks(n, Scalar(1));
  m.family_ = Family::cks_accel;
  const Moebius AC = m.A_ * m.C_;
  const Moebius AC2 = m.A_ * m.C_ * m.C_;
  m.U_ = AC * AC2.pow(n - 2);
  m.Uinv_ = m.U_.inverse();
  m.eps0_ = m.Uinv_.apply(Scalar(0));
  m.lo_ = 0;
  m.hi_ = m.eps0_;
  m.lo_d_ = 0;
  m.hi_d_ = m.eps0_d_ = m.eps0_.to_double();
  m.w0_ = (m.eps0_ - m.t_).inverse();
  m.ws_ = (m.Uinv_.apply(m.eps0_) - m.t_).inverse() - m.w0_;
  m.w0_d_ = 1.0 / (m.eps0_d_ - m.t_d_);
  m.s_d_ = -1.0 / m.t_d_ - m.w0_d_;
  return m;
}

std::string PiecewiseMap::name() const {
  std::ostringstream os;
  switch (family_) {
    case Family::nakada: os << "nakada(alpha=" << alpha_ << ")"; break;
    case Family::cks: os << "cks(n=" << n_ << ",alpha=" << alpha_ << ")"; break;
    case Family::cks_accel: os << "cks_accel(n=" << n_ << ")"; break;
  }
  return os.str();
}

bool PiecewiseMap::in_T(const Scalar& z, Side side) const {
  if (side == Side::left) return Tlo_ < z && z <= Thi_;
  return Tlo_ <= z && z < Thi_;
}

void PiecewiseMap::check_domain(const Scalar& x, Side side) const {
  const bool ok = (lo_ < x || (x == lo_ && side != Side::left)) &&
                  (x < hi_ || (x == hi_ && side != Side::right));
  if (!ok) throw std::domain_error(name() + ": point outside the interval: " + x.str());
}

Digit PiecewiseMap::make_digit(const std::vector<long>& tag) const {
  Digit d;
  d.tag = tag;
  switch (family_) {
    case Family::nakada:
      if (tag.size() != 2 || (tag[0] != 1 && tag[0] != -1) || tag[1] < 1)
        throw std::invalid_argument("bad Nakada digit");
      d.M = mat::nakada_M(static_cast<int>(tag[0]), tag[1]);
      break;
    case Family::cks:
    case Family::cks_accel: {
      if (tag.size() < 2 || (tag[1] != 1 && tag[1] != 2)) throw std::invalid_argument("bad digit");
      d.M = translation_power(t_, tag[0]) * C_.pow(tag[1]);
      if (family_ == Family::cks_accel) {
        if (tag.size() != 3 || tag[2] < 0) throw std::invalid_argument("bad accelerated digit");
        d.M = U_.pow(tag[2]) * d.M;
      }
      break;
    }
  }
  return d;
}

std::optional<Digit> PiecewiseMap::cks_digit(const Scalar& x, Side side) const {
  ExtReal z1 = C_.apply(ExtReal(x));
  if (z1.inf) return std::nullopt;
  long l = 1;
  Scalar z = z1.v;
  if (in_T(z1.v, side)) {
    ExtReal z2 = C_.apply(z1);
    if (z2.inf) return std::nullopt;
    if (in_T(z2.v, side)) throw std::logic_error("cks digit with l > 2");
    l = 2;
    z = z2.v;
  }
  long k;
  if (side == Side::left) {
    k = ((Thi_ - z) / t_).floor().get_si();
  } else {
    k = -((z - Tlo_) / t_).floor().get_si();
  }
  Digit d;
  d.tag = {k, l};
  d.M = translation_power(t_, k) * (l == 1 ? C_ : C_ * C_);
  return d;
}

Scalar PiecewiseMap::accel_b(long j) const { return Uinv_.pow(j).apply(eps0_); }

std::optional<Digit> PiecewiseMap::accel_digit(const Scalar& x, Side side) const {
  auto Td = cks_digit(x, side);
  if (!Td) return std::nullopt;
  const Scalar y = Td->M.apply(x);
  if (y == t_) return std::nullopt;
  long j = 0;
  const bool left = side == Side::left;
  auto below = [&](const Scalar& b) { return left ? y <= b : y < b; };
  if (!below(eps0_)) {
    // y < b_j  <=>  j > (w(y) - w0) / ws, with ws < 0
    const Scalar q = ((y - t_).inverse() - w0_) / ws_;
    mpz_class est = q.floor() + 1;
    if (left && Scalar(mpq_class(est - 1)) == q) est -= 1;
    if (est < 1) est = 1;
    if (!est.fits_slong_p()) throw std::overflow_error(name() + ": accelerated exponent overflow");
    j = est.get_si();
    // b_{j-1} <= y < b_j (or the left-limit version)
    while (j > 1 && below(accel_b(j - 1))) --j;
    while (!below(accel_b(j))) ++j;
  }
  Digit d;
  d.tag = {Td->tag[0], Td->tag[1], j};
  d.M = j == 0 ? Td->M : U_.pow(j) * Td->M;
  return d;
}

std::optional<Digit> PiecewiseMap::digit_at(const Scalar& x, Side side) const {
  check_domain(x, side);
  switch (family_) {
    case Family::nakada: {
      if (x.is_zero()) return std::nullopt;
      const int eps = x.sign();
      const Scalar v = Scalar(1) / x.abs() + Scalar(1) - alpha_;
      long d = v.floor().get_si();
      if (v == Scalar(d)) {
        if ((eps > 0 && side == Side::right) || (eps < 0 && side == Side::left)) --d;
      }
      return make_digit({eps, d});
    }
    case Family::cks: return cks_digit(x, side);
    case Family::cks_accel: return accel_digit(x, side);
  }
  return std::nullopt;
}

Scalar PiecewiseMap::step(const Scalar& x, Side side) const {
  auto d = digit_at(x, side);
  if (!d) {
    if (family_ == Family::nakada) return Scalar(0);
    throw std::domain_error(name() + ": step at a terminal point " + x.str());
  }
  return d->M.apply(x);
}

std::vector<OrbitPoint> PiecewiseMap::orbit(const Scalar& x, int steps, Side side) const {
  std::vector<OrbitPoint> pts;
  Scalar cur = x;
  for (int i = 0;; ++i) {
    auto d = digit_at(cur, side);
    pts.push_back({cur, d, i});
    if (!d || i == steps) break;
    cur = d->M.apply(cur);
    if (d->M.det_sign() < 0) side = flip(side);
  }
  return pts;
}

Scalar PiecewiseMap::derivative(const Scalar& x) const {
  auto d = digit_at(x);
  if (!d) throw std::domain_error(name() + ": derivative at a terminal point");
  const Scalar den = d->M.c * x + d->M.d;
  return d->M.det() / (den * den);
}

bool PiecewiseMap::is_full(const Scalar& a, const Scalar& b, const Moebius& M) const {
  Scalar u = M.apply(a), v = M.apply(b);
  if (v < u) std::swap(u, v);
  return u == lo_ && v == hi_;
}

std::vector<Cylinder> PiecewiseMap::cylinders(const Digit& dg) const {
  const Digit d = make_digit(dg.tag);
  std::vector<std::pair<Scalar, Scalar>> ivs;
  switch (family_) {
    case Family::nakada: {
      ivs = clip(preimage_arcs(d.M, lo_, hi_), lo_, hi_);
      std::vector<Arc> half = d.tag[0] > 0 ? std::vector<Arc>{Arc{Scalar(0), std::nullopt}}
                                           : std::vector<Arc>{Arc{std::nullopt, Scalar(0)}};
      ivs = clip(ivs, half);
      break;
    }
    case Family::cks:
    case Family::cks_accel: {
      const long k = d.tag[0], l = d.tag[1];
      if (k == 0) break;
      const Moebius Mt = translation_power(t_, k) * (l == 1 ? C_ : C_ * C_);
      ivs = clip(preimage_arcs(Mt, Tlo_, Thi_), Tlo_, Thi_);
      if (l == 2) ivs = clip(ivs, preimage_arcs(C_, Tlo_, Thi_));
      if (family_ == Family::cks_accel) {
        const long j = d.tag[2];
        Scalar vlo = j == 0 ? Scalar(0) : accel_b(j - 1);
        Scalar vhi = j == 0 ? eps0_ : accel_b(j);
        ivs = clip(ivs, preimage_arcs(Mt, vlo, vhi));
        ivs = clip(ivs, std::vector<Arc>{Arc{lo_, hi_}});
      }
      break;
    }
  }
  std::vector<Cylinder> out;
  for (auto& [a, b] : ivs) {
    Cylinder c{a, b, d, false};
    c.full = is_full(a, b, d.M);
    out.push_back(std::move(c));
  }
  return out;
}

Cylinder PiecewiseMap::cylinder(const Digit& d) const {
  auto cs = cylinders(d);
  if (cs.empty()) throw std::invalid_argument(name() + ": inadmissible digit " + d.label(family_));
  return cs.front();
}

std::optional<Cylinder> PiecewiseMap::cylinder_at(const Scalar& x, Side side) const {
  auto d = digit_at(x, side);
  if (!d) return std::nullopt;
  for (auto& c : cylinders(*d)) {
    if (c.lo <= x && x <= c.hi) {
      if (side == Side::left && x == c.lo) continue;
      if (side == Side::right && x == c.hi) continue;
      return c;
    }
  }
  throw std::logic_error(name() + ": no cylinder component contains " + x.str());
}

bool PiecewiseMap::digit_double(double x, double m[4]) const {
  if (family_ == Family::nakada) {
    if (x == 0) return false;
    const double eps = x > 0 ? 1.0 : -1.0;
    const double d = std::floor(std::fabs(1.0 / x) + 1.0 - alpha_d_);
    m[0] = -d;
    m[1] = eps;
    m[2] = 1;
    m[3] = 0;
    return true;
  }
  if (x == 0) return false;
  const double z1 = 1.0 - 1.0 / x;
  double z;
  int l;
  if (!(Tlo_d_ <= z1 && z1 < Thi_d_)) {
    z = z1;
    l = 1;
  } else {
    if (x == 1) return false;
    z = 1.0 / (1.0 - x);
    l = 2;
  }
  const double kt = -std::floor((z - Tlo_d_) / t_d_) * t_d_;
  if (l == 1) {
    m[0] = -1 - kt;
    m[1] = 1;
    m[2] = -1;
    m[3] = 0;
  } else {
    m[0] = kt;
    m[1] = -1 - kt;
    m[2] = 1;
    m[3] = -1;
  }
  return true;
}

double PiecewiseMap::step_double(double x) const {
  double m[4];
  if (!digit_double(x, m)) return kNaN;
  const double y = (m[0] * x + m[1]) / (m[2] * x + m[3]);
  if (family_ != Family::cks_accel || y < eps0_d_) return y;
  if (!(y < t_d_)) return kNaN;
  const double w = 1.0 / (y - t_d_);
  const double j = std::floor((w0_d_ - w) / s_d_) + 1.0;
  return t_d_ + 1.0 / (w + j * s_d_);
}

double PiecewiseMap::log_derivative_double(double x) const {
  double m[4];
  if (!digit_double(x, m)) return kNaN;
  const double den = m[2] * x + m[3];
  double r = -2.0 * std::log(std::fabs(den));
  if (family_ != Family::cks_accel) return r;
  const double y = (m[0] * x + m[1]) / den;
  if (y < eps0_d_) return r;
  const double w = 1.0 / (y - t_d_);
  const double j = std::floor((w0_d_ - w) / s_d_) + 1.0;
  return r + 2.0 * std::log(std::fabs(w)) - 2.0 * std::log(std::fabs(w + j * s_d_));
}

SplitResult split_by_cylinders(const PiecewiseMap& T, const Scalar& a, const Scalar& b,
                               double w_min) {
  SplitResult res;
  std::vector<std::pair<Scalar, Scalar>> stack;
  if (a < b) stack.emplace_back(a, b);
  auto push_gap = [&](Scalar l, Scalar h) {
    if (!(l < h)) return;
    const double w = (h - l).to_double();
    if (w < w_min) {
      // slivers left over by bisection are covered by at most two cylinders
      auto cl = T.cylinder_at(l, Side::right), ch = T.cylinder_at(h, Side::left);
      if (cl && ch && h <= cl->hi) {
        res.pieces.push_back({l, h, cl->digit, cl->full});
        return;
      }
      if (cl && ch && cl->hi == ch->lo) {
        res.pieces.push_back({l, cl->hi, cl->digit, cl->full});
        res.pieces.push_back({ch->lo, h, ch->digit, ch->full});
        return;
      }
      res.tail_width += w;
      res.tails.emplace_back(std::move(l), std::move(h));
    } else {
      stack.emplace_back(std::move(l), std::move(h));
    }
  };
  while (!stack.empty()) {
    auto [l, h] = std::move(stack.back());
    stack.pop_back();
    Scalar m = Scalar::from_double(0.5 * (l.to_double() + h.to_double()));
    if (!(l < m && m < h)) m = (l + h) / Scalar(2);
    auto cyl = T.cylinder_at(m);
    if (!cyl) {
      push_gap(l, m);
      push_gap(m, h);
      continue;
    }
    Scalar c0 = max_s(cyl->lo, l), c1 = min_s(cyl->hi, h);
    push_gap(l, c0);
    push_gap(c1, h);
    res.pieces.push_back({c0, c1, cyl->digit, cyl->full});
  }
  // Pieces narrower than w_min next to a tail belong to it: bisection leaves
  // isolated tiny cylinders inside an accumulating family.
  struct Seg {
    SplitPiece p;
    bool tail;
  };
  std::vector<Seg> segs;
  for (auto& pc : res.pieces) segs.push_back({std::move(pc), false});
  for (auto& [l, h] : res.tails) segs.push_back({SplitPiece{l, h, {}, false}, true});
  std::sort(segs.begin(), segs.end(), [](const Seg& p, const Seg& q) { return p.p.lo < q.p.lo; });
  auto small = [&](const Seg& s) { return (s.p.hi - s.p.lo).to_double() < w_min; };
  for (std::size_t i = 1; i < segs.size(); ++i)
    if (segs[i - 1].tail && !segs[i].tail && small(segs[i])) segs[i].tail = true;
  for (std::size_t i = segs.size(); i-- > 1;)
    if (segs[i].tail && !segs[i - 1].tail && small(segs[i - 1])) segs[i - 1].tail = true;
  res.pieces.clear();
  res.tails.clear();
  res.tail_width = 0;
  for (auto& s : segs) {
    if (!s.tail) {
      res.pieces.push_back(std::move(s.p));
      continue;
    }
    res.tail_width += (s.p.hi - s.p.lo).to_double();
    if (!res.tails.empty() && res.tails.back().second == s.p.lo) {
      res.tails.back().second = s.p.hi;
    } else {
      res.tails.emplace_back(s.p.lo, s.p.hi);
    }
  }
  return res;
}

bool cks_only_l_one(int n, const Scalar& alpha) {
  const Scalar t = mat::cks_t(n);
  const Scalar lo = (alpha - Scalar(1)) * t, hi = alpha * t;
  return clip(preimage_arcs(mat::cks_C(), lo, hi), lo, hi).empty();
}

}  // namespace mdyn
