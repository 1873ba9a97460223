#include "mdyn/domains.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace mdyn {
namespace {

using DInterval = std::pair<double, double>;
using DSet = std::vector<DInterval>;

DSet merge(DSet v, double eta) {
  std::sort(v.begin(), v.end());
  DSet out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.first <= out.back().second + eta)
      out.back().second = std::max(out.back().second, iv.second);
    else
      out.push_back(iv);
  }
  return out;
}

double dset_mass(double x0, double x1, const DSet& s) {
  double m = 0;
  for (const auto& [c, d] : s) m += mu_box(x0, x1, c, d);
  return m;
}

struct Mob {
  double a, b, c, d;
  double operator()(double y) const { return (a * y + b) / (c * y + d); }
};

Mob y_action(const Moebius& M) {
  const Moebius N = M.conjugate_by_R();
  return {N.a.to_double(), N.b.to_double(), N.c.to_double(), N.d.to_double()};
}

// A cylinder piece of a partition cell and the partition cells it covers.
struct MarkovPiece {
  size_t src;
  size_t t0, t1;  // target cells [t0, t1)
  Mob n;
};

std::vector<MarkovPiece> markov_pieces(const PiecewiseMap& T, const std::vector<Scalar>& P,
                                       double w_min) {
  std::vector<MarkovPiece> out;
  for (size_t i = 0; i + 1 < P.size(); ++i) {
    auto split = split_by_cylinders(T, P[i], P[i + 1], w_min);
    for (const auto& pc : split.pieces) {
      Scalar u = pc.digit.M.apply(pc.lo), v = pc.digit.M.apply(pc.hi);
      if (v < u) std::swap(u, v);
      auto lo_it = std::lower_bound(P.begin(), P.end(), u);
      auto hi_it = std::lower_bound(P.begin(), P.end(), v);
      if (lo_it == P.end() || !(*lo_it == u) || hi_it == P.end() || !(*hi_it == v))
        throw std::runtime_error("partition is not Markov: piece [" + pc.lo.str() + ", " +
                                 pc.hi.str() + "] maps onto [" + u.str() + ", " + v.str() + "]");
      out.push_back({i, static_cast<size_t>(lo_it - P.begin()),
                     static_cast<size_t>(hi_it - P.begin()), y_action(pc.digit.M)});
    }
  }
  return out;
}

Region to_region(const std::vector<Scalar>& xs, const std::vector<DSet>& fib) {
  std::vector<Cell> cells;
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    YSet ys;
    for (const auto& [c, d] : fib[i])
      if (c < d) ys.push_back({Scalar::from_double(c), Scalar::from_double(d)});
    if (!ys.empty()) cells.push_back({xs[i], xs[i + 1], std::move(ys), false});
  }
  return Region(std::move(cells));
}

// sup over a in A of dist(a, B), A and B merged interval lists.
double directed_hausdorff(const DSet& A, const DSet& B) {
  if (A.empty()) return 0;
  if (B.empty()) return std::numeric_limits<double>::infinity();
  auto dist = [&](double p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [c, d] : B) best = std::min(best, p < c ? c - p : (p > d ? p - d : 0.0));
    return best;
  };
  double h = 0;
  for (const auto& [c, d] : A) {
    h = std::max({h, dist(c), dist(d)});
    for (size_t k = 0; k + 1 < B.size(); ++k) {
      const double m = 0.5 * (B[k].second + B[k + 1].first);
      if (c <= m && m <= d) h = std::max(h, dist(m));
    }
  }
  return h;
}

double hausdorff(const DSet& A, const DSet& B) {
  return std::max(directed_hausdorff(A, B), directed_hausdorff(B, A));
}

// Cylinder pieces narrower than this are dropped by the fixed-point builders;
// for the families here they map into the strip the seed already covers.
constexpr double kPieceWidth = 1e-7;

}  // namespace

std::vector<Scalar> endpoint_partition(const PiecewiseMap& T, int horizon) {
  std::vector<Scalar> pts{T.lo(), T.hi()};
  if (T.family() != Family::cks_accel && T.lo().sign() < 0 && T.hi().sign() > 0)
    pts.push_back(Scalar(0));
  for (auto [x, side] : {std::pair{T.lo(), Side::right}, std::pair{T.hi(), Side::left}}) {
    auto orb = T.orbit(x, horizon, side);
    std::set<std::string> seen;
    bool closed = false;
    for (const auto& p : orb) {
      if (!seen.insert(p.value.str()).second) {
        closed = true;
        break;
      }
      pts.push_back(p.value);
      if (!p.digit) {
        closed = true;
        break;
      }
    }
    if (!closed) throw std::runtime_error("endpoint orbit not finite within horizon");
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

long nakada_alpha_digit(const Scalar& alpha) {
  auto T = PiecewiseMap::nakada(alpha);
  auto d = T.digit_at(alpha, Side::left);
  if (!d) throw std::logic_error("alpha has no digit");
  return d->tag[1];
}

DomainResult nakada_lambda(const Scalar& alpha, int depth) {
  if (!(alpha.sign() > 0 && alpha < Scalar(1)) && !(alpha == Scalar(1)))
    throw std::invalid_argument("nakada_lambda: alpha must lie in (0, 1]");
  const auto T = PiecewiseMap::nakada(alpha);
  const auto P = endpoint_partition(T);
  const double b = 1.0 / static_cast<double>(nakada_alpha_digit(alpha) + 1);
  const auto pieces = markov_pieces(T, P, kPieceWidth);
  const size_t nc = P.size() - 1;
  std::vector<double> xd(P.size());
  for (size_t i = 0; i < P.size(); ++i) xd[i] = P[i].to_double();

  std::vector<DSet> fib(nc, DSet{{0.0, 1.0}});
  auto total = [&](const std::vector<DSet>& f) {
    double m = 0;
    for (size_t i = 0; i < nc; ++i) m += dset_mass(xd[i], xd[i + 1], f[i]);
    return m;
  };
  DomainResult res;
  double mass = total(fib);
  for (int it = 1; it <= depth; ++it) {
    std::map<std::pair<size_t, size_t>, DSet> buckets;
    for (const auto& pc : pieces) {
      auto& bk = buckets[{pc.t0, pc.t1}];
      for (const auto& [c, d] : fib[pc.src]) {
        double u = pc.n(c), v = pc.n(d);
        bk.emplace_back(std::min(u, v), std::max(u, v));
      }
    }
    std::vector<DSet> next(nc, DSet{{0.0, b}});
    for (auto& [rng, ivs] : buckets) {
      DSet m = merge(std::move(ivs), 0.0);
      for (size_t e = rng.first; e < rng.second; ++e) next[e].insert(next[e].end(), m.begin(), m.end());
    }
    for (auto& f : next) f = merge(std::move(f), 0.0);
    const double nm = total(next);
    res.depth = it;
    res.unresolved = std::max(0.0, mass - nm);
    const bool same = next == fib;
    fib = std::move(next);
    mass = nm;
    if (same) {
      res.converged = true;
      break;
    }
  }
  res.region = to_region(P, fib);
  return res;
}

Region cks_omega_one(int n) {
  const auto T = PiecewiseMap::cks(n, Scalar(1));
  const Scalar t = mat::cks_t(n);
  auto orb = T.orbit(t, n - 2, Side::left);
  if (static_cast<int>(orb.size()) != n - 1 || !(orb.back().value == Scalar(1)))
    throw std::logic_error("cks_omega_one: unexpected orbit of t");
  std::vector<Cell> cells{{Scalar(0), Scalar(1), {{Scalar(-1), Scalar(0)}}, true}};
  for (int i = 1; i <= n - 2; ++i) {
    const Scalar& ri = orb[i].value;
    const Scalar& rp = orb[i - 1].value;
    cells.push_back({ri, rp, {{Scalar(-1) / rp, Scalar(0)}}, true});
  }
  return Region(std::move(cells));
}

Region accelerated_gamma(int n) {
  const Region omega = cks_omega_one(n);
  const auto g = PiecewiseMap::cks_accelerated(n);
  const Scalar t = g.t();
  const Cell D{g.eps0(), t, {{Scalar(-1) / t, Scalar(0)}}, true};
  const Moebius AC2 = mat::cks_A(n) * mat::cks_C() * mat::cks_C();
  std::vector<Cell> removed;
  Moebius P;
  for (int i = 0; i <= n - 2; ++i) {
    removed.push_back(cell_image(P, D));
    P = AC2 * P;
  }
  return omega.subtract(Region(std::move(removed)));
}

DomainResult hull_domain(const PiecewiseMap& T, int max_iters) {
  const auto P = endpoint_partition(T);
  const auto pieces = markov_pieces(T, P, kPieceWidth);
  const size_t nc = P.size() - 1;
  std::vector<double> xd(P.size());
  for (size_t i = 0; i < P.size(); ++i) xd[i] = P[i].to_double();
  std::vector<DInterval> fib(nc, {0.0, 0.0});
  auto total = [&](const std::vector<DInterval>& f) {
    double m = 0;
    for (size_t i = 0; i < nc; ++i) m += mu_box(xd[i], xd[i + 1], f[i].first, f[i].second);
    return m;
  };
  DomainResult res;
  double mass = 0;
  for (int it = 1; it <= max_iters; ++it) {
    std::vector<DInterval> next(nc, {0.0, 0.0});
    for (const auto& pc : pieces) {
      const double u = pc.n(fib[pc.src].first), v = pc.n(fib[pc.src].second);
      const double lo = std::min(u, v), hi = std::max(u, v);
      for (size_t e = pc.t0; e < pc.t1; ++e) {
        next[e].first = std::min(next[e].first, lo);
        next[e].second = std::max(next[e].second, hi);
      }
    }
    double disp = 0;
    for (size_t i = 0; i < nc; ++i)
      disp = std::max({disp, std::abs(next[i].first - fib[i].first),
                       std::abs(next[i].second - fib[i].second)});
    fib = std::move(next);
    const double nm = total(fib);
    res.depth = it;
    res.unresolved = std::abs(nm - mass);
    mass = nm;
    if (disp == 0) {
      res.converged = true;
      break;
    }
  }
  std::vector<DSet> fs;
  for (const auto& f : fib) fs.push_back({f});
  res.region = to_region(P, fs);
  return res;
}

FixedPointResult fixed_point_domain(const PiecewiseMap& T, int iters, double resolution) {
  if (!(resolution > 0)) throw std::invalid_argument("resolution must be positive");
  const double lo = T.lo_double(), hi = T.hi_double();
  const size_t G = static_cast<size_t>(std::ceil((hi - lo) / resolution));
  const Scalar Lo = T.lo(), H = T.hi(), step = (H - Lo) / Scalar(static_cast<long>(G));
  std::vector<Scalar> xs;
  std::vector<double> xd;
  for (size_t i = 0; i <= G; ++i) {
    xs.push_back(i == G ? H : Lo + step * Scalar(static_cast<long>(i)));
    xd.push_back(xs.back().to_double());
  }
  const double h = (hi - lo) / static_cast<double>(G);

  // grid-cell pieces: source cell, y-action, target range by midpoint rule
  std::vector<MarkovPiece> pieces;
  auto split = split_by_cylinders(T, Lo, H, std::min(kPieceWidth * 10, resolution / 100));
  for (const auto& pc : split.pieces) {
    const double p0 = pc.lo.to_double(), p1 = pc.hi.to_double();
    const Mob m = y_action(pc.digit.M);
    const Moebius& M = pc.digit.M;
    const Mob xm{M.a.to_double(), M.b.to_double(), M.c.to_double(), M.d.to_double()};
    size_t g0 = static_cast<size_t>(std::max(0.0, std::floor((p0 - lo) / h)));
    for (size_t g = std::min(g0, G - 1); g < G && xd[g] < p1; ++g) {
      const double s0 = std::max(p0, xd[g]), s1 = std::min(p1, xd[g + 1]);
      if (!(s0 < s1)) continue;
      double i0 = xm(s0), i1 = xm(s1);
      if (i1 < i0) std::swap(i0, i1);
      const double e0 = std::ceil((i0 - lo) / h - 0.5), e1 = std::floor((i1 - lo) / h - 0.5);
      if (e1 < e0) continue;
      pieces.push_back({g, static_cast<size_t>(std::max(0.0, e0)),
                        std::min(G, static_cast<size_t>(e1) + 1), m});
    }
  }

  std::vector<DSet> fib(G, DSet{{0.0, 0.0}});
  FixedPointResult res;
  for (int it = 1; it <= iters; ++it) {
    std::map<std::pair<size_t, size_t>, DSet> buckets;
    for (const auto& pc : pieces) {
      auto& bk = buckets[{pc.t0, pc.t1}];
      for (const auto& [c, d] : fib[pc.src]) {
        const double u = pc.n(c), v = pc.n(d);
        bk.emplace_back(std::min(u, v), std::max(u, v));
      }
    }
    std::vector<DSet> next(G, DSet{{0.0, 0.0}});
    for (auto& [rng, ivs] : buckets) {
      DSet m = merge(std::move(ivs), resolution);
      for (size_t e = rng.first; e < rng.second; ++e) next[e].insert(next[e].end(), m.begin(), m.end());
    }
    for (auto& f : next) f = merge(std::move(f), resolution);
    double disp = 0;
    for (size_t i = 0; i < G; ++i) disp = std::max(disp, hausdorff(fib[i], next[i]));
    fib = std::move(next);
    res.iterations = it;
    res.displacement = disp;
    if (disp == 0) break;
  }
  res.region = to_region(xs, fib);
  return res;
}

}  // namespace mdyn
