#include "mdyn/bijectivity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

namespace mdyn {
namespace {

double strip_mass(const Scalar& a, const Scalar& b, const YSet& F) {
  const Scalar& lo = a < b ? a : b;
  const Scalar& hi = a < b ? b : a;
  double m = 0;
  for (const auto& iv : F) m += mu_box(lo, hi, iv.lo, iv.hi);
  return m;
}

ExtReal fixed_point(const Moebius& P) {
  if (!P.c.is_zero()) return ExtReal((P.a - P.d) / (Scalar(2) * P.c));
  return ExtReal::infinity();
}

bool is_parabolic(const Moebius& P) {
  if (P.det_sign() <= 0 || P.projective_eq(Moebius::identity())) return false;
  const Scalar tr = P.a + P.d;
  return tr * tr == Scalar(4);
}

// Parabolic family of cylinders P^k D, k >= 0, starting at `start` and
// accumulating at p.  `partial` is a first cylinder cut by the tail end.
struct TailFamily {
  Scalar start;
  Scalar p;
  int dir = 1;
  Moebius D, P;
  YSet F;
  bool exact = true;
  std::optional<Cell> partial;
};

std::optional<TailFamily> walk(const PiecewiseMap& T, const Scalar& x0, int dir, const Scalar& limit,
                           const Cell& cell) {
  const Side side = dir > 0 ? Side::right : Side::left;
  TailFamily f;
  f.dir = dir;
  f.F = cell.ys;
  f.exact = cell.exact;
  auto c1 = T.cylinder_at(x0, side);
  if (!c1) return std::nullopt;
  Scalar start = x0;
  const Scalar& near_end = dir > 0 ? c1->lo : c1->hi;
  if (!(near_end == x0)) {
    const Scalar& far_end = dir > 0 ? c1->hi : c1->lo;
    const bool inside = dir > 0 ? far_end < limit : limit < far_end;
    if (!inside) return std::nullopt;
    Cell piece{dir > 0 ? x0 : far_end, dir > 0 ? far_end : x0, cell.ys, cell.exact};
    f.partial = cell_image(c1->digit.M, piece);
    start = far_end;
    c1 = T.cylinder_at(start, side);
    if (!c1) return std::nullopt;
  }
  auto next = [&](const Cylinder& c) { return dir > 0 ? c.hi : c.lo; };
  auto c2 = T.cylinder_at(next(*c1), side);
  if (!c2) return std::nullopt;
  auto c3 = T.cylinder_at(next(*c2), side);
  if (!c3) return std::nullopt;
  if (!c1->full || !c2->full || !c3->full) return std::nullopt;
  const Moebius P = c2->digit.M * c1->digit.M.inverse();
  if (!is_parabolic(P) || !(P * c2->digit.M).projective_eq(c3->digit.M)) return std::nullopt;
  const ExtReal fx = fixed_point(P);
  const ExtReal p = c1->digit.M.inverse().apply(fx);
  if (p.inf) return std::nullopt;
  const bool ok = dir > 0 ? (start < p.v && p.v <= limit) : (limit <= p.v && p.v < start);
  if (!ok) return std::nullopt;
  f.start = start;
  f.p = p.v;
  f.D = c1->digit.M;
  f.P = P;
  return f;
}

// Explicit images of the first `count` members; returns the boundary reached.
Scalar image_members(const PiecewiseMap& T, const TailFamily& f, int count, std::vector<Cell>& out) {
  const Side side = f.dir > 0 ? Side::right : Side::left;
  Scalar cur = f.start;
  for (int k = 0; k < count; ++k) {
    auto c = T.cylinder_at(cur, side);
    if (!c) break;
    Cell piece{c->lo, c->hi, f.F, f.exact};
    out.push_back(cell_image(c->digit.M, piece));
    cur = f.dir > 0 ? c->hi : c->lo;
  }
  return cur;
}

// Chart u = 1 / (y - y*) turning the y-action of P into u -> u + s.
struct Chart {
  Scalar ystar, s;
  std::string key() const { return ystar.str() + "|" + s.str(); }
};

std::optional<Chart> chart_for(const Moebius& P) {
  const Moebius Q = P.conjugate_by_R();
  const ExtReal fy = fixed_point(Q);
  if (fy.inf) return std::nullopt;
  const ExtReal q = Q.apply(ExtReal(fy.v + Scalar(1)));
  if (q.inf || q.v == fy.v) return std::nullopt;
  return Chart{fy.v, (q.v - fy.v).inverse() - Scalar(1)};
}

// u-image (times sigma) of the y-set N(F); nullopt if it meets y*.
std::optional<YSet> chart_image(const Chart& ch, const Moebius& N, const YSet& F, int sigma) {
  YSet out;
  for (const auto& iv : F) {
    if (auto pl = N.pole(); pl && iv.lo <= *pl && *pl <= iv.hi) return std::nullopt;
    Scalar a = N.apply(iv.lo), b = N.apply(iv.hi);
    if (b < a) std::swap(a, b);
    if (a <= ch.ystar && ch.ystar <= b) return std::nullopt;
    Scalar u0 = (b - ch.ystar).inverse(), u1 = (a - ch.ystar).inverse();
    if (sigma < 0) {
      std::swap(u0, u1);
      u0 = -u0;
      u1 = -u1;
    }
    out.push_back({u0, u1});
  }
  return yset_normalize(std::move(out));
}

struct Group {
  Chart chart;
  std::vector<TailFamily> fams;
};

// Closed-form image of a group of families sharing one chart.  When the
// translates tile a neighbourhood of y* the image is exact; otherwise kPeriods
// further periods are imaged and the strip beyond counts as unresolved.
// Returns false if some family image meets y*.
constexpr int kPeriods = 16;

bool close_group(const PiecewiseMap& T, const Group& g, std::vector<Cell>& out, double& unresolved,
                 bool& tiled) {
  const int sigma = g.chart.s.sign();
  const Scalar S = sigma > 0 ? g.chart.s : -g.chart.s;
  std::vector<YSet> G;
  bool exact = true;
  for (const auto& f : g.fams) {
    auto gi = chart_image(g.chart, f.D.conjugate_by_R(), f.F, sigma);
    if (!gi || gi->empty()) return false;
    G.push_back(std::move(*gi));
    exact = exact && f.exact;
  }
  // pattern modulo S
  YSet pat;
  for (const auto& gi : G)
    for (const auto& iv : gi) {
      if (S <= iv.hi - iv.lo) {
        pat.push_back({Scalar(0), S});
        continue;
      }
      const Scalar k(mpq_class((iv.lo / S).floor()));
      const Scalar a = iv.lo - k * S, b = a + (iv.hi - iv.lo);
      if (b <= S) {
        pat.push_back({a, b});
      } else {
        pat.push_back({a, S});
        pat.push_back({Scalar(0), b - S});
      }
    }
  pat = yset_normalize(std::move(pat));
  const double gap = (S - yset_length(pat)).to_double() / S.to_double();
  tiled = gap <= 1e-12;

  Scalar uc = G[0].back().hi;
  for (const auto& gi : G)
    if (uc < gi.back().hi) uc = gi.back().hi;
  if (uc.sign() <= 0) return false;
  if (!tiled) uc += S * Scalar(kPeriods);

  YSet ys;
  auto to_y = [&](const Scalar& a, const Scalar& b) -> bool {
    // sigma-space [a, b] -> y-interval
    Scalar u0 = sigma > 0 ? a : -b, u1 = sigma > 0 ? b : -a;
    if (u0.sign() <= 0 && u1.sign() >= 0) return false;
    Scalar y0 = g.chart.ystar + u1.inverse(), y1 = g.chart.ystar + u0.inverse();
    if (y1 < y0) std::swap(y0, y1);
    ys.push_back({y0, y1});
    return true;
  };
  for (const auto& gi : G) {
    for (long k = 0;; ++k) {
      if (k > 100000 + kPeriods) return false;
      const Scalar sh = S * Scalar(k);
      if (uc <= gi.front().lo + sh) break;
      for (const auto& iv : gi) {
        Scalar a = iv.lo + sh, b = iv.hi + sh;
        if (uc < b) b = uc;
        if (a < b && !to_y(a, b)) return false;
      }
    }
  }
  // half line [uc, inf) in sigma-space
  const Scalar yc = g.chart.ystar + (sigma > 0 ? uc : -uc).inverse();
  YSet half{sigma > 0 ? YInterval{g.chart.ystar, yc} : YInterval{yc, g.chart.ystar}};
  if (tiled) {
    ys.push_back(half.front());
  } else {
    unresolved += strip_mass(T.lo(), T.hi(), half);
  }
  Cell c{T.lo(), T.hi(), yset_normalize(std::move(ys)), exact};
  for (const auto& f : g.fams)
    if (f.partial) out.push_back(*f.partial);
  out.push_back(std::move(c));
  return true;
}

}  // namespace

constexpr int kMaxDepth = 2;
constexpr double kDepthRatio = 1.0 / 16;

PlanarImage planar_image(const PiecewiseMap& T, const Region& R, double w_min) {
  PlanarImage res;
  std::map<std::string, Group> groups;
  for (const auto& cell : R.cells()) {
    auto split = split_by_cylinders(T, cell.x0, cell.x1, w_min);
    for (const auto& pc : split.pieces) {
      res.cells.push_back(cell_image(pc.digit.M, Cell{pc.lo, pc.hi, cell.ys, cell.exact}));
      ++res.pieces;
    }
    std::vector<std::tuple<Scalar, Scalar, int>> work;
    for (const auto& [a, b] : split.tails) work.emplace_back(a, b, 0);
    while (!work.empty()) {
      auto [a, b, depth] = std::move(work.back());
      work.pop_back();
      ++res.tails;
      std::vector<TailFamily> fams;
      auto f1 = walk(T, a, +1, b, cell);
      auto f2 = walk(T, b, -1, a, cell);
      Scalar lo = a, hi = b;
      if (f1 && f1->p == b) {
        fams.push_back(*f1);
        lo = b;
      } else if (f2 && f2->p == a) {
        fams.push_back(*f2);
        lo = b;
      } else {
        if (f1) {
          lo = f1->p;
          fams.push_back(*f1);
        }
        if (f2 && lo <= f2->p) {
          hi = f2->p;
          fams.push_back(*f2);
        }
      }
      // nested accumulation: split the rest more finely
      if (lo < hi) {
        if (depth < kMaxDepth) {
          const double w = w_min * std::pow(kDepthRatio, depth + 1);
          auto sub = split_by_cylinders(T, lo, hi, w);
          for (const auto& pc : sub.pieces) {
            res.cells.push_back(cell_image(pc.digit.M, Cell{pc.lo, pc.hi, cell.ys, cell.exact}));
            ++res.pieces;
          }
          for (const auto& [c, d] : sub.tails) work.emplace_back(c, d, depth + 1);
        } else {
          res.unresolved += strip_mass(lo, hi, cell.ys);
        }
      }
      for (auto& f : fams) {
        auto ch = chart_for(f.P);
        if (!ch) {
          if (f.partial) res.cells.push_back(*f.partial);
          const Scalar end = image_members(T, f, 64, res.cells);
          res.unresolved += strip_mass(end, f.p, f.F);
          continue;
        }
        auto& g = groups[ch->key()];
        g.chart = *ch;
        g.fams.push_back(std::move(f));
      }
    }
  }
  for (auto& [key, g] : groups) {
    bool tiled = false;
    if (close_group(T, g, res.cells, res.unresolved, tiled)) {
      if (tiled) res.tails_closed_form += static_cast<int>(g.fams.size());
      continue;
    }
    for (const auto& f : g.fams) {
      if (f.partial) res.cells.push_back(*f.partial);
      const Scalar end = image_members(T, f, 64, res.cells);
      res.unresolved += strip_mass(end, f.p, f.F);
    }
  }
  return res;
}

BijectivityReport check_bijectivity(const PiecewiseMap& T, const Region& R, double tol,
                                    double w_min) {
  BijectivityReport rep;
  const PlanarImage im = planar_image(T, R, w_min);
  const OverlapResult ov = union_with_overlap(im.cells);
  rep.mass = R.mass();
  rep.overlap = ov.overlap.mass();
  rep.uncovered = R.subtract(ov.uni).mass();
  rep.excess = ov.uni.subtract(R).mass();
  rep.unresolved = im.unresolved;
  rep.defect = std::max({rep.overlap, rep.excess, std::max(0.0, rep.uncovered - rep.unresolved)});
  rep.threshold = std::isfinite(rep.mass) ? tol * rep.mass : tol;
  rep.pass = rep.defect <= rep.threshold;
  rep.pieces = im.pieces;
  rep.tails = im.tails;
  rep.tails_closed_form = im.tails_closed_form;
  return rep;
}

std::vector<FiberSymmetry> nakada_fiber_symmetry(const Region& R, const Scalar& alpha,
                                                 const std::vector<long>& ds, double tol,
                                                 const Moebius& pairing) {
  const auto T = PiecewiseMap::nakada(alpha);
  const long da = [&] {
    auto d = T.digit_at(alpha, Side::left);
    return d ? d->tag[1] : 0L;
  }();
  std::vector<FiberSymmetry> out;
  const Moebius inv = pairing.inverse();
  for (long d : ds) {
    if (d < da + 1) throw std::invalid_argument("fiber symmetry needs d >= d_alpha(alpha) + 1");
    FiberSymmetry fs;
    fs.d = d;
    const Cylinder cyl = T.cylinder(T.make_digit({1, d}));
    std::vector<Scalar> bps{cyl.lo, cyl.hi};
    Scalar w0 = pairing.apply(cyl.lo), w1 = pairing.apply(cyl.hi);
    if (w1 < w0) std::swap(w0, w1);
    for (const auto& c : R.cells()) {
      for (const Scalar* x : {&c.x0, &c.x1}) {
        if (cyl.lo < *x && *x < cyl.hi) bps.push_back(*x);
        if (w0 < *x && *x < w1) bps.push_back(inv.apply(*x));
      }
    }
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    const YSet unit{{Scalar(0), Scalar(1)}};
    for (size_t i = 0; i + 1 < bps.size(); ++i) {
      const Scalar m = (bps[i] + bps[i + 1]) / Scalar(2);
      const YSet A = R.fiber(pairing.apply(m));
      YSet B;
      for (const auto& iv : R.fiber(m)) B.push_back({Scalar(1) - iv.hi, Scalar(1) - iv.lo});
      B = yset_normalize(std::move(B));
      fs.overlap = std::max(fs.overlap, yset_length(yset_intersection(A, B)).to_double());
      const YSet U = yset_intersection(yset_union(A, B), unit);
      fs.gap = std::max(fs.gap, (Scalar(1) - yset_length(U)).to_double());
    }
    fs.ok = fs.overlap <= tol && fs.gap <= tol;
    out.push_back(fs);
  }
  return out;
}

// ---------------------------------------------------------------- certificate

namespace {

// Bounds of sum (d-c)/((1+xc)(1+xd)) over x in [s0, s1].
std::pair<double, double> fiber_mass_bounds(double s0, double s1, const Cell& c) {
  double lo = 0, hi = 0;
  for (const auto& iv : c.ys) {
    const double a = iv.lo.to_double(), b = iv.hi.to_double();
    auto q = [&](double x) { return (1 + x * a) * (1 + x * b); };
    double qmin = std::min(q(s0), q(s1)), qmax = std::max(q(s0), q(s1));
    if (a * b != 0) {
      const double xv = -(a + b) / (2 * a * b);
      if (s0 < xv && xv < s1) {
        qmin = std::min(qmin, q(xv));
        qmax = std::max(qmax, q(xv));
      }
    }
    if (qmin <= 0) return {0, std::numeric_limits<double>::infinity()};
    lo += (b - a) / qmax;
    hi += (b - a) / qmin;
  }
  return {lo, hi};
}

}  // namespace

Certificate certify(const PiecewiseMap& T, const Region& R, const CertifyParams& p) {
  Certificate cert;
  cert.bijectivity = check_bijectivity(T, R, p.tol, p.w_min);
  if (!cert.bijectivity.pass) cert.failed.push_back("bijectivity");

  // (a) fiber bounds; the Z-fiber length is the fiber mass
  bool covers = !R.empty() && R.x_min() <= T.lo() && T.hi() <= R.x_max();
  for (size_t i = 0; covers && i + 1 < R.cells().size(); ++i)
    covers = R.cells()[i].x1 == R.cells()[i + 1].x0;
  cert.b = std::numeric_limits<double>::infinity();
  cert.B = 0;
  for (const auto& c : R.cells()) {
    const double x0 = c.x0.to_double(), x1 = c.x1.to_double();
    for (int k = 0; k < p.slabs; ++k) {
      const double s0 = x0 + (x1 - x0) * k / p.slabs, s1 = x0 + (x1 - x0) * (k + 1) / p.slabs;
      auto [lo, hi] = fiber_mass_bounds(s0, s1, c);
      cert.b = std::min(cert.b, lo);
      cert.B = std::max(cert.B, hi);
    }
  }
  if (!covers) cert.b = 0;
  if (!(cert.b > 0 && std::isfinite(cert.B))) cert.failed.push_back("a");

  // (b) distance from the hyperbola, exact at the corners
  {
    std::optional<Scalar> gmin;
    for (const auto& c : R.cells())
      for (const auto& iv : c.ys)
        for (const Scalar* x : {&c.x0, &c.x1})
          for (const Scalar* y : {&iv.lo, &iv.hi}) {
            const Scalar v = Scalar(1) + *x * *y;
            if (!gmin || v < *gmin) gmin = v;
          }
    cert.hyperbola_gap = gmin ? gmin->to_double() : 0;
    if (!(gmin && gmin->sign() > 0)) cert.failed.push_back("b");
  }

  // (d) orbits of non-full cylinder endpoints, then a full cylinder avoiding them
  auto split = split_by_cylinders(T, T.lo(), T.hi(), p.w_min);
  std::vector<Scalar> orbit_pts;
  bool proven = true;
  for (const auto& pc : split.pieces) {
    if (pc.full) continue;
    const bool up = pc.digit.M.det_sign() > 0;
    for (int end = 0; end < 2; ++end) {
      const Scalar v = pc.digit.M.apply(end == 0 ? pc.lo : pc.hi);
      const Side side = (end == 0) == up ? Side::right : Side::left;
      if ((v == T.lo() && side == Side::left) || (v == T.hi() && side == Side::right)) continue;
      if (!(T.lo() <= v && v <= T.hi())) continue;
      OrbitEvidence ev;
      ev.start = v.str();
      auto orb = T.orbit(v, p.horizon, side);
      std::set<std::string> seen;
      ev.status = "unproven";
      for (const auto& o : orb) {
        ++ev.length;
        if (!seen.insert(o.value.str()).second) {
          ev.status = "periodic";
          break;
        }
        orbit_pts.push_back(o.value);
        if (!o.digit) {
          ev.status = "terminates";
          break;
        }
      }
      if (ev.status == "unproven") proven = false;
      cert.orbits.push_back(std::move(ev));
    }
  }
  std::vector<const SplitPiece*> fulls;
  for (const auto& pc : split.pieces)
    if (pc.full) fulls.push_back(&pc);
  std::sort(fulls.begin(), fulls.end(), [](const SplitPiece* a, const SplitPiece* b) {
    return (b->hi - b->lo) < (a->hi - a->lo);
  });
  const SplitPiece* chosen = nullptr;
  for (size_t i = 0; i < fulls.size() && i < static_cast<size_t>(p.candidates); ++i) {
    const auto* f = fulls[i];
    bool avoids = true;
    for (const auto& v : orbit_pts)
      if (f->lo < v && v < f->hi) {
        avoids = false;
        break;
      }
    if (avoids) {
      chosen = f;
      break;
    }
  }
  if (!proven || !chosen) cert.failed.push_back("d");

  // (c) ratio of image-fiber mass to receiving-fiber mass for the chosen cylinder
  const SplitPiece* cyl = chosen ? chosen : (fulls.empty() ? nullptr : fulls.front());
  if (cyl) {
    cert.full_cylinder = Cylinder{cyl->lo, cyl->hi, cyl->digit, true};
    std::vector<Cell> img;
    const Region part = R.restrict_x(cyl->lo, cyl->hi);
    for (const auto& c : part.cells()) img.push_back(cell_image(cyl->digit.M, c));
    const Region S(std::move(img));
    // enclose the ratio on slabs between breakpoints of R and S
    std::vector<double> bps{T.lo_double(), T.hi_double()};
    for (const Region* reg : {&R, &S})
      for (const auto& c : reg->cells())
        for (double x : {c.x0.to_double(), c.x1.to_double()})
          if (T.lo_double() < x && x < T.hi_double()) bps.push_back(x);
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    auto cell_over = [](const Region& reg, double s0, double s1) -> const Cell* {
      const double m = 0.5 * (s0 + s1);
      for (const auto& c : reg.cells())
        if (c.x0.to_double() <= m && m <= c.x1.to_double()) return &c;
      return nullptr;
    };
    const int per = std::max(4, p.grid / static_cast<int>(bps.size()));
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0;
    for (size_t i = 0; i + 1 < bps.size(); ++i) {
      const Cell* rc = cell_over(R, bps[i], bps[i + 1]);
      const Cell* sc = cell_over(S, bps[i], bps[i + 1]);
      for (int k = 0; k < per; ++k) {
        const double s0 = bps[i] + (bps[i + 1] - bps[i]) * k / per;
        const double s1 = bps[i] + (bps[i + 1] - bps[i]) * (k + 1) / per;
        auto [rlo, rhi] = rc ? fiber_mass_bounds(s0, s1, *rc) : std::pair<double, double>{0, 0};
        auto [slo, shi] = sc ? fiber_mass_bounds(s0, s1, *sc) : std::pair<double, double>{0, 0};
        if (!(rlo > 0)) {
          rmin = 0;
          rmax = std::numeric_limits<double>::infinity();
          continue;
        }
        rmin = std::min(rmin, slo / rhi);
        rmax = std::max(rmax, shi / rlo);
      }
    }
    cert.ratio_min = rmin;
    cert.ratio_max = rmax;
    cert.rho = std::max(rmax, 1 - rmin);
    if (!(rmin > 0 && rmax < 1)) cert.failed.push_back("c");
  } else {
    cert.failed.push_back("c");
  }

  if (cert.failed.empty()) {
    cert.r = 1;
    while (std::pow(cert.rho, cert.r - 1) * cert.B >= cert.b && cert.r < 100000) ++cert.r;
    cert.granted = true;
  }
  std::sort(cert.failed.begin(), cert.failed.end());
  return cert;
}

}  // namespace mdyn
