#include "mdyn/region.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mdyn {

// ---------------------------------------------------------------- y-sets

YSet yset_normalize(YSet v) {
  std::sort(v.begin(), v.end(), [](const YInterval& a, const YInterval& b) { return a.lo < b.lo; });
  YSet out;
  for (auto& iv : v) {
    if (!(iv.lo < iv.hi)) continue;
    if (!out.empty() && iv.lo <= out.back().hi) {
      if (out.back().hi < iv.hi) out.back().hi = std::move(iv.hi);
    } else {
      out.push_back(std::move(iv));
    }
  }
  return out;
}

YSet yset_union(const YSet& a, const YSet& b) {
  YSet v = a;
  v.insert(v.end(), b.begin(), b.end());
  return yset_normalize(std::move(v));
}

YSet yset_intersection(const YSet& a, const YSet& b) {
  YSet out;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const Scalar& lo = a[i].lo < b[j].lo ? b[j].lo : a[i].lo;
    const Scalar& hi = a[i].hi < b[j].hi ? a[i].hi : b[j].hi;
    if (lo < hi) out.push_back({lo, hi});
    if (a[i].hi < b[j].hi) ++i;
    else ++j;
  }
  return out;
}

YSet yset_difference(const YSet& a, const YSet& b) {
  YSet out;
  size_t j = 0;
  for (const auto& iv : a) {
    Scalar cur = iv.lo;
    while (j < b.size() && b[j].hi <= cur) ++j;
    size_t k = j;
    while (k < b.size() && b[k].lo < iv.hi) {
      if (cur < b[k].lo) out.push_back({cur, b[k].lo});
      if (cur < b[k].hi) cur = b[k].hi;
      ++k;
    }
    if (cur < iv.hi) out.push_back({cur, iv.hi});
  }
  return out;
}

Scalar yset_length(const YSet& a) {
  Scalar s;
  for (const auto& iv : a) s = s + (iv.hi - iv.lo);
  return s;
}

// ---------------------------------------------------------------- measure

double mu_box(double a, double b, double c, double d) {
  if (a == b || c == d) return 0.0;
  const double p[4] = {1 + a * c, 1 + a * d, 1 + b * c, 1 + b * d};
  bool pos = false, neg = false, zero = false;
  for (double v : p) (v > 0 ? pos : (v < 0 ? neg : zero)) = true;
  if (pos && neg) throw std::domain_error("box crosses the hyperbola y = -1/x");
  if (zero) return std::numeric_limits<double>::infinity();
  return std::log1p((b - a) * (d - c) / (p[2] * p[1]));
}

namespace {

// 0 finite, 1 infinite; throws when crossing.
int classify_box(const Scalar& a, const Scalar& b, const Scalar& c, const Scalar& d) {
  const Scalar one(1);
  const int s[4] = {(one + a * c).sign(), (one + a * d).sign(), (one + b * c).sign(),
                    (one + b * d).sign()};
  bool pos = false, neg = false, zero = false;
  for (int v : s) (v > 0 ? pos : (v < 0 ? neg : zero)) = true;
  if (pos && neg)
    throw std::domain_error("box [" + a.str() + "," + b.str() + "]x[" + c.str() + "," + d.str() +
                            "] crosses the hyperbola y = -1/x");
  return zero ? 1 : 0;
}

}  // namespace

Scalar mu_box_argument(const Scalar& a, const Scalar& b, const Scalar& c, const Scalar& d) {
  if (a == b || c == d) return Scalar(0);
  if (classify_box(a, b, c, d)) throw std::domain_error("box has infinite measure");
  const Scalar one(1);
  return (b - a) * (d - c) / ((one + b * c) * (one + a * d));
}

double mu_box(const Scalar& a, const Scalar& b, const Scalar& c, const Scalar& d) {
  if (a == b || c == d) return 0.0;
  if (classify_box(a, b, c, d)) return std::numeric_limits<double>::infinity();
  return std::log1p(mu_box_argument(a, b, c, d).to_double());
}

// ---------------------------------------------------------------- images

namespace {

std::pair<Scalar, Scalar> image_interval(const Moebius& M, const Scalar& lo, const Scalar& hi,
                                         const char* axis) {
  if (auto p = M.pole(); p && lo <= *p && *p <= hi)
    throw PoleError(std::string("pole of ") + M.str() + " at " + axis + " = " + p->str() +
                        " inside [" + lo.str() + ", " + hi.str() + "]",
                    *p);
  Scalar u = M.apply(lo), v = M.apply(hi);
  if (v < u) std::swap(u, v);
  return {u, v};
}

}  // namespace

Cell cell_image(const Moebius& M, const Cell& c) {
  Cell out;
  auto [x0, x1] = image_interval(M, c.x0, c.x1, "x");
  out.x0 = std::move(x0);
  out.x1 = std::move(x1);
  const Moebius N = M.conjugate_by_R();
  YSet ys;
  ys.reserve(c.ys.size());
  for (const auto& iv : c.ys) {
    auto [u, v] = image_interval(N, iv.lo, iv.hi, "y");
    ys.push_back({std::move(u), std::move(v)});
  }
  out.ys = yset_normalize(std::move(ys));
  out.exact = c.exact;
  return out;
}

// ---------------------------------------------------------------- sweep

namespace {

// Calls fn(active_per_list, x0, x1) on each elementary x-interval of the common
// refinement; fn returns the y-set for that interval.
template <class Fn>
std::vector<Cell> sweep(const std::vector<const std::vector<Cell>*>& lists, Fn fn) {
  std::vector<Scalar> bps;
  for (const auto* l : lists)
    for (const auto& c : *l)
      if (c.x0 < c.x1) {
        bps.push_back(c.x0);
        bps.push_back(c.x1);
      }
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  const size_t L = lists.size();
  std::vector<std::vector<size_t>> order(L);
  std::vector<size_t> next(L, 0);
  std::vector<std::vector<const Cell*>> active(L);
  for (size_t k = 0; k < L; ++k) {
    const auto& l = *lists[k];
    for (size_t i = 0; i < l.size(); ++i)
      if (l[i].x0 < l[i].x1) order[k].push_back(i);
    std::sort(order[k].begin(), order[k].end(),
              [&](size_t a, size_t b) { return l[a].x0 < l[b].x0; });
  }

  std::vector<Cell> out;
  for (size_t e = 0; e + 1 < bps.size(); ++e) {
    const Scalar& p = bps[e];
    bool exact = true;
    for (size_t k = 0; k < L; ++k) {
      auto& act = active[k];
      act.erase(std::remove_if(act.begin(), act.end(), [&](const Cell* c) { return c->x1 <= p; }),
                act.end());
      const auto& l = *lists[k];
      while (next[k] < order[k].size() && l[order[k][next[k]]].x0 <= p) {
        act.push_back(&l[order[k][next[k]]]);
        ++next[k];
      }
      for (const Cell* c : act) exact = exact && c->exact;
    }
    YSet ys = fn(active, p, bps[e + 1]);
    if (ys.empty()) continue;
    if (!out.empty() && out.back().x1 == p && out.back().exact == exact && out.back().ys == ys) {
      out.back().x1 = bps[e + 1];
    } else {
      out.push_back({p, bps[e + 1], std::move(ys), exact});
    }
  }
  return out;
}

YSet gather(const std::vector<const Cell*>& act) {
  if (act.size() == 1) return act[0]->ys;
  YSet v;
  for (const Cell* c : act) v.insert(v.end(), c->ys.begin(), c->ys.end());
  return yset_normalize(std::move(v));
}

}  // namespace

Region::Region(std::vector<Cell> cells) {
  cells_ = sweep({&cells}, [](const auto& act, const Scalar&, const Scalar&) { return gather(act[0]); });
  build_cache();
}

Region Region::box(const Scalar& x0, const Scalar& x1, const Scalar& y0, const Scalar& y1) {
  return Region({Cell{x0, x1, {{y0, y1}}, true}});
}

void Region::build_cache() {
  cache_.clear();
  cache_.reserve(cells_.size());
  for (const auto& c : cells_) {
    CellD d{c.x0.to_double(), c.x1.to_double(), {}};
    for (const auto& iv : c.ys) d.ys.emplace_back(iv.lo.to_double(), iv.hi.to_double());
    cache_.push_back(std::move(d));
  }
}

bool Region::exact() const {
  return std::all_of(cells_.begin(), cells_.end(), [](const Cell& c) { return c.exact; });
}

Scalar Region::x_min() const {
  if (cells_.empty()) throw std::logic_error("empty region");
  return cells_.front().x0;
}

Scalar Region::x_max() const {
  if (cells_.empty()) throw std::logic_error("empty region");
  return cells_.back().x1;
}

double Region::y_min() const {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& c : cache_)
    if (!c.ys.empty()) v = std::min(v, c.ys.front().first);
  return v;
}

double Region::y_max() const {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& c : cache_)
    if (!c.ys.empty()) v = std::max(v, c.ys.back().second);
  return v;
}

double Region::mass() const {
  double s = 0;
  for (const auto& c : cells_)
    for (const auto& iv : c.ys) s += mu_box(c.x0, c.x1, iv.lo, iv.hi);
  return s;
}

double Region::lebesgue_area() const {
  double s = 0;
  for (const auto& c : cache_)
    for (const auto& [lo, hi] : c.ys) s += (c.x1 - c.x0) * (hi - lo);
  return s;
}

YSet Region::fiber(const Scalar& x) const {
  if (cells_.empty() || x < cells_.front().x0 || cells_.back().x1 < x) return {};
  auto it = std::upper_bound(cells_.begin(), cells_.end(), x,
                             [](const Scalar& v, const Cell& c) { return v < c.x0; });
  if (it == cells_.begin()) return {};
  --it;
  if (x < it->x1 || (x == it->x1 && std::next(it) == cells_.end())) return it->ys;
  return {};
}

double Region::fiber_mass(double x) const {
  auto it = std::upper_bound(cache_.begin(), cache_.end(), x,
                             [](double v, const CellD& c) { return v < c.x0; });
  if (it == cache_.begin()) return 0.0;
  --it;
  if (!(x < it->x1 || (x == it->x1 && std::next(it) == cache_.end()))) return 0.0;
  double s = 0;
  for (const auto& [c, d] : it->ys) s += (d - c) / ((1 + x * c) * (1 + x * d));
  return s;
}

Region Region::unite(const Region& o) const {
  Region r;
  r.cells_ = sweep({&cells_, &o.cells_}, [](const auto& act, const Scalar&, const Scalar&) {
    YSet a = act[0].empty() ? YSet{} : act[0][0]->ys;
    YSet b = act[1].empty() ? YSet{} : act[1][0]->ys;
    return yset_union(a, b);
  });
  r.build_cache();
  return r;
}

Region Region::intersect(const Region& o) const {
  Region r;
  r.cells_ = sweep({&cells_, &o.cells_}, [](const auto& act, const Scalar&, const Scalar&) {
    if (act[0].empty() || act[1].empty()) return YSet{};
    return yset_intersection(act[0][0]->ys, act[1][0]->ys);
  });
  r.build_cache();
  return r;
}

Region Region::subtract(const Region& o) const {
  Region r;
  r.cells_ = sweep({&cells_, &o.cells_}, [](const auto& act, const Scalar&, const Scalar&) {
    if (act[0].empty()) return YSet{};
    if (act[1].empty()) return act[0][0]->ys;
    return yset_difference(act[0][0]->ys, act[1][0]->ys);
  });
  r.build_cache();
  return r;
}

Region Region::restrict_x(const Scalar& a, const Scalar& b) const {
  std::vector<Cell> out;
  for (const auto& c : cells_) {
    Cell d = c;
    if (d.x0 < a) d.x0 = a;
    if (b < d.x1) d.x1 = b;
    if (d.x0 < d.x1) out.push_back(std::move(d));
  }
  Region r;
  r.cells_ = std::move(out);
  r.build_cache();
  return r;
}

double symmetric_difference_mass(const Region& a, const Region& b) {
  return a.subtract(b).mass() + b.subtract(a).mass();
}

OverlapResult union_with_overlap(const std::vector<Cell>& cells) {
  std::vector<Cell> over;
  auto uni = sweep({&cells}, [&](const auto& act, const Scalar& x0, const Scalar& x1) {
    const auto& cs = act[0];
    if (cs.size() == 1) return cs[0]->ys;
    // +1 at starts, -1 at ends; ends sort first so touching pieces do not overlap
    std::vector<std::pair<const Scalar*, int>> ev;
    for (const Cell* c : cs)
      for (const auto& iv : c->ys) {
        ev.emplace_back(&iv.lo, 1);
        ev.emplace_back(&iv.hi, -1);
      }
    std::sort(ev.begin(), ev.end(), [](const auto& p, const auto& q) {
      if (*p.first == *q.first) return p.second < q.second;
      return *p.first < *q.first;
    });
    YSet u, o;
    int cnt = 0;
    const Scalar *ustart = nullptr, *ostart = nullptr;
    for (const auto& [v, s] : ev) {
      const int before = cnt;
      cnt += s;
      if (before == 0 && cnt == 1) ustart = v;
      if (before == 1 && cnt == 0) u.push_back({*ustart, *v});
      if (before == 1 && cnt == 2) ostart = v;
      if (before == 2 && cnt == 1) o.push_back({*ostart, *v});
    }
    o = yset_normalize(std::move(o));
    if (!o.empty()) {
      bool exact = true;
      for (const Cell* c : cs) exact = exact && c->exact;
      over.push_back({x0, x1, std::move(o), exact});
    }
    return yset_normalize(std::move(u));
  });
  OverlapResult res;
  res.uni = Region(std::move(uni));
  res.overlap = Region(std::move(over));
  return res;
}

// ---------------------------------------------------------------- Z conjugation

namespace {

// Image fibers of y -> y / (1 + s y) (sign = +1) or y / (1 - s y) (sign = -1) over
// x in [s0, s1].  For sign +1 the endpoint curves decrease in x, for -1 they increase.
Region z_map(const Region& r, int slabs, bool outer, int sign) {
  if (slabs < 1) throw std::invalid_argument("slabs must be >= 1");
  std::vector<Cell> out;
  const Scalar one(1);
  for (const auto& c : r.cells()) {
    const Scalar w = (c.x1 - c.x0) / Scalar(slabs);
    for (int k = 0; k < slabs; ++k) {
      const Scalar s0 = c.x0 + w * Scalar(k);
      const Scalar s1 = k + 1 == slabs ? c.x1 : c.x0 + w * Scalar(k + 1);
      auto f = [&](const Scalar& x, const Scalar& y) {
        const Scalar den = sign > 0 ? one + x * y : one - x * y;
        if (den.sign() <= 0) throw std::domain_error("region meets the singular curve");
        return y / den;
      };
      YSet ys;
      for (const auto& iv : c.ys) {
        // low endpoint curve is smallest at s1 (sign +1) / s0 (sign -1)
        const Scalar& xlo_out = sign > 0 ? s1 : s0;
        const Scalar& xlo_in = sign > 0 ? s0 : s1;
        Scalar lo = f(outer ? xlo_out : xlo_in, iv.lo);
        Scalar hi = f(outer ? xlo_in : xlo_out, iv.hi);
        if (lo < hi) ys.push_back({std::move(lo), std::move(hi)});
      }
      ys = yset_normalize(std::move(ys));
      if (!ys.empty()) out.push_back({s0, s1, std::move(ys), false});
    }
  }
  return Region(std::move(out));
}

}  // namespace

Region z_conjugate(const Region& r, int slabs, bool outer) { return z_map(r, slabs, outer, 1); }
Region z_inverse(const Region& r, int slabs, bool outer) { return z_map(r, slabs, outer, -1); }

}  // namespace mdyn
