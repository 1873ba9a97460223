#include "mdyn/quilting.hpp"

#include <algorithm>
#include <cmath>

namespace mdyn {
namespace {

void append_images(const Moebius& M, const Region& S, std::vector<Cell>& out) {
  for (const auto& c : S.cells()) out.push_back(cell_image(M, c));
}

std::pair<Scalar, Scalar> image_interval(const Moebius& M, const Scalar& lo, const Scalar& hi) {
  Scalar a = M.apply(lo), b = M.apply(hi);
  if (b < a) std::swap(a, b);
  return {a, b};
}

// Bridges y-gaps narrower than eps.  Images of an inexact domain leave
// rounding slivers between neighbouring pieces.
Region close_gaps(const Region& R, double eps) {
  std::vector<Cell> out;
  for (const auto& c : R.cells()) {
    Cell d{c.x0, c.x1, {}, c.exact};
    for (const auto& iv : c.ys) {
      if (!d.ys.empty() && (iv.lo - d.ys.back().hi).to_double() < eps) {
        d.ys.back().hi = iv.hi;
      } else {
        d.ys.push_back(iv);
      }
    }
    out.push_back(std::move(d));
  }
  return Region(std::move(out));
}

struct Source {
  std::string kind;
  Region region;
  Moebius pf, pg;  // first F- and G-steps applied to the source
};

struct Track {
  int src = 0;
  Scalar lo, hi;
  std::vector<Moebius> wf, wg;  // wf[k]: F^(1+k) on the source piece
};

class Refiner {
 public:
  Refiner(const PiecewiseMap& f, const PiecewiseMap& g, const std::vector<Source>& srcs, double w_min)
      : f_(f), g_(g), srcs_(srcs), w_min_(w_min) {}

  // Advance one orbit by one step, splitting the piece where the image meets
  // several cylinders.
  std::vector<Track> extend(const Track& t, bool use_f) {
    const PiecewiseMap& T = use_f ? f_ : g_;
    const Moebius& W = use_f ? t.wf.back() : t.wg.back();
    auto [a, b] = image_interval(W, t.lo, t.hi);
    if (a < T.lo() || T.hi() < b)
      throw std::runtime_error("orbit of a quilting piece leaves the interval of " + T.name());
    std::vector<Track> out;
    const auto sp = split_by_cylinders(T, a, b, w_min_);
    const Moebius Winv = W.inverse();
    for (const auto& pc : sp.pieces) {
      Track u = t;
      if (sp.pieces.size() > 1 || !sp.tails.empty()) {
        auto [l, h] = image_interval(Winv, pc.lo, pc.hi);
        u.lo = l;
        u.hi = h;
      }
      (use_f ? u.wf : u.wg).push_back(pc.digit.M * W);
      out.push_back(std::move(u));
    }
    for (const auto& [c0, c1] : sp.tails) {
      auto [l, h] = image_interval(Winv, c0, c1);
      unresolved += srcs_[t.src].region.restrict_x(l, h).mass();
    }
    return out;
  }

  double unresolved = 0;

 private:
  const PiecewiseMap& f_;
  const PiecewiseMap& g_;
  const std::vector<Source>& srcs_;
  double w_min_;
};

// Smallest d + a among pairs not seen at the previous length.
std::optional<std::pair<int, int>> coincidence(const Track& t) {
  const int s = static_cast<int>(t.wf.size()) - 1;
  std::optional<std::pair<int, int>> best;
  auto consider = [&](int d, int a) {
    if (!t.wf[d].projective_eq(t.wg[a])) return;
    if (!best || d + a < best->first + best->second) best = {d, a};
  };
  for (int k = 0; k <= s; ++k) {
    consider(s, k);
    consider(k, s);
  }
  return best;
}

}  // namespace

DigitDifference digit_difference_set(const PiecewiseMap& f, const PiecewiseMap& g, double w_min) {
  DigitDifference res;
  const Scalar lo = std::max(f.lo(), g.lo()), hi = std::min(f.hi(), g.hi());
  if (!(lo < hi)) return res;
  std::vector<std::pair<Scalar, Scalar>> tails;
  const auto sf = split_by_cylinders(f, lo, hi, w_min);
  tails = sf.tails;
  for (const auto& pf : sf.pieces) {
    const auto sg = split_by_cylinders(g, pf.lo, pf.hi, w_min);
    tails.insert(tails.end(), sg.tails.begin(), sg.tails.end());
    for (const auto& pg : sg.pieces) {
      if (pf.digit.M.projective_eq(pg.digit.M)) continue;
      res.pieces.push_back({pg.lo, pg.hi, pf.digit, pg.digit, pg.digit.M * pf.digit.M.inverse()});
    }
  }
  std::sort(tails.begin(), tails.end());
  for (auto& t : tails) {
    if (!res.tails.empty() && res.tails.back().second == t.first) {
      res.tails.back().second = t.second;
    } else {
      res.tails.push_back(t);
    }
  }
  return res;
}

Region lift_region(const Region& omega_f, const DigitDifference& delta) {
  std::vector<Cell> out;
  for (const auto& p : delta.pieces) {
    const Region part = omega_f.restrict_x(p.lo, p.hi);
    out.insert(out.end(), part.cells().begin(), part.cells().end());
  }
  return Region(std::move(out));
}

QuiltReport quilt(const PiecewiseMap& f, const PiecewiseMap& g, const Region& omega_f,
                  const QuiltParams& p) {
  QuiltReport rep;
  rep.mass_f = omega_f.mass();
  if (f.name() == g.name()) {
    rep.omega_g = omega_f;
    rep.mass_g = rep.mass_f;
    rep.established = true;
    return rep;
  }
  rep.delta = digit_difference_set(f, g, std::max(p.w_min, 1e-7));

  // x-intervals of I_f outside I_g.  A piece of delta whose F-image lies in one
  // of them is tracked through that image, grouped by the relating matrix.
  std::vector<std::pair<Scalar, Scalar>> strips;
  if (f.lo() < g.lo()) strips.emplace_back(f.lo(), std::min(g.lo(), f.hi()));
  if (g.hi() < f.hi()) strips.emplace_back(std::max(g.hi(), f.lo()), f.hi());
  struct Group {
    size_t strip;
    Moebius rel;
    std::vector<Cell> cells;
  };
  std::vector<Group> groups;

  std::vector<Source> srcs;
  for (const auto& dp : rep.delta.pieces) {
    auto [a, b] = image_interval(dp.f_digit.M, dp.lo, dp.hi);
    auto sk = std::find_if(strips.begin(), strips.end(),
                           [&](const auto& s) { return s.first <= a && b <= s.second; });
    if (sk == strips.end()) {
      srcs.push_back({"direct", omega_f.restrict_x(dp.lo, dp.hi), dp.f_digit.M, dp.g_digit.M});
      continue;
    }
    const size_t k = sk - strips.begin();
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Group& gr) { return gr.strip == k && gr.rel.projective_eq(dp.rel); });
    if (it == groups.end()) {
      groups.push_back({k, dp.rel, {}});
      it = groups.end() - 1;
    }
    append_images(dp.f_digit.M, omega_f.restrict_x(dp.lo, dp.hi), it->cells);
  }
  for (size_t k = 0; k < strips.size(); ++k) {
    const Region part = omega_f.restrict_x(strips[k].first, strips[k].second);
    const auto n = std::count_if(groups.begin(), groups.end(), [&](const Group& gr) { return gr.strip == k; });
    double image_mass = 0;
    for (auto& gr : groups) {
      if (gr.strip != k) continue;
      // a lone group owns the whole strip, including images of delta tails
      Region img = n == 1 ? part : close_gaps(Region(std::move(gr.cells)), 1e-12).intersect(part);
      if (img.empty()) continue;
      auto [ga, gb] = image_interval(gr.rel, img.x_min(), img.x_max());
      if (ga < g.lo() || g.hi() < gb) {
        rep.failure = "relating matrix moves a strip image outside I_g";
        return rep;
      }
      image_mass += img.mass();
      srcs.push_back({"first-image", std::move(img), Moebius::identity(), gr.rel});
    }
    // omega_f over the strip not reached from resolved pieces comes from tails
    rep.unresolved += std::max(0.0, part.mass() - image_mass);
  }
  if (strips.empty())
    for (const auto& [t0, t1] : rep.delta.tails) rep.unresolved += omega_f.restrict_x(t0, t1).mass();

  // refine each source along both orbits until the words coincide
  Refiner ref(f, g, srcs, p.w_min);
  std::vector<Track> work;
  for (size_t i = 0; i < srcs.size(); ++i) {
    if (srcs[i].region.empty()) continue;
    work.push_back({static_cast<int>(i), srcs[i].region.x_min(), srcs[i].region.x_max(), {srcs[i].pf},
                    {srcs[i].pg}});
  }
  std::vector<Cell> del_cells, add_cells;
  double step_limited = 0;
  long processed = 0;
  bool over_budget = false;
  try {
    while (!work.empty()) {
      Track t = std::move(work.back());
      work.pop_back();
      if (++processed > p.max_tracks) {
        over_budget = true;
        break;
      }
      if (auto c = coincidence(t)) {
        QuiltPiece q;
        q.kind = srcs[t.src].kind;
        q.lo = t.lo;
        q.hi = t.hi;
        q.d = c->first;
        q.a = c->second;
        q.word_f = t.wf[q.d];
        q.word_g = t.wg[q.a];
        q.source = srcs[t.src].region.restrict_x(t.lo, t.hi);
        q.mass = q.source.mass();
        // F^j(C_i) = wf[j-1](source) for j = 1..d, likewise for G
        for (int j = 0; j < q.d; ++j) append_images(t.wf[j], q.source, del_cells);
        for (int j = 0; j < q.a; ++j) append_images(t.wg[j], q.source, add_cells);
        rep.pieces.push_back(std::move(q));
        continue;
      }
      if (static_cast<int>(t.wf.size()) > p.max_steps) {
        step_limited += srcs[t.src].region.restrict_x(t.lo, t.hi).mass();
        continue;
      }
      for (auto& u : ref.extend(t, true))
        for (auto& v : ref.extend(u, false)) work.push_back(std::move(v));
    }
  } catch (const std::exception& e) {
    rep.failure = e.what();
    return rep;
  }
  rep.unresolved += ref.unresolved;
  if (over_budget) {
    rep.failure = "quilting not established within " + std::to_string(p.max_tracks) + " tracked pieces";
    return rep;
  }
  std::sort(rep.pieces.begin(), rep.pieces.end(), [](const QuiltPiece& a, const QuiltPiece& b) {
    return a.kind != b.kind ? a.kind < b.kind : a.lo < b.lo;
  });
  for (const auto& q : rep.pieces) {
    if (!rep.groups.empty()) {
      auto& b = rep.groups.back();
      if (b.kind == q.kind && b.d == q.d && b.a == q.a && b.hi == q.lo) {
        b.hi = q.hi;
        b.mass += q.mass;
        ++b.count;
        continue;
      }
    }
    rep.groups.push_back({q.kind, q.lo, q.hi, q.d, q.a, q.mass, 1});
  }

  const OverlapResult od = union_with_overlap(del_cells);
  const OverlapResult oa = union_with_overlap(add_cells);
  rep.deleted = od.uni;
  rep.added = oa.uni;
  rep.deleted_overlap = od.overlap.mass();
  rep.added_overlap = oa.overlap.mass();
  rep.deleted_outside = rep.deleted.subtract(omega_f).mass();
  const Region kept = omega_f.subtract(rep.deleted);
  rep.added_collision = kept.intersect(rep.added).mass();
  // strip parts lost in cylinder tails are not deleted; they are already
  // counted as unresolved and are clipped here
  const Region kept_g = kept.restrict_x(g.lo(), g.hi());
  rep.omega_g = kept_g.unite(rep.added);
  rep.mass_g = rep.omega_g.mass();
  rep.defect = std::max({rep.deleted_overlap, rep.added_overlap, rep.deleted_outside, rep.added_collision});
  rep.deleted_ratio = rep.deleted.mass() / rep.mass_f;

  double sum = 0;
  for (const auto& q : rep.pieces) sum += (q.a - q.d) * q.mass;
  rep.entropy_factor = 1 / (1 + sum / rep.mass_f);

  const double threshold = p.tol * rep.mass_f;
  if (step_limited > 0) {
    rep.failure = "quilting not established within " + std::to_string(p.max_steps) + " steps";
  } else if (rep.pieces.empty()) {
    rep.failure = "no quilting pieces of positive measure";
  } else if (rep.deleted_overlap > threshold || rep.deleted_outside > threshold) {
    rep.failure = "deleted images are not disjoint inside omega_f";
  } else if (rep.added_overlap > threshold || rep.added_collision > threshold) {
    rep.failure = "added images are not disjoint from the rest";
  } else if (!(rep.deleted_ratio < 1)) {
    rep.failure = "deleted images have full measure";
  }
  rep.established = rep.failure.empty();
  if (p.check_bijectivity && rep.established) {
    rep.bijectivity = check_bijectivity(g, rep.omega_g, p.bijectivity_tol);
    if (!rep.bijectivity->pass) {
      rep.established = false;
      rep.failure = "quilted region fails the bijectivity check";
    }
  }
  return rep;
}

TransferSummary transfer_properties(const QuiltReport& report, const Certificate& certificate_f,
                                    double tol) {
  TransferSummary s;
  s.entropy_factor = report.entropy_factor;
  s.mass_ratio = report.mass_f / report.mass_g;
  if (!report.established) {
    s.reason = "quilting not established: " + report.failure;
    return s;
  }
  if (report.defect > tol * report.mass_f) {
    s.reason = "decomposition defect above tolerance";
    return s;
  }
  if (!certificate_f.granted) {
    s.reason = "no ergodicity certificate for f";
    return s;
  }
  if (std::abs(s.entropy_factor - s.mass_ratio) > tol * s.entropy_factor) {
    s.reason = "mass bookkeeping disagrees with the entropy factor";
    return s;
  }
  s.transferred = true;
  s.ergodic = true;
  s.natural_extension = true;
  s.isomorphic = std::all_of(report.pieces.begin(), report.pieces.end(),
                             [](const QuiltPiece& q) { return q.a == q.d; });
  return s;
}

}  // namespace mdyn
