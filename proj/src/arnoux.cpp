#include "mdyn/arnoux.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace mdyn {
namespace {

Mat2 to_mat(const Moebius& M) {
  return {M.a.to_double(), M.b.to_double(), M.c.to_double(), M.d.to_double()};
}

Mat2 mul(const Mat2& p, const Mat2& q) {
  return {p[0] * q[0] + p[1] * q[2], p[0] * q[1] + p[1] * q[3],
          p[2] * q[0] + p[3] * q[2], p[2] * q[1] + p[3] * q[3]};
}

double max_diff(const Mat2& p, const Mat2& q, double s) {
  double r = 0;
  for (int i = 0; i < 4; ++i) r = std::max(r, std::abs(p[i] - s * q[i]));
  return r;
}

double apply(const Mat2& m, double x) { return (m[0] * x + m[1]) / (m[2] * x + m[3]); }

struct CellD {
  double x0, x1;
  std::vector<std::pair<double, double>> ys;
};

std::vector<CellD> float_cells(const Region& R) {
  std::vector<CellD> out;
  for (const auto& c : R.cells()) {
    CellD d{c.x0.to_double(), c.x1.to_double(), {}};
    for (const auto& iv : c.ys) d.ys.emplace_back(iv.lo.to_double(), iv.hi.to_double());
    out.push_back(std::move(d));
  }
  return out;
}

bool strictly_inside(const std::vector<CellD>& cells, double x, double y, double m) {
  auto it = std::upper_bound(cells.begin(), cells.end(), x, [](double v, const CellD& c) { return v < c.x1; });
  if (it == cells.end() || !(it->x0 + m < x && x < it->x1 - m)) return false;
  return std::any_of(it->ys.begin(), it->ys.end(), [&](const auto& iv) { return iv.first + m < y && y < iv.second - m; });
}

// Uniform in area over the cells.
class Sampler {
 public:
  explicit Sampler(const std::vector<CellD>& cells) {
    double acc = 0;
    for (const auto& c : cells)
      for (const auto& [lo, hi] : c.ys) {
        acc += (c.x1 - c.x0) * (hi - lo);
        boxes_.push_back({c.x0, c.x1, lo, hi});
        cum_.push_back(acc);
      }
    if (!(acc > 0) || !std::isfinite(acc)) throw std::domain_error("first_return_diagnostics: region needs finite positive area");
  }
  template <class Rng>
  std::pair<double, double> operator()(Rng& rng) const {
    std::uniform_real_distribution<double> u(0, 1);
    const double t = u(rng) * cum_.back();
    const size_t i = std::min<size_t>(std::upper_bound(cum_.begin(), cum_.end(), t) - cum_.begin(), boxes_.size() - 1);
    const auto& b = boxes_[i];
    return {b[0] + u(rng) * (b[1] - b[0]), b[2] + u(rng) * (b[3] - b[2])};
  }

 private:
  std::vector<std::array<double, 4>> boxes_;
  std::vector<double> cum_;
};

struct Word {
  Moebius M;
  Mat2 m, rm;  // action on x, and R M R^-1 on y
  int last = -1;
};

}  // namespace

std::pair<Scalar, Scalar> leb_step(const Moebius& M, const Scalar& x, const Scalar& y) {
  const Scalar s = M.c * x + M.d;
  if (s.is_zero()) throw std::domain_error("leb_step: x is the pole of M");
  return {M.apply(x), Scalar(M.det_sign()) * (s * s * y - M.c * s)};
}

Mat2 arnoux_A(double x, double y) { return {x, x * y - 1, 1, y}; }

FlowSample flow_residual(const Moebius& M, double x, double y, double x_next, double y_next) {
  FlowSample f;
  f.x = x;
  f.y = y;
  f.M = to_mat(M);
  double s = f.M[2] * x + f.M[3];
  if (s == 0) throw std::domain_error("flow_residual: x is the pole of M");
  if (s < 0) {
    for (double& v : f.M) v = -v;
    s = -s;
  }
  f.det = M.det_sign();
  f.t0 = -2 * std::log(s);
  f.A = arnoux_A(x, y);
  f.A_next = arnoux_A(x_next, y_next);
  const Mat2 g{std::exp(f.t0 / 2), 0, 0, std::exp(-f.t0 / 2)};
  const Mat2 lhs = mul(mul(f.M, f.A), g);
  const Mat2 rhs = f.det > 0 ? f.A_next : mul(f.A_next, Mat2{1, 0, 0, -1});
  f.residual = std::min(max_diff(lhs, rhs, 1), max_diff(lhs, rhs, -1));
  return f;
}

FlowSample verify_flow_relation(const Moebius& M, const Scalar& x, const Scalar& y) {
  const auto [x1, y1] = leb_step(M, x, y);
  return flow_residual(M, x.to_double(), y.to_double(), x1.to_double(), y1.to_double());
}

std::vector<Moebius> nakada_generators(long d_max) {
  std::vector<Moebius> g;
  for (long d = 1; d <= d_max; ++d)
    for (int eps : {1, -1}) g.push_back(mat::nakada_M(eps, d));
  g.push_back(mat::U());
  return g;
}

FirstReturnReport first_return_diagnostics(const PiecewiseMap& T, const Region& R,
                                           const std::vector<Moebius>& generators,
                                           const FirstReturnParams& p) {
  const auto cells = float_cells(R);
  const Sampler sample(cells);
  std::mt19937_64 rng(p.seed);
  FirstReturnReport rep;
  rep.word_length = p.word_length;

  double sum = 0;
  rep.tau_min = std::numeric_limits<double>::infinity();
  for (long k = 0; k < p.samples; ++k) {
    const double t = T.log_derivative_double(sample(rng).first);
    if (!std::isfinite(t)) continue;  // terminal point
    ++rep.samples;
    sum += t;
    rep.tau_min = std::min(rep.tau_min, t);
    if (t < 0) ++rep.negative;
  }
  rep.tau_mean = rep.samples ? sum / rep.samples : 0;
  if (p.word_length <= 0) return rep;

  // letters: generators, then inverses of the non-involutions
  std::vector<Moebius> letters = generators;
  std::vector<int> inv(generators.size());
  for (size_t i = 0; i < generators.size(); ++i) {
    const Moebius gi = generators[i].inverse();
    if (gi.projective_eq(generators[i])) {
      inv[i] = static_cast<int>(i);
    } else {
      inv[i] = static_cast<int>(letters.size());
      inv.push_back(static_cast<int>(i));
      letters.push_back(gi);
    }
  }

  std::vector<Word> words, layer{{Moebius::identity(), {1, 0, 0, 1}, {1, 0, 0, 1}, -1}};
  for (int len = 1; len <= p.word_length; ++len) {
    std::vector<Word> next;
    for (const auto& w : layer)
      for (size_t l = 0; l < letters.size(); ++l) {
        if (w.last >= 0 && inv[w.last] == static_cast<int>(l)) continue;
        Word v;
        v.M = letters[l] * w.M;  // apply w first
        if (v.M.projective_eq(Moebius::identity())) continue;
        v.m = to_mat(v.M);
        v.rm = to_mat(v.M.conjugate_by_R());
        v.last = static_cast<int>(l);
        next.push_back(std::move(v));
      }
    words.insert(words.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  rep.words = static_cast<long>(words.size());

  for (long k = 0; k < p.search_samples; ++k) {
    const auto [x, y] = sample(rng);
    const double tT = T.log_derivative_double(x);
    if (!std::isfinite(tT)) continue;
    for (const auto& w : words) {
      const double s = w.m[2] * x + w.m[3];
      if (s == 0) continue;
      const double tN = -2 * std::log(std::abs(s));
      if (!(tN >= 0 && tN < tT - p.margin)) continue;
      const double yd = w.rm[2] * y + w.rm[3];
      if (yd == 0) continue;
      if (strictly_inside(cells, apply(w.m, x), apply(w.rm, y), p.margin)) {
        rep.competitors.push_back({x, y, w.M, tN, tT});
        break;
      }
    }
  }
  return rep;
}

}  // namespace mdyn
