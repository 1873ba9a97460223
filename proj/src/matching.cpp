#include "mdyn/matching.hpp"

#include <map>
#include <stdexcept>

namespace mdyn {
namespace {

Moebius prefix_product(const std::vector<OrbitPoint>& orb, int len) {
  Moebius P;
  for (int i = 0; i < len; ++i) P = orb[i].digit->M * P;
  return P;
}

}  // namespace

MatchingResult detect_matching(const PiecewiseMap& T, int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  MatchingResult res;
  res.horizon = horizon;
  const Scalar l0 = T.lo();
  const Scalar r0 = T.hi();
  res.left = T.orbit(l0, horizon, Side::right);
  res.right = T.orbit(r0, horizon, Side::left);

  // value string -> first index on the right orbit
  std::map<std::string, int> right_index;
  for (size_t j = 0; j < res.right.size(); ++j) {
    if (!res.right[j].digit) break;  // terminal values never count as a match
    right_index.emplace(res.right[j].value.str(), static_cast<int>(j));
  }
  int best_m = -1, best_n = -1;
  for (size_t i = 0; i < res.left.size(); ++i) {
    if (!res.left[i].digit) break;
    auto it = right_index.find(res.left[i].value.str());
    if (it == right_index.end()) continue;
    const int m = static_cast<int>(i), n = it->second;
    if (m == 0 && n == 0) continue;
    if (best_m < 0 || m + n < best_m + best_n) {
      best_m = m;
      best_n = n;
    }
  }
  if (best_m >= 1 && best_n >= 1) {
    MatchingWitness w;
    w.m = best_m;
    w.n = best_n;
    w.value = res.left[best_m].value;
    for (int i = 0; i <= best_m; ++i) w.left_orbit.push_back(res.left[i].value);
    for (int j = 0; j <= best_n; ++j) w.right_orbit.push_back(res.right[j].value);
    for (int i = 0; i < best_m; ++i) w.left_word.push_back(*res.left[i].digit);
    for (int j = 0; j < best_n; ++j) w.right_word.push_back(*res.right[j].digit);
    w.L = prefix_product(res.left, best_m - 1);
    w.R = prefix_product(res.right, best_n - 1);
    res.status = MatchStatus::matched;
    res.witness = std::move(w);
    return res;
  }
  const bool lt = !res.left.back().digit, rt = !res.right.back().digit;
  res.status = (lt && rt) ? MatchStatus::terminating : MatchStatus::unknown;
  return res;
}

NeighbourCheck close_neighbors(const PiecewiseMap& f, const MatchingWitness& wf,
                               const PiecewiseMap& g, const MatchingWitness& wg) {
  if (wf.m != wg.m || wf.n != wg.n) return {false, "matching exponents differ"};
  auto same_word = [](const std::vector<Digit>& a, const std::vector<Digit>& b) {
    for (size_t i = 0; i < a.size(); ++i)
      if (!a[i].M.projective_eq(b[i].M)) return false;
    return true;
  };
  // adjacent matching intervals can share exponents
  if (!same_word(wf.left_word, wg.left_word) || !same_word(wf.right_word, wg.right_word))
    return {false, "matching digit words differ"};
  const Scalar lo = f.lo() < g.lo() ? g.lo() : f.lo();
  const Scalar hi = f.hi() < g.hi() ? f.hi() : g.hi();
  auto inside = [&](const Scalar& x) { return lo <= x && x < hi; };
  for (const auto* w : {&wf, &wg}) {
    for (int i = 1; i <= w->m; ++i)
      if (!inside(w->left_orbit[i]))
        return {false, "left orbit point " + w->left_orbit[i].str() + " outside the common interval"};
    for (int j = 1; j <= w->n; ++j)
      if (!inside(w->right_orbit[j]))
        return {false, "right orbit point " + w->right_orbit[j].str() + " outside the common interval"};
  }
  return {true, ""};
}

bool verify_matching_relation(const MatchingWitness& w, const Moebius& M, const Scalar& length) {
  return (M * w.L * mat::shift(-length)).projective_eq(w.R);
}

Moebius matching_relation(const MatchingWitness& w, const Scalar& length) {
  return w.R * mat::shift(length) * w.L.inverse();
}

std::vector<ScanRow> match_scan(Family family, int n, const std::vector<Scalar>& alphas,
                                int horizon) {
  std::vector<ScanRow> rows;
  for (const auto& a : alphas) {
    PiecewiseMap T = family == Family::nakada ? PiecewiseMap::nakada(a) : PiecewiseMap::cks(n, a);
    auto r = detect_matching(T, horizon);
    ScanRow row;
    row.alpha = a;
    row.status = r.status;
    if (r.witness) {
      row.m = r.witness->m;
      row.n = r.witness->n;
      row.value = r.witness->value;
    }
    rows.push_back(std::move(row));
  }
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].status != MatchStatus::matched) continue;
    auto same = [&](size_t j) {
      return rows[j].status == MatchStatus::matched && rows[j].m == rows[i].m &&
             rows[j].n == rows[i].n;
    };
    rows[i].typical = (i > 0 && same(i - 1)) || (i + 1 < rows.size() && same(i + 1));
  }
  return rows;
}

}  // namespace mdyn
