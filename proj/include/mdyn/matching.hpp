// Matching of the endpoint orbits T^m(l0) = T^n(r0), close neighbours and
// matching relations.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mdyn/maps.hpp"

namespace mdyn {

struct MatchingWitness {
  int m = 0, n = 0;
  Scalar value;                                // T^m(l0) = T^n(r0)
  std::vector<Scalar> left_orbit, right_orbit;  // l_0..l_m and r_0..r_n
  std::vector<Digit> left_word, right_word;     // digits applied, lengths m and n
  Moebius L, R;  // prefix products of lengths m-1 and n-1
};

enum class MatchStatus { matched, terminating, unknown };

struct MatchingResult {
  MatchStatus status = MatchStatus::unknown;
  std::optional<MatchingWitness> witness;
  int horizon = 0;
  // Full orbits as computed (left orbit with right limits, right orbit with left limits).
  std::vector<OrbitPoint> left, right;
};

// The l0-orbit follows right limits and the r0-orbit left limits.  A common
// terminal value (the orbit reaching 0 or an accumulation point) is reported as
// `terminating`, not as a match.
MatchingResult detect_matching(const PiecewiseMap& T, int horizon = 200);

struct NeighbourCheck {
  bool ok = false;
  std::string reason;
};
NeighbourCheck close_neighbors(const PiecewiseMap& f, const MatchingWitness& wf,
                               const PiecewiseMap& g, const MatchingWitness& wg);

// M L S^-1 = R projectively, S the shift by the interval length.
bool verify_matching_relation(const MatchingWitness& w, const Moebius& M, const Scalar& length);
// The unique M with M L S^-1 = R.
Moebius matching_relation(const MatchingWitness& w, const Scalar& length);

struct ScanRow {
  Scalar alpha;
  MatchStatus status = MatchStatus::unknown;
  int m = 0, n = 0;
  Scalar value;
  bool typical = false;  // exponents shared with a grid neighbour
};
// Parameters must be sorted; the typical flag compares grid neighbours.
std::vector<ScanRow> match_scan(Family family, int n, const std::vector<Scalar>& alphas,
                                int horizon = 200);

}  // namespace mdyn
