// Quilting: building a planar domain for g from one for a nearby map f by
// deleting forward F-images and adding forward G-images of the region where
// the digits of f and g disagree.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mdyn/bijectivity.hpp"
#include "mdyn/maps.hpp"
#include "mdyn/region.hpp"

namespace mdyn {

// Maximal intervals of I_f n I_g on which both digits are constant and differ.
struct DeltaPiece {
  Scalar lo, hi;
  Digit f_digit, g_digit;
  Moebius rel;  // g-digit * f-digit^-1
};
struct DigitDifference {
  std::vector<DeltaPiece> pieces;
  // accumulation neighbourhoods not resolved into pieces
  std::vector<std::pair<Scalar, Scalar>> tails;
};
DigitDifference digit_difference_set(const PiecewiseMap& f, const PiecewiseMap& g,
                                     double w_min = 1e-9);

// Cells of omega_f over the explicit pieces of delta.
Region lift_region(const Region& omega_f, const DigitDifference& delta);

struct QuiltPiece {
  // Tracked source: either F(C_i) (kind "first-image", the part of omega_f over
  // an x-interval of I_f minus I_g) or C_i itself (kind "direct").
  std::string kind;
  Scalar lo, hi;
  Region source;
  double mass = 0;  // mu(C_i)
  int d = 0, a = 0;  // F^(1+d) = G^(1+a) on C_i
  Moebius word_f, word_g;  // the two words, equal projectively
};

// Adjacent pieces with the same kind and exponents.
struct QuiltGroup {
  std::string kind;
  Scalar lo, hi;
  int d = 0, a = 0;
  double mass = 0;
  int count = 0;
};

struct QuiltReport {
  bool established = false;
  std::string failure;
  DigitDifference delta;
  std::vector<QuiltPiece> pieces;
  std::vector<QuiltGroup> groups;
  Region deleted, added, omega_g;
  double deleted_overlap = 0;   // pairwise overlaps among the F^j(C_i)
  double deleted_outside = 0;   // part of the deleted cells outside omega_f
  double added_overlap = 0;     // pairwise overlaps among the G^j(C_i)
  double added_collision = 0;   // added cells meeting the kept part of omega_f
  double defect = 0;
  double deleted_ratio = 0;     // mu(deleted) / mu(omega_f), must be < 1
  double unresolved = 0;        // mu of source parts lost in cylinder tails
  double entropy_factor = 1;    // (1 + sum (a_i - d_i) mu(C_i)/mu(omega_f))^-1
  double mass_f = 0, mass_g = 0;
  std::optional<BijectivityReport> bijectivity;
};

struct QuiltParams {
  int max_steps = 64;
  long max_tracks = 200000;   // orbit pieces examined before giving up
  double tol = 1e-9;          // disjointness, relative to mu(omega_f)
  double w_min = 1e-9;        // cylinder resolution while refining pieces
  bool check_bijectivity = true;
  double bijectivity_tol = 1e-6;
};

QuiltReport quilt(const PiecewiseMap& f, const PiecewiseMap& g, const Region& omega_f,
                  const QuiltParams& p = {});

struct TransferSummary {
  bool transferred = false;
  std::string reason;
  bool ergodic = false;
  bool natural_extension = false;
  bool isomorphic = false;      // every a_i = d_i
  double entropy_factor = 1;    // h(g) = factor * h(f)
  double mass_ratio = 1;        // mu(omega_f) / mu(omega_g); equals the factor
};
TransferSummary transfer_properties(const QuiltReport& report, const Certificate& certificate_f,
                                    double tol = 1e-6);

}  // namespace mdyn
