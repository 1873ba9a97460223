// Fibered planar regions: finite unions of cells [x0, x1] x Y with Y a finite
// union of y-intervals, and the measure dmu = dx dy / (1 + xy)^2.
#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdyn/moebius.hpp"

namespace mdyn {

struct YInterval {
  Scalar lo, hi;
  bool operator==(const YInterval&) const = default;
};
// Sorted, pairwise disjoint, each with lo < hi.
using YSet = std::vector<YInterval>;

YSet yset_normalize(YSet v);  // sort and merge overlapping or touching pieces
YSet yset_union(const YSet& a, const YSet& b);
YSet yset_intersection(const YSet& a, const YSet& b);
YSet yset_difference(const YSet& a, const YSet& b);
Scalar yset_length(const YSet& a);

struct Cell {
  Scalar x0, x1;
  YSet ys;
  bool exact = true;  // false when endpoints came from floating computations
};

// Thrown when an interval contains the pole of the Moebius map being applied.
struct PoleError : std::domain_error {
  PoleError(const std::string& what, Scalar p) : std::domain_error(what), pole(std::move(p)) {}
  Scalar pole;
};

// mu([a,b] x [c,d]) = log1p(r), r = (b-a)(d-c) / ((1+bc)(1+ad)).
// +inf when a corner lies on y = -1/x (and the box has positive area);
// throws std::domain_error when the box crosses the hyperbola.
double mu_box(const Scalar& a, const Scalar& b, const Scalar& c, const Scalar& d);
double mu_box(double a, double b, double c, double d);
// The exact argument r above (throws for infinite or crossing boxes).
Scalar mu_box_argument(const Scalar& a, const Scalar& b, const Scalar& c, const Scalar& d);

// Image under T_M(x, y) = (M x, R M R^-1 y).
Cell cell_image(const Moebius& M, const Cell& c);

class Region {
 public:
  Region() = default;
  // Union of arbitrary (possibly overlapping) cells, brought to canonical form:
  // x-sorted, disjoint interiors, adjacent cells with equal fibers merged.
  explicit Region(std::vector<Cell> cells);
  static Region box(const Scalar& x0, const Scalar& x1, const Scalar& y0, const Scalar& y1);

  const std::vector<Cell>& cells() const { return cells_; }
  bool empty() const { return cells_.empty(); }
  bool exact() const;
  Scalar x_min() const;
  Scalar x_max() const;
  double y_min() const;
  double y_max() const;

  double mass() const;  // may be +inf
  double lebesgue_area() const;
  // Fiber over x; at a cell boundary the cell to the right wins.
  YSet fiber(const Scalar& x) const;
  double fiber_mass(double x) const;  // sum (d-c)/((1+xc)(1+xd))
  double fiber_mass(const Scalar& x) const { return fiber_mass(x.to_double()); }

  Region unite(const Region& o) const;
  Region intersect(const Region& o) const;
  Region subtract(const Region& o) const;
  // Restriction to x in [a, b].
  Region restrict_x(const Scalar& a, const Scalar& b) const;

 private:
  struct CellD {
    double x0, x1;
    std::vector<std::pair<double, double>> ys;
  };
  void build_cache();
  std::vector<Cell> cells_;
  std::vector<CellD> cache_;
};

double symmetric_difference_mass(const Region& a, const Region& b);

// Union of a list of cells together with the part covered at least twice.
struct OverlapResult {
  Region uni, overlap;
};
OverlapResult union_with_overlap(const std::vector<Cell>& cells);

// Z(x, y) = (x, y / (1 + xy)).  The curved image fibers are bracketed on
// `slabs` x-slabs per cell: outer (containing) or inner (contained) enclosure.
Region z_conjugate(const Region& r, int slabs, bool outer = true);
Region z_inverse(const Region& r, int slabs, bool outer = true);

}  // namespace mdyn
