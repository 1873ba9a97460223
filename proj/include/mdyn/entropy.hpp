// Entropy of piecewise Moebius maps: Rohlin's integral against the marginal of
// mu on a bijectivity domain, Birkhoff averages along floating orbits, and the
// induced-map and quilting formulas.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mdyn/maps.hpp"
#include "mdyn/quilting.hpp"
#include "mdyn/region.hpp"

namespace mdyn {

struct EntropyEstimate {
  double value = 0;
  double error = 0;
  std::string method;  // rohlin | birkhoff | abramov | quilt
  long n = 0;          // orbit length (birkhoff) or integration intervals (rohlin)
  std::uint64_t seed = 0;
  long burn_in = 0;
  long restarts = 0;   // birkhoff orbits restarted after hitting a pole
};

struct RohlinParams {
  double w_min = 1e-6;  // cylinder resolution; narrower accumulation zones are integrated pointwise
  double tol = 1e-12;   // relative quadrature tolerance per interval
};

// Integral of log_deriv against fiber_mass(R, x) dx / mu(R).  `breaks` are
// points where log_deriv is not smooth, besides the cell boundaries of R.
EntropyEstimate rohlin_integral(const std::function<double(double)>& log_deriv, const Region& R,
                                std::vector<double> breaks = {}, double tol = 1e-12);

// Rohlin integral with ln|T'| = -2 ln|cx + d| on each cylinder.
EntropyEstimate rohlin_entropy(const PiecewiseMap& T, const Region& R, const RohlinParams& p = {});

struct BirkhoffParams {
  long n = 10'000'000;
  long burn_in = 1000;
  std::uint64_t seed = 1;
  int batches = 100;
};

// Mean of ln|T'| along a floating orbit; error is three standard errors of the
// batch means.
EntropyEstimate birkhoff_entropy(const PiecewiseMap& T, const BirkhoffParams& p = {});

// h(T_E) = h(T) / mu(E) for the induced map on E, mu normalised.
double abramov(double h, double mass_fraction);

struct QuiltTerm {
  int a = 0, d = 0;
  double nu = 0;  // marginal mass of the piece, normalised by mu(omega_f)
};
double quilt_entropy(double h_f, const std::vector<QuiltTerm>& pieces);
std::vector<QuiltTerm> quilt_terms(const QuiltReport& report);

struct EntropyMassProduct {
  double product = 0;  // w h mu(R)
  double volume = 0;
  double ratio = 0;    // product / volume
};
// w = 2 for the Nakada family, whose group is the modular group (volume pi^2/3).
EntropyMassProduct entropy_mass_product(double h, double mass, int w, double volume);
EntropyMassProduct entropy_mass_product(double h, double mass, int w = 2);

}  // namespace mdyn
