#include "mdyn/entropy.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace mdyn {
namespace {

struct FiberD {
  std::vector<std::pair<double, double>> ys;
  // integral of dy / (1 + xy)^2 over the fiber
  double operator()(double x) const {
    double m = 0;
    for (const auto& [c, d] : ys) m += (d - c) / ((1 + x * c) * (1 + x * d));
    return m;
  }
};

FiberD fiber_of(const Cell& c) {
  FiberD f;
  for (const auto& iv : c.ys) f.ys.emplace_back(iv.lo.to_double(), iv.hi.to_double());
  return f;
}

// Endpoint singularities allowed: x = a + (b - a)(3t^2 - 2t^3) flattens both
// ends before adaptive Gauss-Kronrod.
template <class F>
double integrate_singular(const F& f, double a, double b, double tol, double& err, unsigned depth = 15) {
  if (!(a < b)) return 0;
  const double w = b - a;
  auto g = [&](double t) {
    const double x = a + w * t * t * (3 - 2 * t);
    const double v = f(x);
    return std::isfinite(v) ? v * 6 * w * t * (1 - t) : 0.0;
  };
  double e = 0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(g, 0.0, 1.0, depth, tol, &e);
  err += e;
  return v;
}

template <class F>
double integrate_smooth(const F& f, double a, double b, double tol, double& err) {
  if (!(a < b)) return 0;
  double e = 0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 8, tol, &e);
  err += e;
  return v;
}

double finite_mass(const Region& R) {
  const double m = R.mass();
  if (!std::isfinite(m) || !(m > 0)) throw std::domain_error("Rohlin integral needs 0 < mu(R) < inf");
  return m;
}

}  // namespace

EntropyEstimate rohlin_integral(const std::function<double(double)>& log_deriv, const Region& R,
                                std::vector<double> breaks, double tol) {
  const double mass = finite_mass(R);
  std::sort(breaks.begin(), breaks.end());
  EntropyEstimate est;
  est.method = "rohlin";
  double sum = 0, err = 0;
  for (const auto& c : R.cells()) {
    const FiberD fib = fiber_of(c);
    std::vector<double> pts{c.x0.to_double()};
    for (double b : breaks)
      if (pts.front() < b && b < c.x1.to_double()) pts.push_back(b);
    pts.push_back(c.x1.to_double());
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
      sum += integrate_singular([&](double x) { return log_deriv(x) * fib(x); }, pts[i], pts[i + 1], tol, err);
      ++est.n;
    }
  }
  est.value = sum / mass;
  est.error = err / mass;
  return est;
}

EntropyEstimate rohlin_entropy(const PiecewiseMap& T, const Region& R, const RohlinParams& p) {
  const double mass = finite_mass(R);
  EntropyEstimate est;
  est.method = "rohlin";
  double sum = 0, err = 0;
  for (const auto& c : R.cells()) {
    const FiberD fib = fiber_of(c);
    const auto sp = split_by_cylinders(T, c.x0, c.x1, p.w_min);
    for (const auto& pc : sp.pieces) {
      const double cm = pc.digit.M.c.to_double(), dm = pc.digit.M.d.to_double();
      auto f = [&](double x) { return -2 * std::log(std::abs(cm * x + dm)) * fib(x); };
      sum += integrate_smooth(f, pc.lo.to_double(), pc.hi.to_double(), p.tol, err);
      ++est.n;
    }
    // accumulation zones: pointwise derivative, split at the pole of the
    // family so that the singularity sits at an endpoint
    for (const auto& [t0, t1] : sp.tails) {
      const double a = t0.to_double(), b = t1.to_double();
      auto f = [&](double x) {
        const double l = T.log_derivative_double(x);
        return std::isfinite(l) ? l * fib(x) : 0.0;
      };
      auto af = [&](double x) { return std::abs(f(x)); };
      // the integrand jumps between the unresolved cylinders, so the
      // quadrature estimate is capped by twice the L1 mass of the zone
      double e = 0, l1 = 0, unused = 0;
      const double tol = std::max(p.tol, 1e-9);
      const unsigned depth = 10;
      if (a < 0 && 0 < b) {
        sum += integrate_singular(f, a, 0, tol, e, depth) + integrate_singular(f, 0, b, tol, e, depth);
        l1 = integrate_singular(af, a, 0, tol, unused, depth) + integrate_singular(af, 0, b, tol, unused, depth);
      } else {
        sum += integrate_singular(f, a, b, tol, e, depth);
        l1 = integrate_singular(af, a, b, tol, unused, depth);
      }
      err += std::min(e, 2 * l1);
      ++est.n;
    }
  }
  est.value = sum / mass;
  est.error = err / mass;
  return est;
}

EntropyEstimate birkhoff_entropy(const PiecewiseMap& T, const BirkhoffParams& p) {
  if (!(p.n > p.burn_in) || p.burn_in < 0 || p.batches < 2)
    throw std::invalid_argument("birkhoff: need n > burn_in >= 0 and at least two batches");
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> ux(T.lo_double(), T.hi_double());
  EntropyEstimate est;
  est.method = "birkhoff";
  est.seed = p.seed;
  est.burn_in = p.burn_in;

  double x = 0;
  auto restart = [&] {
    for (;;) {
      x = ux(rng);
      bool ok = true;
      for (long k = 0; k < p.burn_in && ok; ++k) {
        x = T.step_double(x);
        ok = std::isfinite(x);
      }
      if (ok) return;
    }
  };
  restart();

  const long n = p.n - p.burn_in;
  const long per = n / p.batches;
  std::vector<double> means;
  double total = 0, batch = 0;
  long in_batch = 0;
  for (long k = 0; k < n; ++k) {
    double l = T.log_derivative_double(x);
    double y = T.step_double(x);
    while (!std::isfinite(l) || !std::isfinite(y)) {
      ++est.restarts;
      restart();
      l = T.log_derivative_double(x);
      y = T.step_double(x);
    }
    x = y;
    total += l;
    batch += l;
    if (++in_batch == per && static_cast<int>(means.size()) < p.batches) {
      means.push_back(batch / per);
      batch = 0;
      in_batch = 0;
    }
  }
  est.n = n;
  est.value = total / n;
  double mean = 0, var = 0;
  for (double m : means) mean += m;
  mean /= means.size();
  for (double m : means) var += (m - mean) * (m - mean);
  var /= means.size() - 1;
  est.error = 3 * std::sqrt(var / means.size());
  return est;
}

double abramov(double h, double mass_fraction) {
  if (!(mass_fraction > 0 && mass_fraction <= 1)) throw std::domain_error("abramov: mass fraction must lie in (0, 1]");
  return h / mass_fraction;
}

double quilt_entropy(double h_f, const std::vector<QuiltTerm>& pieces) {
  double s = 0;
  for (const auto& q : pieces) s += (q.a - q.d) * q.nu;
  if (!(1 + s > 0)) throw std::domain_error("quilt_entropy: 1 + sum (a - d) nu must be positive");
  return h_f / (1 + s);
}

std::vector<QuiltTerm> quilt_terms(const QuiltReport& report) {
  std::vector<QuiltTerm> out;
  for (const auto& g : report.groups) out.push_back({g.a, g.d, g.mass / report.mass_f});
  return out;
}

EntropyMassProduct entropy_mass_product(double h, double mass, int w, double volume) {
  EntropyMassProduct r;
  r.product = w * h * mass;
  r.volume = volume;
  r.ratio = r.product / volume;
  return r;
}

EntropyMassProduct entropy_mass_product(double h, double mass, int w) {
  return entropy_mass_product(h, mass, w, std::numbers::pi * std::numbers::pi / 3);
}

}  // namespace mdyn
