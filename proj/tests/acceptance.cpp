// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "mdyn/arnoux.hpp"
#include "mdyn/bijectivity.hpp"
#include "mdyn/domains.hpp"
#include "mdyn/entropy.hpp"
#include "mdyn/quilting.hpp"
#include "oracles.hpp"

using namespace mdyn;

namespace {

const double kPi2 = std::numbers::pi * std::numbers::pi;
const double kGauss = kPi2 / (6 * std::numbers::ln2);

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += "failed: " + what;
    }
  }
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

void criterion(int k, const char* title, double budget_s, const std::function<void(Outcome&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.note(std::string("exception: ") + e.what());
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (s > budget_s) {
    o.pass = false;
    o.note("over time budget");
  }
  if (!o.pass) ++failures;
  std::printf("criterion %2d: %s  %s (%.1f s of %.0f s) %s\n", k, o.pass ? "PASS" : "FAIL", title, s, budget_s,
              o.detail.c_str());
  std::fflush(stdout);
}

Scalar random_rational(std::mt19937_64& rng, long den) {
  std::uniform_int_distribution<long> u(0, den);
  return Scalar(u(rng), den);
}

double birkhoff_n = 1e7;

EntropyEstimate birkhoff(const PiecewiseMap& T, std::uint64_t seed) {
  BirkhoffParams p;
  p.n = static_cast<long>(birkhoff_n);
  p.seed = seed;
  return birkhoff_entropy(T, p);
}

}  // namespace

int main() {
  criterion(1, "exact Nakada endpoint orbits at 39/100", 1, [](Outcome& o) {
    const auto T = PiecewiseMap::nakada(Scalar(39, 100));
    const auto r = T.orbit(Scalar(39, 100), 2, Side::left);
    const auto l = T.orbit(Scalar(-61, 100), 2, Side::right);
    o.require(r[1].value == Scalar(-17, 39), "r1 = -17/39");
    o.require(r[2].value == Scalar(5, 17), "r2 = 5/17");
    o.require(l[1].value == Scalar(-22, 61), "l1 = -22/61");
    o.require(l[2].value == Scalar(-5, 22), "l2 = -5/22");
    o.require(nakada_alpha_digit(Scalar(39, 100)) == 3, "d(alpha) = 3");
  });

  criterion(2, "digit matrix identities", 1, [](Outcome& o) {
    std::mt19937_64 rng(2);
    int bad = 0;
    for (long d = 1; d <= 20; ++d) {
      bad += !mat::nakada_M(1, d).projective_eq(mat::nakada_M(-1, d + 1) * mat::W());
      for (int e : {1, -1}) bad += !mat::nakada_N(e, d).projective_eq(mat::nakada_M(e, d).conjugate_by_R());
      for (int i = 0; i < 100; ++i) {
        const Scalar y = random_rational(rng, 9973);
        bad += !(mat::nakada_N(1, d).apply(ExtReal(y)) == mat::nakada_N(-1, d + 1).apply(ExtReal(Scalar(1) - y)));
      }
    }
    o.require(bad == 0, std::to_string(bad) + " identities");
  });

  criterion(3, "mu_box against quadrature", 10, [](Outcome& o) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ux(-1, 1), uy(-0.4, 0.4), len(0.01, 0.6);
    double worst = 0;
    for (int k = 0; k < 1000; ++k) {
      const double a = ux(rng), c = uy(rng), b = a + len(rng), d = c + len(rng);
      const double q = oracle::mu_quadrature(a, b, c, d, 6);
      worst = std::max(worst, std::abs(mu_box(a, b, c, d) - q) / q);
    }
    o.note("worst relative error " + fmt("%.2e", worst));
    o.require(worst < 1e-8, "relative error < 1e-8");
    o.require(mu_box_argument(Scalar(0), Scalar(1), Scalar(0), Scalar(1)) == Scalar(1), "mu([0,1]^2) = ln 1+1");
    o.require(mu_box(Scalar(0), Scalar(1), Scalar(0), Scalar(1)) == std::log(2.0), "mu([0,1]^2) = ln 2");
    o.require(std::isinf(mu_box(Scalar(0), Scalar(1), Scalar(-1), Scalar(0))), "[0,1]x[-1,0] infinite");
  });

  criterion(4, "Omega_{n,1} bijective with defect 0", 10, [](Outcome& o) {
    for (int n : {3, 4}) {
      const auto rep = check_bijectivity(PiecewiseMap::cks(n, Scalar(1)), cks_omega_one(n), 0);
      o.require(rep.pass && rep.defect == 0, "n = " + std::to_string(n));
    }
    const Region O = cks_omega_one(3);
    const Region cut(std::vector<Cell>(O.cells().begin(), O.cells().end() - 1));
    o.require(!check_bijectivity(PiecewiseMap::cks(3, Scalar(1)), cut, 1e-9).pass, "corrupted region rejected");
  });

  criterion(5, "accelerated maps certified for n = 3, 4, 5", 60, [](Outcome& o) {
    CertifyParams p;
    p.w_min = 1e-3;
    for (int n : {3, 4, 5}) {
      const auto c = certify(PiecewiseMap::cks_accelerated(n), accelerated_gamma(n), p);
      const bool power = c.r > 0 && std::pow(c.rho, c.r - 1) * c.B < c.b;
      o.require(c.granted && power, "n = " + std::to_string(n));
      o.note("n=" + std::to_string(n) + " r=" + std::to_string(c.r));
    }
    CertifyParams q;
    q.w_min = 1e-4;
    const auto neg = certify(PiecewiseMap::cks(3, Scalar(1)), cks_omega_one(3), q);
    o.require(!neg.granted && std::find(neg.failed.begin(), neg.failed.end(), "b") != neg.failed.end(),
              "T_{3,1} fails (b)");
  });

  criterion(6, "Nakada fiber symmetry and Lambda bijectivity", 60, [](Outcome& o) {
    for (const char* a : {"39/100", "2/5"}) {
      const Scalar alpha = Scalar::parse(a);
      const Region L = nakada_lambda(alpha).region;
      const long d0 = nakada_alpha_digit(alpha);
      double gap = 0;
      for (const auto& fs : nakada_fiber_symmetry(L, alpha, {d0 + 1, d0 + 2, d0 + 3, d0 + 4, d0 + 5}, 1e-9))
        gap = std::max(gap, fs.gap);
      o.require(gap < 1e-9, std::string("gap at ") + a);
      o.require(check_bijectivity(PiecewiseMap::nakada(alpha), L, 1e-9).pass, std::string("bijectivity at ") + a);
    }
  });

  criterion(7, "CKS quilt 0.14 -> 0.135 and back", 120, [](Outcome& o) {
    const auto f = PiecewiseMap::cks(3, Scalar(14, 100)), g = PiecewiseMap::cks(3, Scalar(135, 1000));
    const Region H = hull_domain(f).region;
    const auto fwd = quilt(f, g, H);
    o.require(fwd.established, "forward quilt established");
    if (!fwd.established) return;
    bool exps = !fwd.groups.empty();
    for (const auto& q : fwd.groups) exps = exps && q.d + 1 == 3 && q.a + 1 == 6;
    o.require(exps, "exponents (3, 6)");
    o.require(fwd.bijectivity && fwd.bijectivity->pass && fwd.bijectivity->defect < 1e-6 * fwd.mass_g,
              "forward bijectivity");
    const auto back = quilt(g, f, fwd.omega_g);
    o.require(back.established, "reverse quilt established");
    if (!back.established) return;
    const double sd = symmetric_difference_mass(back.omega_g, H);
    o.note("defect " + fmt("%.2e", fwd.bijectivity->defect) + ", recovery " + fmt("%.2e", sd));
    o.require(back.bijectivity && back.bijectivity->pass, "reverse bijectivity");
    o.require(sd < 1e-6 * H.mass(), "recovers Omega_0.14");
  });

  criterion(8, "entropy of the Gauss map and entropy x mass", 600, [](Outcome& o) {
    const auto T = PiecewiseMap::nakada(Scalar(1));
    const auto b = birkhoff(T, 7);
    const auto r = rohlin_entropy(T, nakada_lambda(Scalar(1)).region);
    o.note("birkhoff " + fmt("%.6f", b.value) + ", rohlin " + fmt("%.10f", r.value));
    o.require(std::abs(b.value - kGauss) < 0.005 * kGauss, "birkhoff within 0.5%");
    o.require(std::abs(r.value - kGauss) < 1e-6, "rohlin within 1e-6");
    for (const Scalar a : {Scalar(1), Scalar(1, 2), Scalar(39, 100)}) {
      const Region L = nakada_lambda(a).region;
      const auto Ta = PiecewiseMap::nakada(a);
      const double hr = rohlin_entropy(Ta, L).value, hb = birkhoff(Ta, 11).value;
      for (double h : {hr, hb}) {
        const auto m = entropy_mass_product(h, L.mass());
        o.require(std::abs(m.ratio - 1) < 0.01, "2 h mu at " + a.str());
      }
    }
  });

  criterion(9, "quilting entropy formula against Birkhoff", 600, [](Outcome& o) {
    struct Pair {
      PiecewiseMap f, g;
      Region omega;
      std::string name;
    };
    std::vector<Pair> pairs;
    pairs.push_back({PiecewiseMap::nakada(Scalar(7, 10)), PiecewiseMap::nakada(Scalar(699, 1000)),
                     nakada_lambda(Scalar(7, 10)).region, "nakada 7/10"});
    pairs.push_back({PiecewiseMap::nakada(Scalar(39, 100)), PiecewiseMap::nakada(Scalar(38999, 100000)),
                     nakada_lambda(Scalar(39, 100)).region, "nakada 39/100"});
    const auto cf = PiecewiseMap::cks(3, Scalar(14, 100));
    pairs.push_back({cf, PiecewiseMap::cks(3, Scalar(135, 1000)), hull_domain(cf).region, "cks 0.14"});
    for (const auto& p : pairs) {
      const auto rep = quilt(p.f, p.g, p.omega);
      if (!rep.established) {
        o.require(false, p.name + " quilt");
        continue;
      }
      const auto hf = rohlin_entropy(p.f, p.omega);
      const auto terms = quilt_terms(rep);
      const double pred = quilt_entropy(hf.value, terms);
      // quadrature error of h_f plus the mass lost in unresolved tails
      const double pred_err = hf.error * pred / hf.value + pred * rep.unresolved / rep.mass_f;
      const auto bg = birkhoff(p.g, 13);
      o.note(p.name + ": predicted " + fmt("%.5f", pred) + ", birkhoff " + fmt("%.5f", bg.value) + " +- " +
             fmt("%.5f", bg.error));
      o.require(std::abs(pred - bg.value) <= pred_err + bg.error, p.name);
    }
  });

  criterion(10, "flow relation and return times", 30, [](Outcome& o) {
    const Scalar a(1, 2);
    const auto T = PiecewiseMap::nakada(a);
    const Region L = nakada_lambda(a).region;
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> ux(T.lo_double(), T.hi_double()), u(0, 1);
    double worst = 0;
    long branch[2] = {0, 0}, count = 0;
    while (count < 10000) {
      const Scalar x = Scalar::from_double(ux(rng));
      const auto fib = L.fiber(x);
      const auto dg = T.digit_at(x);
      if (fib.empty() || !dg) continue;
      const auto& iv = fib[std::min<size_t>(fib.size() - 1, static_cast<size_t>(u(rng) * fib.size()))];
      const Scalar y = iv.lo + (iv.hi - iv.lo) * Scalar::from_double(u(rng));
      const auto s = verify_flow_relation(dg->M, x, y / (Scalar(1) + x * y));
      worst = std::max(worst, s.residual);
      ++branch[s.det > 0];
      ++count;
    }
    o.note("max residual " + fmt("%.1e", worst) + ", det -1/+1 samples " + std::to_string(branch[0]) + "/" +
           std::to_string(branch[1]));
    o.require(worst < 1e-10 && branch[0] > 0 && branch[1] > 0, "residual < 1e-10 on both branches");
    FirstReturnParams p;
    p.samples = 100000;
    const auto fr = first_return_diagnostics(PiecewiseMap::nakada(Scalar(1)), nakada_lambda(Scalar(1)).region,
                                             nakada_generators(1), p);
    o.require(fr.negative == 0 && fr.tau_min >= 0 && fr.samples >= 99000, "tau >= 0 on Lambda_1");
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures ? 1 : 0;
}
