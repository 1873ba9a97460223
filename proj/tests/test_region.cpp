#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "mdyn/domains.hpp"
#include "mdyn/region.hpp"
#include "oracles.hpp"

using namespace mdyn;

namespace {

const double kLnG = std::log((1 + std::sqrt(5.0)) / 2);

bool fiber_contains(const Region& R, double x, double y, double tol) {
  for (const auto& c : R.cells()) {
    if (x < c.x0.to_double() || x > c.x1.to_double()) continue;
    for (const auto& iv : c.ys)
      if (iv.lo.to_double() - tol <= y && y <= iv.hi.to_double() + tol) return true;
  }
  return false;
}

// Planar Nakada step written from the definition, independent of the library:
// x -> eps/x - d, y -> 1/(d + eps y).
void nakada_planar(double alpha, double& x, double& y) {
  const double eps = x > 0 ? 1 : -1;
  const double d = std::floor(1 / std::abs(x) + 1 - alpha);
  x = eps / x - d;
  y = 1 / (d + eps * y);
}

Region random_box(std::mt19937_64& rng) {
  auto q = [&](long lo, long hi) { return oracle::random_rational(rng, lo, hi, 20); };
  Scalar x0 = q(0, 15), y0 = q(0, 15);
  return Region::box(x0, x0 + q(1, 5), y0, y0 + q(1, 5));
}

}  // namespace

TEST_SUITE("planar-domain") {
  TEST_CASE("mu_box agrees with quadrature on random boxes") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(-1, 1), uy(-0.4, 0.4), len(0.01, 0.6);
    double worst = 0;
    for (int k = 0; k < 1000; ++k) {
      const double a = ux(rng), c = uy(rng);
      const double b = a + len(rng), d = c + len(rng);
      const double exact = mu_box(a, b, c, d);
      const double quad = oracle::mu_quadrature(a, b, c, d, 6);
      worst = std::max(worst, std::abs(exact - quad) / quad);
    }
    CHECK(worst < 1e-8);
  }

  TEST_CASE("unit square has measure ln 2 with exact argument 1") {
    CHECK(mu_box_argument(Scalar(0), Scalar(1), Scalar(0), Scalar(1)) == Scalar(1));
    CHECK(mu_box(Scalar(0), Scalar(1), Scalar(0), Scalar(1)) == std::log(2.0));
    CHECK(Region::box(0, 1, 0, 1).mass() == std::log(2.0));
  }

  TEST_CASE("boxes touching or crossing the hyperbola") {
    CHECK(std::isinf(mu_box(Scalar(0), Scalar(1), Scalar(-1), Scalar(0))));
    CHECK(std::isinf(Region::box(0, 1, -1, 0).mass()));
    CHECK_THROWS_AS(mu_box(Scalar(0), Scalar(2), Scalar(-1), Scalar(0)), std::domain_error);
    CHECK_THROWS(mu_box_argument(Scalar(0), Scalar(1), Scalar(-1), Scalar(0)));
    CHECK(mu_box(Scalar(1), Scalar(1), Scalar(-1), Scalar(0)) == 0);
  }

  TEST_CASE("field endpoints") {
    const Scalar nu = Scalar::nu(5);
    const double exact = mu_box(Scalar(0), nu, Scalar(0), Scalar(1));
    CHECK(exact == doctest::Approx(std::log1p(nu.to_double())).epsilon(1e-15));
  }

  TEST_CASE("set operations are additive") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 40; ++k) {
      const Region A = random_box(rng).unite(random_box(rng));
      const Region B = random_box(rng);
      const double a = A.mass(), b = B.mass();
      const double u = A.unite(B).mass(), i = A.intersect(B).mass();
      CHECK(u + i == doctest::Approx(a + b).epsilon(1e-12));
      CHECK(A.subtract(B).mass() == doctest::Approx(a - i).epsilon(1e-12));
      CHECK(symmetric_difference_mass(A, B) == doctest::Approx(u - i).epsilon(1e-12));
      CHECK(A.unite(B).exact());
    }
  }

  TEST_CASE("canonical form merges equal neighbours") {
    Region r({Cell{Scalar(0), Scalar(1), {{Scalar(0), Scalar(1)}}},
              Cell{Scalar(1), Scalar(2), {{Scalar(0), Scalar(1)}}},
              Cell{Scalar(1, 2), Scalar(3, 2), {{Scalar(1, 2), Scalar(2)}}}});
    CHECK(r.cells().size() == 3);
    CHECK(r.fiber(Scalar(1)) == YSet{{Scalar(0), Scalar(2)}});
    CHECK(r.fiber(Scalar(7, 4)) == YSet{{Scalar(0), Scalar(1)}});
    const YSet a{{Scalar(0), Scalar(1)}, {Scalar(2), Scalar(3)}};
    const YSet b{{Scalar(1, 2), Scalar(5, 2)}};
    CHECK(yset_union(a, b) == YSet{{Scalar(0), Scalar(3)}});
    CHECK(yset_intersection(a, b) == YSet{{Scalar(1, 2), Scalar(1)}, {Scalar(2), Scalar(5, 2)}});
    CHECK(yset_difference(a, b) == YSet{{Scalar(0), Scalar(1, 2)}, {Scalar(5, 2), Scalar(3)}});
    CHECK(yset_length(a) == Scalar(2));
  }

  TEST_CASE("planar maps preserve mu") {
    std::mt19937_64 rng(3);
    const auto T = PiecewiseMap::nakada(Scalar(39, 100));
    for (long d = 2; d <= 9; ++d)
      for (int eps : {1, -1}) {
        auto cyls = T.cylinders(T.make_digit({eps, d}));
        if (cyls.empty()) continue;
        const auto& cy = cyls.front();
        const Scalar y0 = oracle::random_rational(rng, 0, 10, 40);
        const Cell c{cy.lo, cy.hi, {{y0, y0 + Scalar(1, 3)}}};
        const Cell img = cell_image(cy.digit.M, c);
        CHECK(Region({img}).mass() == doctest::Approx(Region({c}).mass()).epsilon(1e-12));
      }
    CHECK_THROWS_AS(cell_image(mat::nakada_M(1, 2), Cell{Scalar(-1), Scalar(1), {{Scalar(0), Scalar(1)}}}),
                    PoleError);
  }

  TEST_CASE("Z conjugation brackets the measure") {
    const Region R = Region::box(Scalar(0), Scalar(1), Scalar(-1, 2), Scalar(0))
                         .unite(Region::box(Scalar(0), Scalar(1, 2), Scalar(-1, 2), Scalar(1)));
    const double m = R.mass();
    const double out8 = z_conjugate(R, 8, true).lebesgue_area();
    const double in8 = z_conjugate(R, 8, false).lebesgue_area();
    const double out64 = z_conjugate(R, 64, true).lebesgue_area();
    const double in64 = z_conjugate(R, 64, false).lebesgue_area();
    CHECK(in8 <= in64);
    CHECK(in64 <= m);
    CHECK(m <= out64);
    CHECK(out64 <= out8);
    CHECK(out64 - in64 < 0.05 * m);
    const Region back = z_inverse(z_conjugate(R, 64, false), 64, false);
    CHECK(R.subtract(back).mass() >= 0);
    CHECK(back.subtract(R).mass() < 1e-12);
  }

  TEST_CASE("Nakada Lambda masses") {
    const auto one = nakada_lambda(Scalar(1));
    CHECK(one.converged);
    CHECK(one.region.mass() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    for (const char* a : {"39/100", "2/5", "1/2"}) {
      const auto L = nakada_lambda(Scalar::parse(a));
      CHECK(L.converged);
      CHECK(L.region.mass() == doctest::Approx(kLnG).epsilon(1e-9));
    }
    const auto L7 = nakada_lambda(Scalar(7, 10));
    CHECK(L7.region.mass() == doctest::Approx(std::log(1.7)).epsilon(1e-9));
    CHECK(nakada_alpha_digit(Scalar(39, 100)) == 3);
  }

  TEST_CASE("Lambda is the attractor of forward orbits") {
    std::mt19937_64 rng(17);
    for (const char* a : {"39/100", "7/10"}) {
      const double alpha = Scalar::parse(a).to_double();
      const auto L = nakada_lambda(Scalar::parse(a)).region;
      std::uniform_real_distribution<double> ux(alpha - 1, alpha), uy(0, 1);
      int inside = 0, total = 0;
      for (int k = 0; k < 300; ++k) {
        double x = ux(rng), y = uy(rng);
        bool ok = true;
        for (int s = 0; s < 40 && ok; ++s) {
          if (x == 0) {
            ok = false;
            break;
          }
          nakada_planar(alpha, x, y);
        }
        if (!ok) continue;
        ++total;
        inside += fiber_contains(L, x, y, 1e-6);
      }
      CHECK(total > 250);
      CHECK(inside == total);
    }
  }

  TEST_CASE("endpoint partition holds the endpoint orbits") {
    const auto T = PiecewiseMap::nakada(Scalar(39, 100));
    const auto P = endpoint_partition(T);
    for (const char* v : {"-61/100", "-17/39", "5/17", "-22/61", "-5/22", "0", "39/100"})
      CHECK(std::binary_search(P.begin(), P.end(), Scalar::parse(v)));
  }

  TEST_CASE("explicit CKS domains") {
    const Region O = cks_omega_one(3);
    REQUIRE(O.cells().size() == 2);
    CHECK(O.fiber(Scalar(1, 2)) == YSet{{Scalar(-1), Scalar(0)}});
    CHECK(O.fiber(Scalar(3, 2)) == YSet{{Scalar(-1, 2), Scalar(0)}});
    CHECK(std::isinf(O.mass()));

    const Region G = accelerated_gamma(3);
    REQUIRE(G.cells().size() == 2);
    CHECK(G.cells()[0].x1 == Scalar(1, 3));
    CHECK(G.x_max() == Scalar(8, 5));
    CHECK(G.exact());
    for (int n : {3, 4, 5}) {
      const Region g = accelerated_gamma(n);
      double quad = 0;
      for (const auto& c : g.cells())
        for (const auto& iv : c.ys)
          quad += oracle::mu_quadrature(c.x0.to_double(), c.x1.to_double(), iv.lo.to_double(),
                                        iv.hi.to_double());
      CHECK(g.mass() == doctest::Approx(quad).epsilon(1e-8));
      CHECK(static_cast<int>(g.cells().size()) == n - 1);
    }
  }

  TEST_CASE("gridded fixed point") {
    const auto one = fixed_point_domain(PiecewiseMap::nakada(Scalar(1)), 30, 0.01);
    CHECK(one.displacement == 0);
    CHECK(one.region.mass() == doctest::Approx(std::log(2.0)).epsilon(1e-9));

    const auto L = nakada_lambda(Scalar(39, 100)).region;
    const auto fp = fixed_point_domain(PiecewiseMap::nakada(Scalar(39, 100)), 60, 0.001);
    CHECK(symmetric_difference_mass(fp.region, L) < 0.02 * L.mass());
  }
}
