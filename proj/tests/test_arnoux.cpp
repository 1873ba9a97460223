#include <cmath>
#include <random>

#include "doctest.h"
#include "mdyn/arnoux.hpp"
#include "mdyn/domains.hpp"

using namespace mdyn;

namespace {

Scalar rand_q(std::mt19937_64& rng, long lo, long hi, long den = 997) {
  std::uniform_int_distribution<long> u(lo * den, hi * den);
  return Scalar(u(rng), den);
}

// Z(x, y) = (x, y / (1 + xy)) and its inverse, exact.
Scalar z_y(const Scalar& x, const Scalar& y) { return y / (Scalar(1) + x * y); }
Scalar z_inv_y(const Scalar& x, const Scalar& y) { return y / (Scalar(1) - x * y); }

}  // namespace

TEST_SUITE("arnoux") {
  TEST_CASE("leb_step basics") {
    const Scalar x(3, 7), y(-2, 5);
    const auto [x1, y1] = leb_step(Moebius::identity(), x, y);
    CHECK(x1 == x);
    CHECK(y1 == y);
    CHECK_THROWS_AS(leb_step(mat::nakada_M(1, 2), Scalar(0), y), std::domain_error);

    // sign of the representative does not matter
    const Moebius M = mat::nakada_M(-1, 3);
    CHECK(leb_step(M, x, y) == leb_step(M.negated(), x, y));
    CHECK(tau(M, x) == tau(M.negated(), x));
  }

  TEST_CASE("leb_step is Z-conjugate to the planar extension") {
    const Moebius M = mat::nakada_M(1, 2);
    const auto [x1, y1] = leb_step(M, Scalar(2, 5), Scalar(0));
    CHECK(x1 == Scalar(1, 2));
    CHECK(y1 == Scalar(2, 5));

    std::mt19937_64 rng(11);
    for (int k = 0; k < 200; ++k) {
      const long d = 1 + k % 5;
      const int eps = k % 2 ? 1 : -1;
      const Moebius N = mat::nakada_M(eps, d);
      const Scalar x = eps * (Scalar(1) / (Scalar(d) + rand_q(rng, 0, 1)));
      if (x.is_zero()) continue;
      const Scalar y = rand_q(rng, 0, 1) / Scalar(3);
      // Z o T_N o Z^-1
      const Scalar yo = z_inv_y(x, y);
      const Scalar xn = N.apply(x);
      const Scalar yn = N.conjugate_by_R().apply(yo);
      const auto [xl, yl] = leb_step(N, x, y);
      CHECK(xl == xn);
      CHECK(yl == z_y(xn, yn));
      // and back
      const auto back = leb_step(N.inverse(), xl, yl);
      CHECK(back.first == x);
      CHECK(back.second == y);
    }
  }

  TEST_CASE("leb_step preserves area") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 1000; ++k) {
      const Moebius M = mat::nakada_M(k % 2 ? 1 : -1, 1 + k % 7);
      const Scalar x = rand_q(rng, -1, 1), y = rand_q(rng, -1, 1), h = rand_q(rng, 1, 2) / Scalar(1000);
      const Scalar s = M.c * x + M.d;
      if (s.is_zero()) continue;
      // y' is affine in y and x' does not depend on y: the Jacobian is the
      // product of the diagonal entries
      const Scalar dy = (leb_step(M, x, y + h).second - leb_step(M, x, y).second) / h;
      const Scalar dx = M.det() / (s * s);
      CHECK(dy * dx == Scalar(1));
    }
  }

  TEST_CASE("flow relation for both determinant branches") {
    const auto id = verify_flow_relation(Moebius::identity(), Scalar(1, 3), Scalar(1, 4));
    CHECK(id.t0 == 0);
    CHECK(id.residual == 0);

    std::mt19937_64 rng(3);
    int branch[2] = {0, 0};
    double worst = 0;
    for (int k = 0; k < 2000; ++k) {
      const int eps = k % 2 ? 1 : -1;
      const long d = 1 + k % 9;
      const Moebius M = mat::nakada_M(eps, d);
      const Scalar x = eps * (Scalar(1) / (Scalar(d) + rand_q(rng, 0, 1)));
      const auto f = verify_flow_relation(M, x, rand_q(rng, -1, 1));
      ++branch[f.det > 0];
      worst = std::max(worst, f.residual);
      CHECK(f.t0 == doctest::Approx(-tau(M, x)));
    }
    CHECK(branch[0] > 0);
    CHECK(branch[1] > 0);
    CHECK(worst < 1e-10);
  }

  TEST_CASE("flow residual is linear in a y perturbation") {
    const Moebius M = mat::nakada_M(-1, 3);
    const Scalar x(-2, 7), y(1, 5);
    const auto [x1, y1] = leb_step(M, x, y);
    const double r1 = flow_residual(M, x.to_double(), y.to_double(), x1.to_double(), y1.to_double() + 1e-6).residual;
    const double r2 = flow_residual(M, x.to_double(), y.to_double(), x1.to_double(), y1.to_double() + 2e-6).residual;
    CHECK(r1 > 1e-7);
    CHECK(r2 / r1 == doctest::Approx(2).epsilon(1e-6));
  }

  TEST_CASE("return times on Lambda_1") {
    const auto T = PiecewiseMap::nakada(Scalar(1));
    const Region L = nakada_lambda(Scalar(1)).region;
    FirstReturnParams p;
    p.samples = 100000;
    p.word_length = 3;
    p.search_samples = 500;
    const auto rep = first_return_diagnostics(T, L, nakada_generators(5), p);
    CHECK(rep.samples > 99000);
    CHECK(rep.negative == 0);
    CHECK(rep.tau_min >= 0);
    CHECK(rep.words > 1000);
    CHECK(rep.competitors.empty());

    // doubling the section by its U-image: the same orbit crosses twice
    const Region L2 = L.unite(Region::box(Scalar(-1), Scalar(0), Scalar(-1), Scalar(0)));
    const auto bad = first_return_diagnostics(T, L2, nakada_generators(5), p);
    CHECK_FALSE(bad.competitors.empty());
  }
}
