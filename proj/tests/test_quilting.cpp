#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "mdyn/domains.hpp"
#include "mdyn/quilting.hpp"

using namespace mdyn;

namespace {

// Nakada digit from the definition, in doubles: (sign x, floor(1/|x| + 1 - alpha)).
std::pair<int, long> nakada_digit(double alpha, double x) {
  return {x > 0 ? 1 : -1, static_cast<long>(std::floor(1 / std::abs(x) + 1 - alpha))};
}

bool inside(const std::vector<std::pair<Scalar, Scalar>>& ivs, double x, double pad) {
  return std::any_of(ivs.begin(), ivs.end(), [&](const auto& iv) {
    return iv.first.to_double() - pad <= x && x <= iv.second.to_double() + pad;
  });
}

Certificate granted() {
  Certificate c;
  c.granted = true;
  return c;
}

}  // namespace

TEST_SUITE("quilting") {
  TEST_CASE("f = g leaves the domain alone") {
    const auto T = PiecewiseMap::nakada(Scalar(39, 100));
    const Region L = nakada_lambda(Scalar(39, 100)).region;
    const auto rep = quilt(T, T, L);
    CHECK(rep.established);
    CHECK(rep.pieces.empty());
    CHECK(rep.delta.pieces.empty());
    CHECK(symmetric_difference_mass(rep.omega_g, L) == 0);
    CHECK(rep.entropy_factor == 1);
  }

  TEST_CASE("digit difference set against the digit formula") {
    const double a = 0.39, b = 0.38;
    const auto f = PiecewiseMap::nakada(Scalar(39, 100)), g = PiecewiseMap::nakada(Scalar(38, 100));
    const auto D = digit_difference_set(f, g, 1e-7);
    REQUIRE(!D.pieces.empty());
    std::vector<std::pair<Scalar, Scalar>> pieces;
    for (const auto& p : D.pieces) {
      pieces.emplace_back(p.lo, p.hi);
      const double m = (p.lo.to_double() + p.hi.to_double()) / 2;
      CHECK(nakada_digit(a, m) != nakada_digit(b, m));
      CHECK((p.rel * p.f_digit.M).projective_eq(p.g_digit.M));
    }
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ux(a - 1, b);
    int agree = 0;
    for (int k = 0; k < 20000; ++k) {
      const double x = ux(rng);
      if (inside(pieces, x, 1e-12) || inside(D.tails, x, 1e-12)) continue;
      ++agree;
      CHECK(nakada_digit(a, x) == nakada_digit(b, x));
    }
    CHECK(agree > 10000);
  }

  TEST_CASE("large-alpha CKS difference set has two relations") {
    const auto f = PiecewiseMap::cks(3, Scalar(86, 100)), g = PiecewiseMap::cks(3, Scalar(855, 1000));
    const auto D = digit_difference_set(f, g, 1e-7);
    std::vector<std::pair<Moebius, int>> classes;
    for (const auto& p : D.pieces) {
      auto it = std::find_if(classes.begin(), classes.end(),
                             [&](const auto& c) { return c.first.projective_eq(p.rel); });
      if (it == classes.end()) classes.push_back({p.rel, 1});
      else ++it->second;
    }
    REQUIRE(classes.size() == 2);
    std::sort(classes.begin(), classes.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
    // shift changes: the relation is a translation
    CHECK(classes[0].first.c == Scalar(0));
    CHECK(classes[1].second == 1);
    CHECK_FALSE(classes[1].first.c == Scalar(0));
  }

  TEST_CASE("Nakada close neighbours with different entropy") {
    const Scalar a(7, 10), a2(699, 1000);
    const auto f = PiecewiseMap::nakada(a), g = PiecewiseMap::nakada(a2);
    const Region L = nakada_lambda(a).region;
    const auto rep = quilt(f, g, L);
    REQUIRE(rep.established);
    REQUIRE(rep.bijectivity);
    CHECK(rep.bijectivity->pass);
    CHECK(rep.defect == 0);
    REQUIRE(rep.groups.size() == 1);
    CHECK(rep.groups[0].d == 2);
    CHECK(rep.groups[0].a == 1);
    for (const auto& q : rep.pieces) CHECK(q.word_f.projective_eq(q.word_g));
    CHECK(symmetric_difference_mass(rep.omega_g, nakada_lambda(a2).region) < 1e-12);
    CHECK(rep.mass_g == doctest::Approx(rep.mass_f - rep.deleted.mass() + rep.added.mass()).epsilon(1e-12));
    CHECK(rep.entropy_factor == doctest::Approx(rep.mass_f / rep.mass_g).epsilon(1e-10));
    CHECK(rep.entropy_factor == doctest::Approx(std::log(1.7) / std::log(1.699)).epsilon(1e-9));

    const auto t = transfer_properties(rep, granted());
    CHECK(t.transferred);
    CHECK_FALSE(t.isomorphic);
    CHECK(t.entropy_factor == doctest::Approx(t.mass_ratio).epsilon(1e-10));
  }

  TEST_CASE("same matching interval gives an isomorphic quilt") {
    const Scalar a(39, 100), a2(38999, 100000);
    const auto rep = quilt(PiecewiseMap::nakada(a), PiecewiseMap::nakada(a2), nakada_lambda(a).region);
    REQUIRE(rep.established);
    CHECK(rep.bijectivity->pass);
    CHECK(rep.entropy_factor == 1);
    CHECK(symmetric_difference_mass(rep.omega_g, nakada_lambda(a2).region) < 1e-12);
    const auto t = transfer_properties(rep, granted());
    CHECK(t.transferred);
    CHECK(t.isomorphic);
  }

  TEST_CASE("neighbouring matching interval is step-limited") {
    QuiltParams p;
    p.max_steps = 20;
    const auto rep = quilt(PiecewiseMap::nakada(Scalar(39, 100)), PiecewiseMap::nakada(Scalar(389, 1000)),
                           nakada_lambda(Scalar(39, 100)).region, p);
    CHECK_FALSE(rep.established);
    CHECK(rep.failure.find("within 20 steps") != std::string::npos);
    const auto t = transfer_properties(rep, granted());
    CHECK_FALSE(t.transferred);
  }

  TEST_CASE("transfer refusals") {
    const Scalar a(7, 10);
    auto rep = quilt(PiecewiseMap::nakada(a), PiecewiseMap::nakada(Scalar(699, 1000)), nakada_lambda(a).region);
    REQUIRE(rep.established);
    CHECK_FALSE(transfer_properties(rep, Certificate{}).transferred);
    rep.defect = 1e-3;
    const auto t = transfer_properties(rep, granted());
    CHECK_FALSE(t.transferred);
    CHECK(t.reason == "decomposition defect above tolerance");
  }

  TEST_CASE("CKS close neighbours: F^3 = G^6") {
    const auto f = PiecewiseMap::cks(3, Scalar(14, 100)), g = PiecewiseMap::cks(3, Scalar(135, 1000));
    const Region H = hull_domain(f).region;
    const auto rep = quilt(f, g, H);
    REQUIRE(rep.established);
    CHECK(rep.bijectivity->pass);
    REQUIRE(!rep.pieces.empty());
    for (const auto& q : rep.groups) {
      CHECK(q.d + 1 == 3);
      CHECK(q.a + 1 == 6);
    }
    CHECK(rep.unresolved < 1e-6 * rep.mass_f);
    // factor from the mass of omega_f over delta
    const double nu = lift_region(H, rep.delta).mass() / rep.mass_f;
    CHECK(rep.entropy_factor == doctest::Approx(1 / (1 + 3 * nu)).epsilon(1e-5));
    // omega_g misses the unresolved tail mass
    CHECK(rep.entropy_factor == doctest::Approx(rep.mass_f / rep.mass_g).epsilon(1e-6));
  }
}
