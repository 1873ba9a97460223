#include "doctest.h"
#include "mdyn/matching.hpp"

using namespace mdyn;

namespace {

MatchingWitness witness(const PiecewiseMap& T) {
  auto r = detect_matching(T);
  REQUIRE(r.status == MatchStatus::matched);
  return *r.witness;
}

}  // namespace

TEST_SUITE("matching") {
  TEST_CASE("Nakada alpha = 0.39 matches after three steps") {
    auto T = PiecewiseMap::nakada(Scalar(39, 100));
    auto w = witness(T);
    CHECK(w.m == 3);
    CHECK(w.n == 3);
    CHECK(w.left_orbit[2] == Scalar(-5, 22));
    CHECK(w.right_orbit[2] == Scalar(5, 17));
    CHECK(mat::W().apply(ExtReal(w.left_orbit[2])) == ExtReal(w.right_orbit[2]));
    CHECK(w.left_orbit[3] == w.right_orbit[3]);
    CHECK(verify_matching_relation(w, mat::W(), T.length()));
    CHECK_FALSE(verify_matching_relation(w, Moebius::identity(), T.length()));
    CHECK(matching_relation(w, T.length()).projective_eq(mat::W()));
  }

  TEST_CASE("orbits are replayed with the witness digits") {
    for (const char* a : {"39/100", "7/10", "389/1000", "13/20"}) {
      auto T = PiecewiseMap::nakada(Scalar::parse(a));
      auto w = witness(T);
      Scalar x = w.left_orbit[0];
      for (int i = 0; i < w.m; ++i) x = w.left_word[i].M.apply(x);
      Scalar y = w.right_orbit[0];
      for (int j = 0; j < w.n; ++j) y = w.right_word[j].M.apply(y);
      CHECK(x == y);
      CHECK(x == w.value);
      CHECK(verify_matching_relation(w, mat::W(), T.length()));
    }
  }

  TEST_CASE("terminating orbits are not matches") {
    for (const char* a : {"2/5", "1/2", "1", "3/5"}) {
      auto r = detect_matching(PiecewiseMap::nakada(Scalar::parse(a)));
      CHECK(r.status == MatchStatus::terminating);
      CHECK_FALSE(r.witness);
    }
  }

  TEST_CASE("CKS n = 3, alpha = 1: left end terminal, right orbit periodic") {
    auto r = detect_matching(PiecewiseMap::cks(3, Scalar(1)));
    CHECK(r.status == MatchStatus::unknown);
    CHECK(r.left.size() == 1);
    CHECK(static_cast<int>(r.right.size()) == r.horizon + 1);
  }

  TEST_CASE("CKS matching and relation") {
    for (const char* a : {"7/50", "27/200", "3/10"}) {
      auto T = PiecewiseMap::cks(3, Scalar::parse(a));
      auto w = witness(T);
      const Moebius M = matching_relation(w, T.length());
      CHECK(verify_matching_relation(w, M, T.length()));
      // M carries l_{m-1} to r_{n-1}
      CHECK(M.apply(ExtReal(w.left_orbit[w.m - 1])) == ExtReal(w.right_orbit[w.n - 1]));
    }
    auto w5 = witness(PiecewiseMap::cks(4, Scalar(1, 5)));
    CHECK(w5.value.field_index() == 4);
  }

  TEST_CASE("close neighbours") {
    auto check = [](const PiecewiseMap& f, const PiecewiseMap& g) {
      return close_neighbors(f, witness(f), g, witness(g)).ok;
    };
    CHECK(check(PiecewiseMap::nakada(Scalar(39, 100)), PiecewiseMap::nakada(Scalar(38999, 100000))));
    CHECK(check(PiecewiseMap::nakada(Scalar(39, 100)), PiecewiseMap::nakada(Scalar(3901, 10000))));
    // same exponents, neighbouring matching interval
    const auto f = PiecewiseMap::nakada(Scalar(39, 100)), g = PiecewiseMap::nakada(Scalar(389, 1000));
    const auto nc = close_neighbors(f, witness(f), g, witness(g));
    CHECK_FALSE(nc.ok);
    CHECK(nc.reason == "matching digit words differ");
    CHECK(check(PiecewiseMap::cks(3, Scalar(14, 100)), PiecewiseMap::cks(3, Scalar(135, 1000))));
    CHECK(check(PiecewiseMap::nakada(Scalar(7, 10)), PiecewiseMap::nakada(Scalar(699, 1000))));
    // different exponents
    CHECK_FALSE(check(PiecewiseMap::nakada(Scalar(39, 100)), PiecewiseMap::nakada(Scalar(7, 10))));
  }

  TEST_CASE("match scan") {
    std::vector<Scalar> grid;
    for (int k = 385; k <= 400; ++k) grid.push_back(Scalar(k, 1000));
    auto rows = match_scan(Family::nakada, 0, grid);
    REQUIRE(rows.size() == grid.size());
    for (const auto& r : rows) {
      if (r.alpha == Scalar(2, 5)) CHECK(r.status == MatchStatus::terminating);
      if (r.alpha == Scalar(39, 100) || r.alpha == Scalar(389, 1000)) {
        CHECK(r.m == 3);
        CHECK(r.typical);
      }
    }
  }
}
