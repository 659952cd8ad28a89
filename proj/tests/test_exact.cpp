#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <random>
#include <vector>

#include "minkassign/errors.hpp"
#include "minkassign/exact.hpp"
#include "minkassign/formulas.hpp"
#include "minkassign/matrix.hpp"
#include "minkassign/mod_scalar.hpp"
#include "minkassign/rational.hpp"
#include "minkassign/scalar.hpp"
#include "property_suites.hpp"

using namespace minkassign;

namespace {

std::uint32_t window(int k, const std::vector<int>& rows, const std::vector<int>& cols) {
  std::uint32_t m = 0;
  for (int i : rows)
    for (int j : cols) m |= 1u << (i * k + j);
  return m;
}

Grid<Rational> rational_grid(std::vector<std::vector<Rational>> rows) {
  Grid<Rational> g(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) g.at(i, j) = rows[i][j];
  return g;
}

Grid<Rational> random_rational_grid(std::mt19937_64& rng, int k) {
  Grid<Rational> g(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) g.at(i, j) = suites::random_rational(rng);
  return g;
}

// closed form for the 2x2 expectation with arbitrary rates
Rational two_by_two_expectation(const Grid<Rational>& A) {
  Rational a = A.at(0, 0), b = A.at(0, 1), c = A.at(1, 0), d = A.at(1, 1);
  Rational top = a + b, bottom = c + d;
  return Rational(1) / top + Rational(1) / bottom +
         a * c / (top * bottom * (b + d)) + b * d / (top * bottom * (a + c));
}

}  // namespace

TEST_CASE("terminal pattern detection") {
  REQUIRE(base_case(ZeroPattern::from_cells(2, 2, {{0, 0}, {1, 1}}), 2));
  REQUIRE_FALSE(base_case(ZeroPattern::from_cells(2, 2, {{0, 0}, {0, 1}}), 2));
  REQUIRE_FALSE(base_case(ZeroPattern(2, 2), 1));
  REQUIRE(base_case(ZeroPattern(2, 2), 0));

  ZeroPattern full(3, 3, (1u << 9) - 1u);
  REQUIRE(base_case(full, 3));

  // diagonal plus noise still only matches what the rows allow
  ZeroPattern cross = ZeroPattern::from_cells(3, 3, {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {2, 0}});
  REQUIRE(base_case(cross, 2));
  REQUIRE_FALSE(base_case(cross, 3));

  REQUIRE_THROWS_AS(ZeroPattern::from_cells(2, 2, {{2, 0}}), DomainError);
  REQUIRE_THROWS_AS(ZeroPattern(2, 2, 1u << 5), DomainError);
}

TEST_CASE("window selection, pinned picks") {
  for (int k = 2; k <= 4; ++k) {
    std::vector<int> all;
    for (int j = 0; j < k; ++j) all.push_back(j);
    SPick pick = find_S(ZeroPattern(k, k), k);
    REQUIRE(pick.mask == window(k, {0}, all));
    REQUIRE(pick.r == 1);
    SPick colpick = find_S(ZeroPattern(k, k), k, SPriority::kColsFirst);
    REQUIRE(colpick.mask == window(k, all, {0}));
    REQUIRE(colpick.r == 1);
  }

  // one forced zero leaves later rows untouched
  SPick pick = find_S(ZeroPattern::from_cells(3, 3, {{0, 1}}), 3);
  REQUIRE(pick.mask == window(3, {1}, {0, 1, 2}));
  REQUIRE(pick.r == 1);

  // zeroes filling the last row and column push the pick into the 3x3 corner
  ZeroPattern rim = ZeroPattern::from_cells(
      4, 4, {{0, 3}, {1, 3}, {2, 3}, {3, 0}, {3, 1}, {3, 2}});
  SPick corner = find_S(rim, 4);
  REQUIRE(corner.mask == window(4, {0, 1, 2}, {0, 1, 2}));
  REQUIRE(corner.r == 2);

  // staggered zeroes leave no clean 3x3, land on a 2x3 window
  ZeroPattern stagger =
      ZeroPattern::from_cells(4, 4, {{0, 3}, {1, 3}, {2, 0}, {2, 1}, {3, 2}});
  SPick wide = find_S(stagger, 4);
  REQUIRE(wide.mask == window(4, {0, 1}, {0, 1, 2}));
  REQUIRE(wide.r == 1);

  // a zeroed row plus zeroed column leaves only a 2x2 block
  ZeroPattern cross = ZeroPattern::from_cells(3, 3, {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {2, 0}});
  SPick block = find_S(cross, 3);
  REQUIRE(block.mask == window(3, {1, 2}, {1, 2}));
  REQUIRE(block.r == 1);

  REQUIRE_THROWS_AS(find_S(ZeroPattern::from_cells(2, 2, {{0, 0}, {1, 1}}), 2), DomainError);
  REQUIRE_THROWS_AS(find_S(ZeroPattern(3, 4), 3), DomainError);
  REQUIRE_THROWS_AS(find_S(ZeroPattern(5, 5), 5), DomainError);
}

TEST_CASE("expectation engine, pinned values") {
  Grid<Rational> one(1, 1);
  one.at(0, 0) = Rational(7, 3);
  REQUIRE(expected_min_exact(one, 1) == Rational(3, 7));

  Grid<Rational> ones2(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) ones2.at(i, j) = Rational(1);
  REQUIRE(expected_min_exact(ones2, 2) == parisi(2));

  Grid<Rational> ones3(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) ones3.at(i, j) = Rational(1);
  REQUIRE(expected_min_exact(ones3, 3) == parisi(3));

  Grid<Rational> bad(2, 3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) bad.at(i, j) = Rational(1);
  REQUIRE_THROWS_AS(expected_min_exact(bad, 2), DomainError);
  REQUIRE_THROWS_AS(expected_min_exact(ones3, 2), DomainError);
  Grid<Rational> zero_rate = ones2;
  zero_rate.at(0, 1) = Rational(0);
  REQUIRE_THROWS_AS(expected_min_exact(zero_rate, 2), DomainError);
}

TEST_CASE("expectation engine matches the 2x2 closed form") {
  std::mt19937_64 rng(2026);
  for (int t = 0; t < 50; ++t) {
    Grid<Rational> A = random_rational_grid(rng, 2);
    REQUIRE(expected_min_exact(A, 2) == two_by_two_expectation(A));
  }
  Grid<Rational> worked = rational_grid({{Rational(1), Rational(2)}, {Rational(3), Rational(5)}});
  REQUIRE(expected_min_exact(worked, 2) == two_by_two_expectation(worked));
}

TEST_CASE("expectation engine matches the closed formula on product rates") {
  std::mt19937_64 rng(2027);
  for (int k = 2; k <= 3; ++k) {
    for (int t = 0; t < 12; ++t) {
      RankOneRates<Rational> rates{suites::random_rate_vector(rng, k), suites::random_rate_vector(rng, k)};
      Grid<Rational> A = rate_grid(rates);
      REQUIRE(expected_min_exact(A, k) == f_main(k, rates));
    }
  }
}

TEST_CASE("expectation engine, recursion bookkeeping") {
  std::mt19937_64 rng(2028);
  for (int t = 0; t < 5; ++t) {
    Grid<Rational> A = random_rational_grid(rng, 2);
    REQUIRE(expected_min_exact(A, 2, true) == expected_min_exact(A, 2, false));
  }
  Grid<Rational> B = random_rational_grid(rng, 3);
  REQUIRE(expected_min_exact(B, 3, true) == expected_min_exact(B, 3, false));

  for (int t = 0; t < 15; ++t) {
    Grid<Rational> C = random_rational_grid(rng, 3);
    REQUIRE(expected_min_exact(C, 3, true, SPriority::kRowsFirst) ==
            expected_min_exact(C, 3, true, SPriority::kColsFirst));
  }

  // scaling every rate by t scales the expectation by 1/t
  for (int t = 0; t < 8; ++t) {
    Grid<Rational> D = random_rational_grid(rng, 3);
    Rational scale = suites::random_rational(rng);
    Grid<Rational> E(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) E.at(i, j) = D.at(i, j) * scale;
    REQUIRE(expected_min_exact(E, 3) * scale == expected_min_exact(D, 3));
  }
}

TEST_CASE("expectation engine over residues") {
  const long p = ModScalar::kDefaultPrime;
  for (int k = 2; k <= 4; ++k) {
    Grid<ModScalar> ones(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) ones.at(i, j) = ModScalar(1, p);
    REQUIRE(expected_min_exact(ones, k) == rational_to_mod(parisi(k), p));
  }

  std::mt19937_64 rng(2029);
  for (int t = 0; t < 3; ++t) {
    RankOneRates<Rational> rates{suites::random_rate_vector(rng, 4), suites::random_rate_vector(rng, 4)};
    Grid<ModScalar> A(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) A.at(i, j) = rational_to_mod(rates.r[i] * rates.c[j], p);
    ModScalar got = expected_min_exact(A, 4);
    RankOneRates<ModScalar> mod_rates;
    for (const Rational& x : rates.r) mod_rates.r.push_back(rational_to_mod(x, p));
    for (const Rational& x : rates.c) mod_rates.c.push_back(rational_to_mod(x, p));
    REQUIRE(got == f_main(4, mod_rates));
  }
}

TEST_CASE("expectation engine at full size over rationals") {
  Grid<Rational> ones4(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) ones4.at(i, j) = Rational(1);
  REQUIRE(expected_min_exact(ones4, 4) == parisi(4));
}
