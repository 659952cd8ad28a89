#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "minkassign/errors.hpp"
#include "minkassign/formulas.hpp"
#include "minkassign/mod_scalar.hpp"
#include "minkassign/rational.hpp"
#include "property_suites.hpp"

using namespace minkassign;

namespace {
RankOneRates<Rational> ones(int m, int n) {
  return {std::vector<Rational>(m, Rational(1)), std::vector<Rational>(n, Rational(1))};
}

Rational rsum(const std::vector<Rational>& v) {
  Rational s(0);
  for (const Rational& x : v) s += x;
  return s;
}
}  // namespace

TEST_CASE("closed form, pinned values") {
  CHECK(f_main(2, ones(3, 3)) == Rational(4, 9));
  CHECK(f_main(2, ones(2, 2)) == Rational(5, 4));
  CHECK(f_main(1, ones(4, 7)) == Rational(1, 28));

  // k=1 collapses to one term for arbitrary rates
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    int m = 1 + static_cast<int>(rng() % 4), n = 1 + static_cast<int>(rng() % 4);
    RankOneRates<Rational> rates{suites::random_rate_vector(rng, m),
                                 suites::random_rate_vector(rng, n)};
    Rational expect = Rational(1) / (rsum(rates.r) * rsum(rates.c));
    CHECK(f_main(1, rates) == expect);
    CHECK(f_negbinom(1, rates) == expect);
    CHECK(f_inclexcl(1, rates) == expect);
    CHECK(f_urn(1, rates) == expect);
    CHECK(f_flag_ordered(1, rates) == expect);
    CHECK(f_fg(1, rates) == expect);
  }

  CHECK_THROWS_AS(f_main(0, ones(2, 2)), DomainError);
  CHECK_THROWS_AS(f_main(3, ones(2, 5)), DomainError);
  RankOneRates<Rational> bad{{Rational(1), Rational(-1)}, {Rational(1)}};
  CHECK_THROWS_AS(f_main(1, bad), DomainError);
}

TEST_CASE("closed form matches the 3x3 k=2 expansion") {
  // (1/(r2+r3)+1/(r1+r3)+1/(r1+r2))/C + (1/(c2+c3)+1/(c1+c3)+1/(c1+c2))/R
  //   - 5/(R C), written out with 1-based labels
  std::mt19937_64 rng(17);
  for (int t = 0; t < 30; ++t) {
    std::vector<Rational> r = suites::random_rate_vector(rng, 3);
    std::vector<Rational> c = suites::random_rate_vector(rng, 3);
    Rational R = rsum(r), C = rsum(c);
    Rational rowpart =
        Rational(1) / (r[1] + r[2]) + Rational(1) / (r[0] + r[2]) + Rational(1) / (r[0] + r[1]);
    Rational colpart =
        Rational(1) / (c[1] + c[2]) + Rational(1) / (c[0] + c[2]) + Rational(1) / (c[0] + c[1]);
    Rational expanded = rowpart / C + colpart / R - Rational(5) / (R * C);
    CHECK(f_main(2, RankOneRates<Rational>{r, c}) == expanded);
  }
}

TEST_CASE("equal-rate specializations") {
  CHECK(cs_formula(1, 1, 1) == Rational(1));
  CHECK(cs_formula(2, 3, 3) == Rational(1, 9) + Rational(1, 6) + Rational(1, 6));
  CHECK(cs_formula(2, 3, 3) == Rational(4, 9));
  CHECK(parisi(1) == Rational(1));
  CHECK(parisi(2) == Rational(5, 4));
  CHECK(parisi(3) == Rational(49, 36));
  CHECK(parisi(4) == Rational(205, 144));
  for (int k = 1; k <= 8; ++k) CHECK(cs_formula(k, k, k) == parisi(k));
  for (int n = 1; n <= 5; ++n)
    for (int m = 1; m <= n; ++m)
      for (int k = 1; k <= m; ++k) CHECK(f_main(k, ones(m, n)) == cs_formula(k, m, n));
  CHECK_THROWS_AS(cs_formula(2, 1, 1), DomainError);
  CHECK_THROWS_AS(cs_formula(1, 3, 2), DomainError);
  CHECK_THROWS_AS(parisi(0), DomainError);
}

TEST_CASE("urn probabilities, pinned values") {
  std::vector<Rational> w12{Rational(1), Rational(2)};
  CHECK(pr_urn_seq(w12, {1}) == Rational(2, 3));
  CHECK(pr_urn_seq(w12, {}) == Rational(1));
  std::vector<Rational> w111{Rational(1), Rational(1), Rational(1)};
  CHECK(pr_urn_seq(w111, {0, 1}) == Rational(1, 6));

  CHECK(pr_urn_set(std::vector<Rational>{Rational(1), Rational(1)}, {0}) == Rational(1, 2));
  CHECK(pr_urn_set(w12, {1}) == Rational(2, 3));
  CHECK(pr_urn_set(w12, {0, 1}) == Rational(1));  // drawing everything is certain

  std::vector<Rational> w123{Rational(1), Rational(2), Rational(3)};
  Rational total(0);
  total += pr_urn_set(w123, {0, 1});
  total += pr_urn_set(w123, {0, 2});
  total += pr_urn_set(w123, {1, 2});
  CHECK(total == Rational(1));

  CHECK(pr_urn_nested(w111, {0}, {0, 1}) == Rational(1, 6));
  CHECK(pr_urn_nested(w123, {}, {0, 2}) == pr_urn_set(w123, {0, 2}));
  CHECK(pr_urn_nested(w123, {0, 2}, {0, 2}) == pr_urn_set(w123, {0, 2}));
  CHECK_THROWS_AS(pr_urn_nested(w123, {1}, {0, 2}), DomainError);
  CHECK_THROWS_AS(pr_urn_seq(w12, {0, 0}), DomainError);
  CHECK_THROWS_AS(pr_urn_seq(w12, {2}), DomainError);

  // nested probability against a direct ordering sum: orders of T first, then
  // orders of the rest of I
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    int m = 2 + static_cast<int>(rng() % 3);
    std::vector<Rational> w = suites::random_rate_vector(rng, m);
    std::vector<int> I = suites::random_subset(rng, m, 1 + static_cast<int>(rng() % m));
    std::vector<int> T = suites::random_subset(rng, static_cast<int>(I.size()),
                                               static_cast<int>(rng() % (I.size() + 1)));
    for (int& x : T) x = I[x];
    std::vector<int> rest;
    for (int x : I)
      if (std::find(T.begin(), T.end(), x) == T.end()) rest.push_back(x);
    Rational direct(0);
    std::sort(T.begin(), T.end());
    std::vector<int> torder = T;
    do {
      std::vector<int> rorder = rest;
      do {
        std::vector<int> seq = torder;
        seq.insert(seq.end(), rorder.begin(), rorder.end());
        direct += pr_urn_seq(w, seq);
      } while (std::next_permutation(rorder.begin(), rorder.end()));
    } while (std::next_permutation(torder.begin(), torder.end()));
    CHECK(pr_urn_nested(w, T, I) == direct);
  }
}

TEST_CASE("signed component functions") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 25; ++t) {
    int m = 1 + static_cast<int>(rng() % 4);
    std::vector<Rational> w = suites::random_rate_vector(rng, m);
    CHECK(f_component(1, w, std::vector<int>{}) == Rational(1) / rsum(w));
    for (std::uint32_t mask = 0; mask + 1 < (1u << m); ++mask)
      for (int ell = 1; ell <= 3; ++ell) {
        Rational val = f_component(ell, w, mask);
        CHECK(val.sign() > 0);
      }
  }
  std::vector<Rational> w{Rational(1), Rational(2)};
  CHECK_THROWS_AS(f_component(1, w, std::vector<int>{0, 1}), DomainError);  // not proper
  CHECK_THROWS_AS(f_component(0, w, std::vector<int>{0}), DomainError);
}

TEST_CASE("submatrix contributions, pinned values") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 10; ++t) {
    RankOneRates<Rational> rates{suites::random_rate_vector(rng, 3),
                                 suites::random_rate_vector(rng, 2)};
    CHECK(contribution(1, rates, {}, {}) == Rational(1) / (rsum(rates.r) * rsum(rates.c)));
  }

  // all-ones 2x2: by symmetry each of the four submatrices carries a quarter
  RankOneRates<Rational> one2 = ones(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(contribution(2, one2, {i}, {j}) == Rational(5, 16));

  CHECK_THROWS_AS(contribution(2, one2, {0, 1}, {0}), DomainError);
  CHECK_THROWS_AS(contribution(2, one2, {0}, {}), DomainError);
  CHECK_THROWS_AS(contribution(2, one2, {3}, {0}), DomainError);
}

TEST_CASE("formula over residues matches the rational value") {
  std::mt19937_64 rng(53);
  const std::uint64_t p = ModScalar::kDefaultPrime;
  for (int t = 0; t < 15; ++t) {
    int m = 1 + static_cast<int>(rng() % 4), n = 1 + static_cast<int>(rng() % 4);
    int k = 1 + static_cast<int>(rng() % std::min(m, n));
    RankOneRates<Rational> rates{suites::random_rate_vector(rng, m),
                                 suites::random_rate_vector(rng, n)};
    RankOneRates<ModScalar> mrates;
    for (const Rational& x : rates.r) mrates.r.push_back(rational_to_mod(x, p));
    for (const Rational& x : rates.c) mrates.c.push_back(rational_to_mod(x, p));
    CHECK(f_main(k, mrates) == rational_to_mod(f_main(k, rates), p));
    CHECK(f_urn(k, mrates) == rational_to_mod(f_urn(k, rates), p));
  }
}

TEST_CASE("formula differentiates through dual numbers") {
  // d/dr0 of 1/(R C) is -1/(R^2 C)
  std::mt19937_64 rng(67);
  for (int t = 0; t < 10; ++t) {
    std::vector<Rational> r = suites::random_rate_vector(rng, 3);
    std::vector<Rational> c = suites::random_rate_vector(rng, 2);
    RankOneRates<DualRational> drates;
    for (const Rational& x : r) drates.r.push_back(DualRational(x));
    for (const Rational& x : c) drates.c.push_back(DualRational(x));
    drates.r[0].b = Rational(1);
    DualRational val = f_main(1, drates);
    Rational R = rsum(r), C = rsum(c);
    CHECK(val.a == Rational(1) / (R * C));
    CHECK(val.b == Rational(-1) / (R * R * C));
  }
}

TEST_CASE("formula equivalence suite") {
  suites::SuiteResult r = suites::formula_equivalence_suite(120, 101);
  INFO(r.first_failure);
  CHECK(r.cases == 120);
  CHECK(r.failures == 0);
}

TEST_CASE("formula invariance suite") {
  suites::SuiteResult r = suites::formula_invariance_suite(120, 103);
  INFO(r.first_failure);
  CHECK(r.cases == 120);
  CHECK(r.failures == 0);
}

TEST_CASE("urn suite") {
  suites::SuiteResult r = suites::urn_suite(60, 107);
  INFO(r.first_failure);
  CHECK(r.cases == 60);
  CHECK(r.failures == 0);
}

TEST_CASE("contribution suite") {
  suites::SuiteResult r = suites::contribution_suite(40, 109);
  INFO(r.first_failure);
  CHECK(r.cases == 40);
  CHECK(r.failures == 0);
}
