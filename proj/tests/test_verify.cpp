#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "minkassign/dual.hpp"
#include "minkassign/errors.hpp"
#include "minkassign/formulas.hpp"
#include "minkassign/rational.hpp"
#include "minkassign/verify.hpp"

using namespace minkassign;

namespace {

void require_clean(const CheckReport& rep, int expected_trials) {
  INFO(rep.name << ": " << (rep.witnesses.empty() ? "" : rep.witnesses.front()));
  REQUIRE(rep.ok());
  REQUIRE(rep.failures == 0);
  REQUIRE(rep.trials >= expected_trials);
  REQUIRE(rep.witnesses.empty());
}

}  // namespace

TEST_CASE("form equivalence checks pass at random points") {
  auto rep = check_form_equivalence(2, 3, 3, 100, CheckMode::kRational, 7);
  require_clean(rep, 100);
  REQUIRE(rep.mode == CheckMode::kRational);
  REQUIRE_FALSE(rep.conjectural);
  REQUIRE(rep.false_pass_bound.empty());

  auto modrep = check_form_equivalence(3, 4, 4, 40, CheckMode::kModular, 7);
  require_clean(modrep, 40);
  REQUIRE_FALSE(modrep.false_pass_bound.empty());
  REQUIRE(modrep.false_pass_bound.find("false-pass") != std::string::npos);

  // smallest case: every variant collapses to the reciprocal product
  require_clean(check_form_equivalence(1, 1, 1, 5, CheckMode::kRational, 1), 5);
  RankOneRates<Rational> tiny{{Rational(3, 2)}, {Rational(5)}};
  REQUIRE(f_main(1, tiny) == Rational(2, 15));

  // reports are reproducible for a fixed seed
  auto again = check_form_equivalence(2, 3, 3, 100, CheckMode::kRational, 7);
  REQUIRE(again.trials == rep.trials);
  REQUIRE(again.failures == rep.failures);

  REQUIRE_THROWS_AS(check_form_equivalence(4, 3, 3, 1, CheckMode::kRational), DomainError);
  REQUIRE_THROWS_AS(check_form_equivalence(0, 3, 3, 1, CheckMode::kRational), DomainError);
}

TEST_CASE("column subset identity, worked example") {
  // n=2, H=L=1, unit weights: the left side telescopes to 1 and the right
  // side splits it as 1/2 + 1/2
  std::vector<Rational> c{Rational(1), Rational(1)};
  REQUIRE(detail::basic_lhs(2, 1, 1, c) == Rational(1));
  REQUIRE(detail::basic_rhs(2, 1, 1, c) == Rational(1));

  std::vector<Rational> skew{Rational(1), Rational(3)};
  REQUIRE(detail::basic_lhs(2, 1, 1, skew) == detail::basic_rhs(2, 1, 1, skew));
}

TEST_CASE("column subset identity holds across the admissible grid") {
  for (int n = 2; n <= 5; ++n)
    for (int H = 1; H <= n - 1; ++H)
      for (int L = 1; L <= H; ++L) {
        auto rep = check_basic_identity(n, H, L, 20, CheckMode::kRational,
                                        1000u * n + 10u * H + L);
        INFO("n=" << n << " H=" << H << " L=" << L);
        require_clean(rep, 20);
      }

  require_clean(check_basic_identity(3, 1, 1, 30, CheckMode::kModular, 5), 30);
  require_clean(check_basic_identity(5, 3, 2, 30, CheckMode::kModular, 5), 30);

  REQUIRE_THROWS_AS(check_basic_identity(3, 0, 0, 1, CheckMode::kRational), DomainError);
  REQUIRE_THROWS_AS(check_basic_identity(3, 3, 1, 1, CheckMode::kRational), DomainError);
  REQUIRE_THROWS_AS(check_basic_identity(3, 2, 3, 1, CheckMode::kRational), DomainError);
}

TEST_CASE("zero-rate limit identities hold in both regimes") {
  // all shapes up to 4x4, every count of vanishing row rates
  for (int m = 2; m <= 4; ++m)
    for (int n = 2; n <= 4; ++n)
      for (int k = 1; k <= std::min(m, n); ++k)
        for (int l = 1; l < m; ++l) {
          auto rep = check_limit_identities(k, m, n, l, 10, CheckMode::kRational,
                                            100000u + 1000u * m + 100u * n + 10u * k + l);
          INFO("k=" << k << " m=" << m << " n=" << n << " l=" << l
                    << (k <= m - l ? " (shrink)" : " (mixture)"));
          require_clean(rep, 10);
        }

  // boundary case where both regimes describe the same sum
  require_clean(check_limit_identities(2, 4, 4, 2, 50, CheckMode::kRational, 3), 50);
  require_clean(check_limit_identities(3, 4, 4, 2, 30, CheckMode::kModular, 3), 30);

  REQUIRE_THROWS_AS(check_limit_identities(2, 3, 3, 0, 1, CheckMode::kRational), DomainError);
  REQUIRE_THROWS_AS(check_limit_identities(2, 3, 3, 3, 1, CheckMode::kRational), DomainError);
}

TEST_CASE("zero-rate shrink regime reduces to the closed form directly") {
  // with k rows surviving and k <= m-l the limit is the smaller instance
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Rational> tail = detail::random_rational_point_vec(rng, 2);
    std::vector<Rational> c = detail::random_rational_point_vec(rng, 3);
    std::vector<Rational> r{Rational(0), Rational(0)};
    r.insert(r.end(), tail.begin(), tail.end());
    REQUIRE(detail::limit_lhs(2, 2, r, c) == f_main(2, RankOneRates<Rational>{tail, c}));
  }
}

TEST_CASE("monotonicity and derivative checks") {
  require_clean(check_monotonicity_and_derivative(2, 3, 3, 50, 11), 50);
  require_clean(check_monotonicity_and_derivative(3, 3, 4, 20, 11), 20);
  require_clean(check_monotonicity_and_derivative(1, 2, 2, 20, 11), 20);
  require_clean(check_monotonicity_and_derivative(4, 4, 4, 10, 11), 10);

  // k=1 pin: the sensitivity of 1/(R*C) to the first row rate is 1/(R^2*C)
  RankOneRates<DualRational> dual{{DualRational(Rational(2), Rational(1)),
                                   DualRational(Rational(3), Rational(0))},
                                  {DualRational(Rational(1), Rational(0)),
                                   DualRational(Rational(4), Rational(0))}};
  DualRational v = f_main(1, dual);
  REQUIRE(v.a == Rational(1, 25));
  REQUIRE(Rational(0) - v.b == Rational(1, 125));

  // k=2 pin: raising one unit rate strictly lowers the all-ones value
  RankOneRates<Rational> ones{{Rational(1), Rational(1)}, {Rational(1), Rational(1)}};
  REQUIRE(f_main(2, ones) == Rational(5, 4));
  RankOneRates<Rational> bumped = ones;
  bumped.r[0] = Rational(2);
  REQUIRE(f_main(2, bumped) < Rational(5, 4));

  REQUIRE_THROWS_AS(check_monotonicity_and_derivative(5, 4, 4, 1), DomainError);
}

TEST_CASE("recursive engine agrees with the closed form in verification runs") {
  for (int k = 1; k <= 3; ++k) {
    auto rep = check_exact_vs_formula(k, 25, ModScalar::kDefaultPrime, 21);
    INFO("k=" << k);
    require_clean(rep, 26);  // the extra trial is the exact rational point
    REQUIRE_FALSE(rep.conjectural);
  }

  auto rep4 = check_exact_vs_formula(4, 20, ModScalar::kDefaultPrime, 21);
  require_clean(rep4, 20);
  REQUIRE(rep4.conjectural);
  REQUIRE_FALSE(rep4.false_pass_bound.empty());

  REQUIRE_THROWS_AS(check_exact_vs_formula(5, 1), DomainError);
  REQUIRE_THROWS_AS(check_exact_vs_formula(0, 1), DomainError);
}
