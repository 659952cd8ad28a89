#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "minkassign/binomial.hpp"
#include "minkassign/dual.hpp"
#include "minkassign/errors.hpp"
#include "minkassign/exact.hpp"
#include "minkassign/formulas.hpp"
#include "minkassign/matrix.hpp"
#include "minkassign/mod_scalar.hpp"
#include "minkassign/rational.hpp"
#include "minkassign/rng.hpp"
#include "minkassign/scalar.hpp"
#include "minkassign/solver.hpp"

namespace minkassign {

enum class CheckMode { kRational, kModular };

// One identity-check run: how many points were tried, which failed, and for
// random-residue runs how unlikely a silent false pass is.
struct CheckReport {
  std::string name;
  CheckMode mode = CheckMode::kRational;
  int trials = 0;
  int failures = 0;
  bool conjectural = false;  // evidence, not proof, even when all points agree
  std::vector<std::string> witnesses;
  std::string false_pass_bound;

  bool ok() const { return failures == 0; }
};

namespace detail {

constexpr int kUnluckyRetries = 64;

// small enough for fast exact arithmetic, large enough to avoid structure
inline Rational random_point_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> d(1, 1000);
  return Rational(d(rng), d(rng));
}

inline std::vector<Rational> random_rational_point_vec(std::mt19937_64& rng, int len) {
  std::vector<Rational> out;
  out.reserve(len);
  for (int i = 0; i < len; ++i) out.push_back(random_point_rational(rng));
  return out;
}

inline std::vector<ModScalar> random_mod_vec(std::mt19937_64& rng, int len, long p) {
  std::uniform_int_distribution<long> d(1, p - 1);
  std::vector<ModScalar> out;
  out.reserve(len);
  for (int i = 0; i < len; ++i) out.push_back(ModScalar(d(rng), p));
  return out;
}

inline std::mt19937_64 trial_rng(std::uint64_t seed, int trial) {
  return std::mt19937_64(splitmix64(splitmix64(seed) + static_cast<std::uint64_t>(trial)));
}

inline std::string vec_str(const std::vector<Rational>& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].str();
  return s + ")";
}

inline std::string vec_str(const std::vector<ModScalar>& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i].value());
  return s + ")";
}

inline std::string scalar_str(const Rational& x) { return x.str(); }
inline std::string scalar_str(const ModScalar& x) { return std::to_string(x.value()); }

// Residue checks can miss a real mismatch only when the cleared-denominator
// difference polynomial vanishes at every sampled point.
inline std::string schwartz_zippel_note(double degree_bound, long p, int trials) {
  double log10_per_trial = std::log10(degree_bound) - std::log10(static_cast<double>(p) - 1);
  std::ostringstream os;
  os << "false-pass probability <= (deg/" << "(p-1))^trials with deg <= " << degree_bound
     << ", p = " << p << ", trials = " << trials << ": about 10^"
     << static_cast<long>(trials * log10_per_trial);
  return os.str();
}

// Runs one trial body up to kUnluckyRetries times while it reports unlucky
// residue points; each retry redraws the point from the trial's stream.
template <class Body>
void run_trial(CheckReport& rep, int trial, std::uint64_t seed, Body body) {
  std::mt19937_64 rng = trial_rng(seed, trial);
  for (int attempt = 0; attempt < kUnluckyRetries; ++attempt) {
    try {
      ++rep.trials;
      std::optional<std::string> witness = body(rng);
      if (witness) {
        ++rep.failures;
        rep.witnesses.push_back("trial " + std::to_string(trial) + ": " + *witness);
      }
      return;
    } catch (const UnluckyPrimeError&) {
      --rep.trials;  // the point never evaluated; redraw
    }
  }
  ++rep.trials;
  ++rep.failures;
  rep.witnesses.push_back("trial " + std::to_string(trial) + ": persistent unlucky residue points");
}

template <class S>
std::optional<std::string> form_mismatch(int k, const RankOneRates<S>& rates) {
  const S ref = f_main(k, rates);
  struct Alt {
    const char* name;
    S (*eval)(int, const RankOneRates<S>&);
  };
  const Alt alts[] = {
      {"negative-binomial form", &f_negbinom<S>},
      {"double inclusion-exclusion form", &f_inclexcl<S>},
      {"urn form", &f_urn<S>},
      {"ordered-sequence form", &f_flag_ordered<S>},
      {"component-product form", &f_fg<S>},
  };
  for (const Alt& alt : alts) {
    S got = alt.eval(k, rates);
    if (!(got == ref))
      return std::string(alt.name) + " disagrees: r=" + vec_str(rates.r) +
             " c=" + vec_str(rates.c) + " got=" + scalar_str(got) + " want=" + scalar_str(ref);
  }

  // window contributions partition the expectation
  const int m = static_cast<int>(rates.r.size()), n = static_cast<int>(rates.c.size());
  S total = zero_like(ref);
  std::vector<int> I(k - 1), J(k - 1);
  std::iota(I.begin(), I.end(), 0);
  do {
    std::iota(J.begin(), J.end(), 0);
    do {
      total += contribution(k, rates, I, J);
    } while (next_subset(J, n));
  } while (next_subset(I, m));
  if (!(total == ref))
    return "window contributions do not sum to the closed form: r=" + vec_str(rates.r) +
           " c=" + vec_str(rates.c) + " got=" + scalar_str(total) + " want=" + scalar_str(ref);
  return std::nullopt;
}

// Left side of the leading-window identity: sum over all J and over the I
// that miss part of the tail block, with the binomial supplying both sign
// and cutoff. Evaluated directly so it stays independent of the closed-form
// evaluators it is compared against.
template <class S>
S limit_lhs(int k, int l, const std::vector<S>& r, const std::vector<S>& c) {
  const int m = static_cast<int>(r.size()), n = static_cast<int>(c.size());
  const std::uint32_t tail = ((1u << m) - 1u) & ~((1u << l) - 1u);
  S total = zero_like(r[0]);
  for (std::uint32_t imask = 0; imask < (1u << m); ++imask) {
    if ((imask & tail) == tail) continue;
    const int isz = std::popcount(imask);
    for (std::uint32_t jmask = 0; jmask < (1u << n); ++jmask) {
      const int bottom = k - 1 - isz - std::popcount(jmask);
      if (bottom < 0) continue;
      mpz_class top = mpz_class(k - 1 - m - n);
      S coef = value_like(total, binomial_mpz(top, bottom));
      total += coef / (complement_sum(r, imask) * complement_sum(c, jmask));
    }
  }
  return total;
}

// Right side of the same identity. At the boundary m - l = k the two
// branches coincide (the column sets K are empty), so either branch works.
template <class S>
S limit_rhs(int k, int l, const std::vector<S>& r, const std::vector<S>& c) {
  const int m = static_cast<int>(r.size()), n = static_cast<int>(c.size());
  const std::vector<S> tail(r.begin() + l, r.end());
  if (k <= m - l) return f_main(k, RankOneRates<S>{tail, c});

  const int ksz = k + l - m;
  S total = zero_like(r[0]);
  std::vector<int> K(ksz);
  std::iota(K.begin(), K.end(), 0);
  do {
    std::vector<S> rest;
    for (int j = 0; j < n; ++j)
      if (std::find(K.begin(), K.end(), j) == K.end()) rest.push_back(c[j]);
    total += pr_urn_set(c, K) * f_main(m - l, RankOneRates<S>{tail, rest});
  } while (next_subset(K, n));
  return total;
}

template <class S>
S basic_lhs(int n, int H, int L, const std::vector<S>& c) {
  S total = zero_like(c[0]);
  for (std::uint32_t jmask = 0; jmask < (1u << n); ++jmask) {
    const int bottom = H - std::popcount(jmask);
    if (bottom < 0) continue;
    S coef = value_like(total, binomial_mpz(mpz_class(L - n - 1), bottom));
    total += coef / complement_sum(c, jmask);
  }
  return total;
}

template <class S>
S basic_rhs(int n, int H, int L, const std::vector<S>& c) {
  S total = zero_like(c[0]);
  for (std::uint32_t jmask = 0; jmask < (1u << n); ++jmask) {
    const int bottom = H - std::popcount(jmask);
    if (bottom < 0 || std::popcount(jmask) < L) continue;
    S coef = value_like(total, binomial_mpz(mpz_class(L - n - 1), bottom));
    S urn = zero_like(c[0]);
    std::uint32_t sub = jmask;
    for (;;) {  // submasks of jmask, all sizes; keep the size-L ones
      if (std::popcount(sub) == L) urn += pr_urn_mask(c, sub);
      if (sub == 0) break;
      sub = (sub - 1) & jmask;
    }
    total += coef * urn / complement_sum(c, jmask);
  }
  return total;
}

}  // namespace detail

// All closed-form variants and the window-contribution partition agree at
// random points. Proved equivalences: any mismatch is an implementation bug.
inline CheckReport check_form_equivalence(int k, int m, int n, int trials, CheckMode mode,
                                          std::uint64_t seed = 0,
                                          long prime = ModScalar::kDefaultPrime) {
  if (k < 1 || k > std::min(m, n)) throw DomainError("k out of range");
  if (m > 12 || n > 12) throw DomainError("subset enumeration limited to 12 per side");
  if (k - 1 > 9) throw DomainError("window enumeration limited to 9 indices");
  CheckReport rep;
  rep.name = "form_equivalence";
  rep.mode = mode;
  for (int t = 0; t < trials; ++t) {
    detail::run_trial(rep, t, seed, [&](std::mt19937_64& rng) -> std::optional<std::string> {
      if (mode == CheckMode::kRational) {
        RankOneRates<Rational> rates{detail::random_rational_point_vec(rng, m),
                                     detail::random_rational_point_vec(rng, n)};
        return detail::form_mismatch(k, rates);
      }
      RankOneRates<ModScalar> rates{detail::random_mod_vec(rng, m, prime),
                                    detail::random_mod_vec(rng, n, prime)};
      return detail::form_mismatch(k, rates);
    });
  }
  if (mode == CheckMode::kModular)
    rep.false_pass_bound = detail::schwartz_zippel_note(
        std::pow(2.0, m) + std::pow(2.0, n), prime, trials);
  return rep;
}

// The binomial-weighted reciprocal sum over column subsets equals its
// urn-probability refinement. Proved: a mismatch is a bug.
inline CheckReport check_basic_identity(int n, int H, int L, int trials, CheckMode mode,
                                        std::uint64_t seed = 0,
                                        long prime = ModScalar::kDefaultPrime) {
  if (n < 1 || n > 12) throw DomainError("side must be between 1 and 12");
  if (L < 1 || L > H || H > n - 1) throw DomainError("need 0 < L <= H <= n-1");
  CheckReport rep;
  rep.name = "basic_identity";
  rep.mode = mode;
  for (int t = 0; t < trials; ++t) {
    detail::run_trial(rep, t, seed, [&](std::mt19937_64& rng) -> std::optional<std::string> {
      auto run = [&](const auto& c) -> std::optional<std::string> {
        auto lhs = detail::basic_lhs(n, H, L, c);
        auto rhs = detail::basic_rhs(n, H, L, c);
        if (lhs == rhs) return std::nullopt;
        return "sides differ at c=" + detail::vec_str(c) + ": lhs=" + detail::scalar_str(lhs) +
               " rhs=" + detail::scalar_str(rhs);
      };
      if (mode == CheckMode::kRational) return run(detail::random_rational_point_vec(rng, n));
      return run(detail::random_mod_vec(rng, n, prime));
    });
  }
  if (mode == CheckMode::kModular)
    rep.false_pass_bound = detail::schwartz_zippel_note(std::pow(2.0, n + 1), prime, trials);
  return rep;
}

// Setting the first l row rates to zero in the leading-window expansion
// matches the shrunken closed form (small k) or its column-removal mixture
// (large k). Proved: a mismatch is a bug.
inline CheckReport check_limit_identities(int k, int m, int n, int l, int trials, CheckMode mode,
                                          std::uint64_t seed = 0,
                                          long prime = ModScalar::kDefaultPrime) {
  if (k < 1 || k > std::min(m, n)) throw DomainError("k out of range");
  if (l < 1 || l >= m) throw DomainError("need 1 <= l < m");
  if (k > m - l && m - l <= 0) throw DomainError("tail must keep at least one row");
  if (m > 12 || n > 12) throw DomainError("subset enumeration limited to 12 per side");
  CheckReport rep;
  rep.name = "limit_identities";
  rep.mode = mode;
  for (int t = 0; t < trials; ++t) {
    detail::run_trial(rep, t, seed, [&](std::mt19937_64& rng) -> std::optional<std::string> {
      auto run = [&](auto zero, auto tail_draw) -> std::optional<std::string> {
        using S = decltype(zero);
        std::vector<S> r(l, zero);
        std::vector<S> tail = tail_draw(m - l);
        r.insert(r.end(), tail.begin(), tail.end());
        std::vector<S> c = tail_draw(n);
        S lhs = detail::limit_lhs(k, l, r, c);
        S rhs = detail::limit_rhs(k, l, r, c);
        if (lhs == rhs) return std::nullopt;
        return "sides differ at r=" + detail::vec_str(r) + " c=" + detail::vec_str(c) +
               ": lhs=" + detail::scalar_str(lhs) + " rhs=" + detail::scalar_str(rhs);
      };
      if (mode == CheckMode::kRational)
        return run(Rational(0),
                   [&](int len) { return detail::random_rational_point_vec(rng, len); });
      return run(ModScalar(0, prime),
                 [&](int len) { return detail::random_mod_vec(rng, len, prime); });
    });
  }
  if (mode == CheckMode::kModular)
    rep.false_pass_bound = detail::schwartz_zippel_note(
        std::pow(2.0, m) + std::pow(2.0, n), prime, trials);
  return rep;
}

// Strict decrease under single-rate bumps, positivity of the signed component
// functions, and the first-derivative identity checked through dual numbers.
// Proved: a mismatch is a bug. Rational points only.
inline CheckReport check_monotonicity_and_derivative(int k, int m, int n, int trials,
                                                     std::uint64_t seed = 0) {
  if (k < 1 || k > std::min(m, n)) throw DomainError("k out of range");
  if (m > 12 || n > 12) throw DomainError("subset enumeration limited to 12 per side");
  CheckReport rep;
  rep.name = "monotonicity_derivative";
  rep.mode = CheckMode::kRational;
  for (int t = 0; t < trials; ++t) {
    detail::run_trial(rep, t, seed, [&](std::mt19937_64& rng) -> std::optional<std::string> {
      RankOneRates<Rational> rates{detail::random_rational_point_vec(rng, m),
                                   detail::random_rational_point_vec(rng, n)};
      const Rational ref = f_main(k, rates);

      // (a) strictly decreasing in every single rate
      std::uniform_int_distribution<int> pick_row(0, m - 1), pick_col(0, n - 1);
      RankOneRates<Rational> bumped = rates;
      int i = pick_row(rng);
      bumped.r[i] += detail::random_point_rational(rng);
      if (!(f_main(k, bumped) < ref))
        return "no strict decrease bumping row rate " + std::to_string(i) +
               " at r=" + detail::vec_str(rates.r) + " c=" + detail::vec_str(rates.c);
      bumped = rates;
      int j = pick_col(rng);
      bumped.c[j] += detail::random_point_rational(rng);
      if (!(f_main(k, bumped) < ref))
        return "no strict decrease bumping column rate " + std::to_string(j) +
               " at r=" + detail::vec_str(rates.r) + " c=" + detail::vec_str(rates.c);

      // (b) dual-number derivative in the first row rate vs the component sum
      RankOneRates<DualRational> dual;
      for (int a = 0; a < m; ++a)
        dual.r.push_back(DualRational(rates.r[a], Rational(a == 0 ? 1 : 0)));
      for (int b = 0; b < n; ++b) dual.c.push_back(DualRational(rates.c[b], Rational(0)));
      DualRational val = f_main(k, dual);
      if (!(val.a == ref)) return "dual value part drifted from the plain evaluation";
      Rational expect(0);
      for (std::uint32_t imask = 0; imask < (1u << m); ++imask) {
        if (imask & 1u) continue;  // the varied row never sits inside the window
        if (imask == (1u << m) - 1u) continue;
        for (std::uint32_t jmask = 0; jmask + 1 < (1u << n); ++jmask) {
          if (std::popcount(imask) + std::popcount(jmask) != k - 1) continue;
          expect += f_component(2, rates.r, imask) * f_component(1, rates.c, jmask);
        }
      }
      if (!(Rational(0) - val.b == expect))
        return "derivative identity fails at r=" + detail::vec_str(rates.r) +
               " c=" + detail::vec_str(rates.c) + ": dual=" + (Rational(0) - val.b).str() +
               " component sum=" + expect.str();

      // (c) the component functions stay positive
      for (int ell = 1; ell <= 3; ++ell) {
        for (std::uint32_t imask = 0; imask + 1 < (1u << m); ++imask)
          if (!(f_component(ell, rates.r, imask) > Rational(0)))
            return "row component function not positive";
        for (std::uint32_t jmask = 0; jmask + 1 < (1u << n); ++jmask)
          if (!(f_component(ell, rates.c, jmask) > Rational(0)))
            return "column component function not positive";
      }
      return std::nullopt;
    });
  }
  return rep;
}

// Recursive exact engine against the closed form on square product-rate
// matrices: exact rationals in the proved range k <= 3, random residues at
// k = 4 where agreement is evidence for the conjecture rather than proof.
inline CheckReport check_exact_vs_formula(int k, int trials,
                                          long prime = ModScalar::kDefaultPrime,
                                          std::uint64_t seed = 0) {
  if (k < 1 || k > 4) throw DomainError("square exact engine covers k <= 4");
  CheckReport rep;
  rep.name = "exact_vs_formula";
  rep.mode = CheckMode::kModular;
  rep.conjectural = k == 4;

  if (k <= 3) {
    detail::run_trial(rep, 0, seed ^ 0x5eedull, [&](std::mt19937_64& rng)
                                                    -> std::optional<std::string> {
      RankOneRates<Rational> rates{detail::random_rational_point_vec(rng, k),
                                   detail::random_rational_point_vec(rng, k)};
      Rational want = f_main(k, rates);
      Rational got = expected_min_exact(rate_grid(rates), k);
      if (got == want) return std::nullopt;
      return "rational point disagrees: r=" + detail::vec_str(rates.r) +
             " c=" + detail::vec_str(rates.c) + " exact=" + got.str() + " formula=" + want.str();
    });
  }

  for (int t = 0; t < trials; ++t) {
    detail::run_trial(rep, t, seed, [&](std::mt19937_64& rng) -> std::optional<std::string> {
      RankOneRates<ModScalar> rates{detail::random_mod_vec(rng, k, prime),
                                    detail::random_mod_vec(rng, k, prime)};
      ModScalar want = f_main(k, rates);
      Grid<ModScalar> A(k, k, ModScalar(1, prime));
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) A.at(i, j) = rates.r[i] * rates.c[j];
      ModScalar got = expected_min_exact(A, k);
      if (got == want) return std::nullopt;
      return "residue point disagrees: r=" + detail::vec_str(rates.r) +
             " c=" + detail::vec_str(rates.c) + " exact=" + std::to_string(got.value()) +
             " formula=" + std::to_string(want.value());
    });
  }
  rep.false_pass_bound =
      detail::schwartz_zippel_note(std::pow(2.0, k * k + 1), prime, trials);
  return rep;
}

}  // namespace minkassign
