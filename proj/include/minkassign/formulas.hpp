#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "minkassign/binomial.hpp"
#include "minkassign/errors.hpp"
#include "minkassign/matrix.hpp"
#include "minkassign/scalar.hpp"

namespace minkassign {

// Rank-one rate data: entry (i, j) has rate r[i] * c[j]. All evaluators below
// are generic over the scalar field; with exact rationals the preconditions
// keep every denominator positive, with modular residues a vanishing
// denominator surfaces as a retryable unlucky-prime error.
template <class S>
struct RankOneRates {
  std::vector<S> r, c;
};

inline constexpr int kMaxRateCount = 20;  // subset enumeration is 2^m

template <class S>
void validate_rates(const RankOneRates<S>& rates) {
  if (rates.r.empty() || rates.c.empty()) throw DomainError("rate vectors must be nonempty");
  if (rates.r.size() > kMaxRateCount || rates.c.size() > kMaxRateCount)
    throw DomainError("at most 20 rates per side");
  for (const S& x : rates.r)
    if (!is_valid_rate(x)) throw DomainError("row rates must be valid (positive)");
  for (const S& x : rates.c)
    if (!is_valid_rate(x)) throw DomainError("column rates must be valid (positive)");
}

template <class S>
Grid<S> rate_grid(const RankOneRates<S>& rates) {
  validate_rates(rates);
  Grid<S> g(static_cast<int>(rates.r.size()), static_cast<int>(rates.c.size()));
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) g.at(i, j) = rates.r[i] * rates.c[j];
  return g;
}

namespace detail {

template <class S>
void validate_k(int k, const RankOneRates<S>& rates) {
  validate_rates(rates);
  int m = static_cast<int>(rates.r.size()), n = static_cast<int>(rates.c.size());
  if (k < 1 || k > std::min(m, n)) throw DomainError("k must satisfy 1 <= k <= min(m,n)");
}

// sum of w_i over indices NOT in mask; mask must leave at least one index
template <class S>
S complement_sum(const std::vector<S>& w, std::uint32_t mask) {
  const int m = static_cast<int>(w.size());
  S total = zero_like(w.front());
  bool seeded = false;
  for (int i = 0; i < m; ++i) {
    if (mask >> i & 1u) continue;
    if (!seeded) {
      total = w[i];
      seeded = true;
    } else {
      total += w[i];
    }
  }
  if (!seeded) throw DomainError("subset must leave a nonempty complement");
  return total;
}

template <class S>
std::uint32_t set_to_mask(const std::vector<S>& w, const std::vector<int>& idx) {
  std::uint32_t mask = 0;
  for (int i : idx) {
    if (i < 0 || i >= static_cast<int>(w.size())) throw DomainError("index out of range");
    if (mask >> i & 1u) throw DomainError("indices must be distinct");
    mask |= 1u << i;
  }
  return mask;
}

// buckets[a] = sum over proper subsets I of size a of 1 / (sum of w outside I)
template <class S>
std::vector<S> reciprocal_by_size(const std::vector<S>& w, int max_size) {
  const int m = static_cast<int>(w.size());
  const S one = one_like(w.front());
  std::vector<S> buckets(max_size + 1, zero_like(w.front()));
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    int a = std::popcount(mask);
    if (a > max_size || a == m) continue;
    buckets[a] += one / complement_sum(w, mask);
  }
  return buckets;
}

}  // namespace detail

// ---- urn model -------------------------------------------------------------
// Balls are drawn one at a time without replacement, each with probability
// proportional to the weights of the balls still present.

// probability that the first draws are exactly this sequence, in order
template <class S>
S pr_urn_seq(const std::vector<S>& weights, const std::vector<int>& order) {
  detail::set_to_mask(weights, order);
  const S W = detail::complement_sum(weights, 0);
  S prob = one_like(W);
  S drawn = zero_like(W);
  for (int i : order) {
    prob *= weights[i] / (W - drawn);
    drawn += weights[i];
  }
  return prob;
}

// probability that the first |I| draws comprise the set I: sum over orderings
template <class S>
S pr_urn_set_orderings(const std::vector<S>& weights, std::vector<int> I) {
  detail::set_to_mask(weights, I);
  if (I.size() > 9) throw DomainError("ordering sum limited to sets of at most 9");
  std::sort(I.begin(), I.end());
  S total = zero_like(weights.front());
  do {
    total += pr_urn_seq(weights, I);
  } while (std::next_permutation(I.begin(), I.end()));
  return total;
}

namespace detail {

template <class S>
S pr_urn_mask(const std::vector<S>& weights, std::uint32_t mask) {
  const int m = static_cast<int>(weights.size());
  if (mask == (1u << m) - 1u) return one_like(weights.front());  // all balls drawn
  const S outside = complement_sum(weights, mask);
  S total = zero_like(weights.front());
  std::uint32_t sub = mask;
  for (;;) {
    S term = outside / complement_sum(weights, sub);
    if ((std::popcount(mask) - std::popcount(sub)) % 2 != 0) {
      total -= term;
    } else {
      total += term;
    }
    if (sub == 0) break;
    sub = (sub - 1) & mask;
  }
  return total;
}

}  // namespace detail

// same probability by inclusion-exclusion over blocked subsets
template <class S>
S pr_urn_set_incex(const std::vector<S>& weights, const std::vector<int>& I) {
  return detail::pr_urn_mask(weights, detail::set_to_mask(weights, I));
}

template <class S>
S pr_urn_set(const std::vector<S>& weights, const std::vector<int>& I) {
  return pr_urn_set_incex(weights, I);
}

// probability that the first |T| draws comprise T and the first |I| draws
// comprise I, for T inside I
template <class S>
S pr_urn_nested(const std::vector<S>& weights, const std::vector<int>& T,
                const std::vector<int>& I) {
  std::uint32_t tmask = detail::set_to_mask(weights, T);
  std::uint32_t imask = detail::set_to_mask(weights, I);
  if ((tmask & imask) != tmask) throw DomainError("T must be a subset of I");
  // after the T phase the urn holds the complement of T; reindex it
  std::vector<S> rest;
  std::vector<int> remainder;
  for (int i = 0; i < static_cast<int>(weights.size()); ++i) {
    if (tmask >> i & 1u) continue;
    if (imask >> i & 1u) remainder.push_back(static_cast<int>(rest.size()));
    rest.push_back(weights[i]);
  }
  return detail::pr_urn_mask(weights, tmask) * pr_urn_set_incex(rest, remainder);
}

// ---- equivalent closed forms ----------------------------------------------
// Six ways to write the same function of (k, r, c). The alternating-sum form
// is the reference; the others re-derive it with different term structure and
// are kept for cross-validation.

// alternating sum over subset pairs, with positive-top binomial coefficients
template <class S>
S f_main(int k, const RankOneRates<S>& rates) {
  detail::validate_k(k, rates);
  const int m = static_cast<int>(rates.r.size()), n = static_cast<int>(rates.c.size());
  std::vector<S> A = detail::reciprocal_by_size(rates.r, k - 1);
  std::vector<S> B = detail::reciprocal_by_size(rates.c, k - 1);
  S total = zero_like(rates.r.front());
  for (int a = 0; a <= k - 1; ++a)
    for (int b = 0; a + b <= k - 1; ++b) {
      mpz_class co = binomial_mpz(mpz_class(m + n - 1 - a - b), k - 1 - a - b);
      if ((k - 1 - a - b) % 2 != 0) co = -co;
      total += value_like(total, co) * A[a] * B[b];
    }
  return total;
}

// same sum with the sign folded into a negative-top binomial coefficient
template <class S>
S f_negbinom(int k, const RankOneRates<S>& rates) {
  detail::validate_k(k, rates);
  const int m = static_cast<int>(rates.r.size()), n = static_cast<int>(rates.c.size());
  std::vector<S> A = detail::reciprocal_by_size(rates.r, k - 1);
  std::vector<S> B = detail::reciprocal_by_size(rates.c, k - 1);
  S total = zero_like(rates.r.front());
  for (int a = 0; a <= k - 1; ++a)
    for (int b = 0; a + b <= k - 1; ++b)
      total += value_like(total, binomial_mpz(mpz_class(k - 1 - m - n), k - 1 - a - b)) * A[a] *
               B[b];
  return total;
}

// double sum over nested subset pairs I inside I', J inside J'; for a fixed
// outer pair the inner sums factor into one row and one column factor
template <class S>
S f_inclexcl(int k, const RankOneRates<S>& rates) {
  detail::validate_k(k, rates);
  auto side = [&](const std::vector<S>& w) {
    const int m = static_cast<int>(w.size());
    std::vector<S> buckets(k, zero_like(w.front()));
    for (std::uint32_t outer = 0; outer < (1u << m); ++outer) {
      int a = std::popcount(outer);
      if (a > k - 1 || a == m) continue;
      S inner = zero_like(w.front());
      std::uint32_t sub = outer;
      for (;;) {
        S term = one_like(inner) / detail::complement_sum(w, sub);
        if ((a - std::popcount(sub)) % 2 != 0) {
          inner -= term;
        } else {
          inner += term;
        }
        if (sub == 0) break;
        sub = (sub - 1) & outer;
      }
      buckets[a] += inner;
    }
    return buckets;
  };
  std::vector<S> rowb = side(rates.r), colb = side(rates.c);
  S total = zero_like(rates.r.front());
  for (int a = 0; a <= k - 1; ++a)
    for (int b = 0; a + b <= k - 1; ++b) total += rowb[a] * colb[b];
  return total;
}

// urn form: all terms are probabilities over positive denominators, which
// makes positivity visible term by term
template <class S>
S f_urn(int k, const RankOneRates<S>& rates) {
  detail::validate_k(k, rates);
  auto side = [&](const std::vector<S>& w) {
    const int m = static_cast<int>(w.size());
    std::vector<S> buckets(k, zero_like(w.front()));
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
      int a = std::popcount(mask);
      if (a > k - 1 || a == m) continue;
      buckets[a] += detail::pr_urn_mask(w, mask) / detail::complement_sum(w, mask);
    }
    return buckets;
  };
  std::vector<S> rowb = side(rates.r), colb = side(rates.c);
  S total = zero_like(rates.r.front());
  for (int a = 0; a <= k - 1; ++a)
    for (int b = 0; a + b <= k - 1; ++b) total += rowb[a] * colb[b];
  return total;
}

namespace detail {

// accumulate, over ordered length-(k-1) sequences of distinct indices, the
// sequence probability divided by the weight remaining after t draws
template <class S>
void flag_side_rec(const std::vector<S>& w, const S& W, int len, std::uint32_t used, int depth,
                   const S& prob, std::vector<S>& prefix, std::vector<S>& out) {
  if (depth == len) {
    for (int t = 0; t <= len; ++t) out[t] += prob / (W - prefix[t]);
    return;
  }
  for (int i = 0; i < static_cast<int>(w.size()); ++i) {
    if (used >> i & 1u) continue;
    prefix[depth + 1] = prefix[depth] + w[i];
    flag_side_rec(w, W, len, used | (1u << i), depth + 1, prob * (w[i] / (W - prefix[depth])),
                  prefix, out);
  }
}

template <class S>
std::vector<S> flag_side(const std::vector<S>& w, int k) {
  const S W = complement_sum(w, 0);
  std::vector<S> out(k, zero_like(w.front()));
  std::vector<S> prefix(k, zero_like(w.front()));
  flag_side_rec(w, W, k - 1, 0u, 0, one_like(w.front()), prefix, out);
  return out;
}

}  // namespace detail

// sum over pairs of ordered (k-1)-sequences; each term is the probability of
// the pair of draw orders times prefix-remainder reciprocals
template <class S>
S f_flag_ordered(int k, const RankOneRates<S>& rates) {
  detail::validate_k(k, rates);
  if (k - 1 > static_cast<int>(rates.r.size()) || k - 1 > static_cast<int>(rates.c.size()))
    throw DomainError("needs k-1 distinct indices on each side");
  std::vector<S> P = detail::flag_side(rates.r, k), Q = detail::flag_side(rates.c, k);
  S total = zero_like(rates.r.front());
  for (int t = 0; t <= k - 1; ++t)
    for (int u = 0; t + u <= k - 1; ++u) total += P[t] * Q[u];
  return total;
}

// signed reciprocal-power sum over subsets of a proper index set; positive at
// positive weights for every power ell >= 1
template <class S>
S f_component(int ell, const std::vector<S>& w, std::uint32_t iprime_mask) {
  if (ell < 1) throw DomainError("power must be at least 1");
  const int m = static_cast<int>(w.size());
  if (m == 0 || m > kMaxRateCount) throw DomainError("bad weight count");
  if (iprime_mask >= (1u << m) - 1u) throw DomainError("index set must be a proper subset");
  const int a = std::popcount(iprime_mask);
  S total = zero_like(w.front());
  std::uint32_t sub = iprime_mask;
  for (;;) {
    S den = detail::complement_sum(w, sub);
    S pw = one_like(total) / den;
    for (int e = 1; e < ell; ++e) pw /= den;
    if ((a - std::popcount(sub)) % 2 != 0) {
      total -= pw;
    } else {
      total += pw;
    }
    if (sub == 0) break;
    sub = (sub - 1) & iprime_mask;
  }
  return total;
}

template <class S>
S f_component(int ell, const std::vector<S>& w, const std::vector<int>& iprime) {
  return f_component(ell, w, detail::set_to_mask(w, iprime));
}

// the component-function form: sum of products of first-power components
template <class S>
S f_fg(int k, const RankOneRates<S>& rates) {
  detail::validate_k(k, rates);
  auto side = [&](const std::vector<S>& w) {
    const int m = static_cast<int>(w.size());
    std::vector<S> buckets(k, zero_like(w.front()));
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
      int a = std::popcount(mask);
      if (a > k - 1 || a == m) continue;
      buckets[a] += f_component(1, w, mask);
    }
    return buckets;
  };
  std::vector<S> rowb = side(rates.r), colb = side(rates.c);
  S total = zero_like(rates.r.front());
  for (int a = 0; a <= k - 1; ++a)
    for (int b = 0; a + b <= k - 1; ++b) total += rowb[a] * colb[b];
  return total;
}

// ---- expected contribution of one (k-1) x (k-1) submatrix ------------------

namespace detail {

template <class S>
struct DrawOrder {
  S prob;                 // probability of this draw order
  std::vector<S> prefix;  // prefix[t] = weight drawn after t draws
};

template <class S>
std::vector<DrawOrder<S>> draw_orders(const std::vector<S>& w, std::vector<int> idx) {
  std::sort(idx.begin(), idx.end());
  const S W = complement_sum(w, 0);
  std::vector<DrawOrder<S>> out;
  do {
    DrawOrder<S> d{one_like(W), {zero_like(W)}};
    for (int i : idx) {
      d.prob *= w[i] / (W - d.prefix.back());
      d.prefix.push_back(d.prefix.back() + w[i]);
    }
    out.push_back(std::move(d));
  } while (std::next_permutation(idx.begin(), idx.end()));
  return out;
}

}  // namespace detail

// expected share of the optimum carried by the submatrix on rows I, columns J
// when it hosts an optimal (k-1)-assignment: double sum over draw orders of I
// and J
template <class S>
S contribution(int k, const RankOneRates<S>& rates, const std::vector<int>& I,
               const std::vector<int>& J) {
  detail::validate_k(k, rates);
  if (static_cast<int>(I.size()) != k - 1 || static_cast<int>(J.size()) != k - 1)
    throw DomainError("index sets must have k-1 elements");
  detail::set_to_mask(rates.r, I);
  detail::set_to_mask(rates.c, J);
  if (I.size() > 9 || J.size() > 9) throw DomainError("permutation sum limited to 9 indices");
  const S R = detail::complement_sum(rates.r, 0), C = detail::complement_sum(rates.c, 0);
  std::vector<detail::DrawOrder<S>> rows = detail::draw_orders(rates.r, I);
  std::vector<detail::DrawOrder<S>> cols = detail::draw_orders(rates.c, J);
  S total = zero_like(R);
  for (const auto& dr : rows)
    for (const auto& dc : cols) {
      S inner = zero_like(R);
      for (int t = 0; t <= k - 1; ++t)
        for (int u = 0; t + u <= k - 1; ++u)
          inner += one_like(R) / ((R - dr.prefix[t]) * (C - dc.prefix[u]));
      total += dr.prob * dc.prob * inner;
    }
  return total;
}

// same quantity as a sum over nested draw events instead of draw orders
template <class S>
S contribution_tu(int k, const RankOneRates<S>& rates, const std::vector<int>& I,
                  const std::vector<int>& J) {
  detail::validate_k(k, rates);
  if (static_cast<int>(I.size()) != k - 1 || static_cast<int>(J.size()) != k - 1)
    throw DomainError("index sets must have k-1 elements");
  detail::set_to_mask(rates.r, I);
  detail::set_to_mask(rates.c, J);
  S total = zero_like(rates.r.front());
  const int ti = static_cast<int>(I.size()), tj = static_cast<int>(J.size());
  for (std::uint32_t ts = 0; ts < (1u << ti); ++ts)
    for (std::uint32_t us = 0; us < (1u << tj); ++us) {
      if (std::popcount(ts) + std::popcount(us) >= k) continue;
      std::vector<int> T, U;
      for (int p = 0; p < ti; ++p)
        if (ts >> p & 1u) T.push_back(I[p]);
      for (int p = 0; p < tj; ++p)
        if (us >> p & 1u) U.push_back(J[p]);
      S den = detail::complement_sum(rates.r, detail::set_to_mask(rates.r, T)) *
              detail::complement_sum(rates.c, detail::set_to_mask(rates.c, U));
      total += pr_urn_nested(rates.r, T, I) * pr_urn_nested(rates.c, U, J) / den;
    }
  return total;
}

// ---- specializations at equal rates -----------------------------------------

inline Rational cs_formula(int k, int m, int n) {
  if (k < 1 || k > m || m > n) throw DomainError("need 1 <= k <= m <= n");
  Rational total(0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; i + j < k; ++j) total += Rational(1, static_cast<long>(m - i) * (n - j));
  return total;
}

inline Rational parisi(int k) {
  if (k < 1) throw DomainError("k must be positive");
  Rational total(0);
  for (int i = 1; i <= k; ++i) total += Rational(1, static_cast<long>(i) * i);
  return total;
}

}  // namespace minkassign
