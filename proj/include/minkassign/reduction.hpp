#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "minkassign/errors.hpp"
#include "minkassign/matrix.hpp"
#include "minkassign/solver.hpp"

namespace minkassign {

// A matrix is k-reduced when every nonzero entry lies on some minimum
// k-assignment. Brute-force check, intended for small matrices.
template <class S>
bool is_k_reduced(const Grid<S>& Y, int k, std::uint64_t cap = 10'000'000) {
  S best = min_k_bruteforce(Y, k, cap).value;
  for (int i = 0; i < Y.rows(); ++i)
    for (int j = 0; j < Y.cols(); ++j)
      if (!(Y.at(i, j) == S{}) && !(min_through(Y, k, {i, j}, cap) == best)) return false;
  return true;
}

template <class S>
struct ReduceResult {
  Grid<S> Y;
  std::vector<std::pair<Cell, S>> removed;  // only cells with a positive reduction
};

// Greedy reduction: walk the cells in the given order (default row-major) and
// subtract from each the largest amount that keeps the matrix nonnegative and
// the minimum k-assignment value unchanged. The result is k-reduced.
template <class S>
ReduceResult<S> k_reduce(const Grid<S>& X, int k, const std::vector<Cell>* order = nullptr,
                         std::uint64_t cap = 10'000'000) {
  const int m = X.rows(), n = X.cols();
  if (k < 1 || k > std::min(m, n)) throw DomainError("k out of range for this grid");
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (X.at(i, j) < S{}) throw DomainError("reduction requires a nonnegative matrix");

  std::vector<Cell> cells;
  if (order) {
    cells = *order;
    std::vector<Cell> sorted = cells;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Cell> all;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) all.push_back({i, j});
    if (sorted != all) throw DomainError("entry order must visit every cell exactly once");
  } else {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) cells.push_back({i, j});
  }

  ReduceResult<S> res{X, {}};
  const S s = min_k_bruteforce(X, k, cap).value;
  for (const Cell& c : cells) {
    S slack = min_through(res.Y, k, c, cap) - s;
    S alpha = std::min(res.Y.at(c), slack);
    if (S{} < alpha) {
      res.Y.at(c) -= alpha;
      res.removed.push_back({c, alpha});
    }
  }
  return res;
}

template <class S>
struct LambdaMu {
  std::vector<S> lambda;  // one per row
  std::vector<S> mu;      // one per column
};

// Pivot construction: with d the largest entry, at position (t, u), take
// lambda_i = Y(i, u) and mu_j = Y(t, j) - d. On a k-reduced matrix this gives
// Y(i, j) = max(0, lambda_i + mu_j) with equality exactly at entries that lie
// on some minimum k-assignment.
template <class S>
LambdaMu<S> lambda_mu_raw(const Grid<S>& Y) {
  int ti = 0, tu = 0;
  for (int i = 0; i < Y.rows(); ++i)
    for (int j = 0; j < Y.cols(); ++j)
      if (Y.at(ti, tu) < Y.at(i, j)) ti = i, tu = j;
  const S d = Y.at(ti, tu);
  LambdaMu<S> out;
  out.lambda.reserve(Y.rows());
  out.mu.reserve(Y.cols());
  for (int i = 0; i < Y.rows(); ++i) out.lambda.push_back(Y.at(i, tu));
  for (int j = 0; j < Y.cols(); ++j) out.mu.push_back(Y.at(ti, j) - d);
  return out;
}

template <class S>
LambdaMu<S> lambda_mu(const Grid<S>& Y, int k, std::uint64_t cap = 10'000'000) {
  for (int i = 0; i < Y.rows(); ++i)
    for (int j = 0; j < Y.cols(); ++j)
      if (Y.at(i, j) < S{}) throw ContractError("matrix must be nonnegative");
  if (!is_k_reduced(Y, k, cap)) throw ContractError("matrix is not k-reduced");
  return lambda_mu_raw(Y);
}

// One cone generator: the 0/1 matrix that is zero on rows I and columns J and
// one elsewhere, scaled by coef.
template <class S>
struct VIJTerm {
  std::vector<int> I, J;  // sorted row/col sets, |I| + |J| < k
  S coef{};
};

// Writes a k-reduced matrix as a nonnegative combination of cone generators.
// Every minimum k-assignment sigma of Y meets the support of each generator
// in exactly k - |I| - |J| cells; sigma is only used to validate the input.
template <class S>
std::vector<VIJTerm<S>> vij_decompose(const Grid<S>& Y, int k, const std::vector<Cell>& sigma,
                                      std::uint64_t cap = 10'000'000) {
  const int m = Y.rows(), n = Y.cols();
  if (k < 1 || k > std::min(m, n)) throw DomainError("k out of range for this grid");
  std::vector<Cell> sig = normalized_assignment(sigma);
  if (static_cast<int>(sig.size()) != k) throw ContractError("sigma must have k cells");
  SolveResult<S> sol = min_k_bruteforce(Y, k, cap);
  if (!(assignment_value(Y, sig) == sol.value))
    throw ContractError("sigma is not a minimum k-assignment");
  if (!is_k_reduced(Y, k, cap)) throw ContractError("matrix is not k-reduced");

  std::vector<VIJTerm<S>> terms;
  Grid<S> W = Y;
  for (int iter = 0; iter <= m * n; ++iter) {
    bool all_zero = true;
    for (int i = 0; i < m && all_zero; ++i)
      for (int j = 0; j < n && all_zero; ++j) all_zero = W.at(i, j) == S{};
    if (all_zero) return terms;

    // order rows/cols so lambda and mu are weakly increasing (stable: ties
    // keep original order)
    LambdaMu<S> lm = lambda_mu_raw(W);
    std::vector<int> rperm(m), cperm(n);
    std::iota(rperm.begin(), rperm.end(), 0);
    std::iota(cperm.begin(), cperm.end(), 0);
    std::stable_sort(rperm.begin(), rperm.end(),
                     [&](int a, int b) { return lm.lambda[a] < lm.lambda[b]; });
    std::stable_sort(cperm.begin(), cperm.end(),
                     [&](int a, int b) { return lm.mu[a] < lm.mu[b]; });
    auto at = [&](int i, int j) -> const S& { return W.at(rperm[i], cperm[j]); };

    // first nonzero within the band i + j <= k - 1, then walk up/left to a
    // cell whose upper and left neighbors are zero
    int pi = -1, pj = -1;
    for (int i = 0; i < std::min(m, k) && pi < 0; ++i)
      for (int j = 0; i + j <= k - 1 && j < n; ++j)
        if (S{} < at(i, j)) {
          pi = i;
          pj = j;
          break;
        }
    if (pi < 0) throw ContractError("no usable pivot: matrix was not k-reduced");
    for (;;) {
      if (pi > 0 && S{} < at(pi - 1, pj)) {
        --pi;
      } else if (pj > 0 && S{} < at(pi, pj - 1)) {
        --pj;
      } else {
        break;
      }
    }

    VIJTerm<S> term;
    term.coef = at(pi, pj);
    for (int i = 0; i < pi; ++i) term.I.push_back(rperm[i]);
    for (int j = 0; j < pj; ++j) term.J.push_back(cperm[j]);
    std::sort(term.I.begin(), term.I.end());
    std::sort(term.J.begin(), term.J.end());

    std::vector<bool> ri(m, false), cj(n, false);
    for (int i : term.I) ri[i] = true;
    for (int j : term.J) cj[j] = true;
    for (int i = 0; i < m; ++i) {
      if (ri[i]) continue;
      for (int j = 0; j < n; ++j) {
        if (cj[j]) continue;
        W.at(i, j) -= term.coef;
        if (W.at(i, j) < S{}) throw ContractError("decomposition went negative");
      }
    }
    terms.push_back(std::move(term));
  }
  throw ContractError("decomposition failed to terminate");
}

// Evaluate a generator against an assignment: number of cells outside rows I
// and columns J.
template <class S>
int vij_dot(const VIJTerm<S>& term, const std::vector<Cell>& sigma) {
  int count = 0;
  for (const Cell& c : sigma) {
    bool in_i = std::binary_search(term.I.begin(), term.I.end(), c.first);
    bool in_j = std::binary_search(term.J.begin(), term.J.end(), c.second);
    if (!in_i && !in_j) ++count;
  }
  return count;
}

struct SplitResult {
  std::vector<Cell> first, second;  // two k-assignments summing to the input
};

// Splits a {0,1,2} matrix with row/column sums at most 2 and total 2k into two
// k-assignments. Cells holding 2 go to both sides; the 1-cells form disjoint
// paths and cycles (each has at most one same-row and one same-col neighbor)
// which are two-colored, pairing odd paths so both sides end up with k cells.
inline SplitResult split_double_assignment(const Grid<int>& T, int k) {
  const int m = T.rows(), n = T.cols();
  int total = 0;
  std::vector<int> row_sum(m, 0), col_sum(n, 0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      int v = T.at(i, j);
      if (v < 0 || v > 2) throw DomainError("entries must be 0, 1 or 2");
      row_sum[i] += v;
      col_sum[j] += v;
      total += v;
    }
  for (int i = 0; i < m; ++i)
    if (row_sum[i] > 2) throw DomainError("row sum exceeds 2");
  for (int j = 0; j < n; ++j)
    if (col_sum[j] > 2) throw DomainError("column sum exceeds 2");
  if (total != 2 * k) throw DomainError("total must equal 2k");

  SplitResult out;
  std::vector<Cell> ones;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      if (T.at(i, j) == 2) {
        out.first.push_back({i, j});
        out.second.push_back({i, j});
      } else if (T.at(i, j) == 1) {
        ones.push_back({i, j});
      }
    }

  auto row_buddy = [&](const Cell& c) -> int {
    for (std::size_t t = 0; t < ones.size(); ++t)
      if (ones[t].first == c.first && ones[t] != c) return static_cast<int>(t);
    return -1;
  };
  auto col_buddy = [&](const Cell& c) -> int {
    for (std::size_t t = 0; t < ones.size(); ++t)
      if (ones[t].second == c.second && ones[t] != c) return static_cast<int>(t);
    return -1;
  };

  std::vector<int> color(ones.size(), -1);  // 0 -> first, 1 -> second
  int odd_paths_seen = 0;
  for (std::size_t start = 0; start < ones.size(); ++start) {
    if (color[start] != -1) continue;

    // collect the component containing start (cells are in lex order, so the
    // first unvisited cell is the component's lex-smallest vertex)
    std::vector<int> comp{static_cast<int>(start)};
    std::vector<bool> seen(ones.size(), false);
    seen[start] = true;
    for (std::size_t q = 0; q < comp.size(); ++q) {
      for (int nb : {row_buddy(ones[comp[q]]), col_buddy(ones[comp[q]])}) {
        if (nb >= 0 && !seen[nb]) {
          seen[nb] = true;
          comp.push_back(nb);
        }
      }
    }

    // walk the component as a path or cycle, starting from an endpoint when
    // one exists (path), else from the lex-smallest vertex (cycle)
    int head = -1;
    for (int v : comp) {
      int deg = (row_buddy(ones[v]) >= 0 ? 1 : 0) + (col_buddy(ones[v]) >= 0 ? 1 : 0);
      if (deg < 2 && (head < 0 || ones[v] < ones[head])) head = v;
    }
    bool is_path = head >= 0;
    if (!is_path) head = static_cast<int>(start);

    int first_color = 0;
    if (is_path && comp.size() % 2 == 1) {
      // alternate the majority side across odd paths to keep the split even
      first_color = odd_paths_seen % 2;
      ++odd_paths_seen;
    }

    int prev = -1, cur = head, c = first_color;
    for (std::size_t steps = 0; steps < comp.size(); ++steps) {
      color[cur] = c;
      c = 1 - c;
      int rb = row_buddy(ones[cur]), cb = col_buddy(ones[cur]);
      int next = -1;
      if (rb >= 0 && rb != prev && color[rb] == -1) next = rb;
      else if (cb >= 0 && cb != prev && color[cb] == -1) next = cb;
      if (next < 0) break;
      prev = cur;
      cur = next;
    }
  }

  for (std::size_t t = 0; t < ones.size(); ++t) {
    (color[t] == 0 ? out.first : out.second).push_back(ones[t]);
  }
  std::sort(out.first.begin(), out.first.end());
  std::sort(out.second.begin(), out.second.end());
  if (static_cast<int>(out.first.size()) != k || !is_assignment(out.first) ||
      !is_assignment(out.second))
    throw DomainError("input does not split into two k-assignments");
  return out;
}

}  // namespace minkassign
