#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "minkassign/errors.hpp"
#include "minkassign/matrix.hpp"

namespace minkassign {

template <class S>
struct SolveResult {
  S value{};
  std::vector<std::vector<Cell>> minimizers;  // every optimal assignment, enumeration order
};

namespace detail {

inline std::uint64_t falling(std::uint64_t n, int k) {
  std::uint64_t out = 1;
  for (int t = 0; t < k; ++t) out *= n - t;
  return out;
}

inline std::uint64_t choose_u64(int n, int k) {
  if (k < 0 || k > n) return 0;
  long double acc = 1;
  for (int t = 1; t <= k; ++t) acc = acc * (n - k + t) / t;
  return static_cast<std::uint64_t>(acc + 0.5L);
}

// All size-k subsets of {0..n-1} in lexicographic order.
inline bool next_subset(std::vector<int>& idx, int n) {
  int k = static_cast<int>(idx.size());
  for (int t = k - 1; t >= 0; --t) {
    if (idx[t] < n - k + t) {
      ++idx[t];
      for (int u = t + 1; u < k; ++u) idx[u] = idx[u - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace detail

// Exhaustive minimum k-assignment: smallest sum of k entries with no two in
// the same row or column. Returns the exact optimum and every assignment
// attaining it. Throws EnumerationCapError when C(m,k)*C(n,k)*k! exceeds cap.
template <class S>
SolveResult<S> min_k_bruteforce(const Grid<S>& X, int k, std::uint64_t cap = 10'000'000) {
  const int m = X.rows(), n = X.cols();
  if (k < 1 || k > std::min(m, n)) throw DomainError("k out of range for this grid");
  std::uint64_t work =
      detail::choose_u64(m, k) * detail::choose_u64(n, k) * detail::falling(k, k);
  if (work > cap) {
    throw EnumerationCapError("assignment enumeration would need " + std::to_string(work) +
                              " evaluations (cap " + std::to_string(cap) + ")");
  }

  SolveResult<S> res;
  bool have = false;
  std::vector<int> rowsel(k), colsel(k);
  std::iota(rowsel.begin(), rowsel.end(), 0);
  do {
    std::iota(colsel.begin(), colsel.end(), 0);
    do {
      std::vector<int> perm(k);
      std::iota(perm.begin(), perm.end(), 0);
      do {
        S value = X.at(rowsel[0], colsel[perm[0]]);
        for (int t = 1; t < k; ++t) value += X.at(rowsel[t], colsel[perm[t]]);
        if (!have || value < res.value) {
          have = true;
          res.value = value;
          res.minimizers.clear();
        }
        if (value == res.value) {
          std::vector<Cell> cells(k);
          for (int t = 0; t < k; ++t) cells[t] = {rowsel[t], colsel[perm[t]]};
          res.minimizers.push_back(std::move(cells));  // rows ascending, already sorted
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
    } while (detail::next_subset(colsel, n));
  } while (detail::next_subset(rowsel, m));
  return res;
}

template <class S>
std::vector<Cell> lex_smallest(const std::vector<std::vector<Cell>>& assignments) {
  return *std::min_element(assignments.begin(), assignments.end());
}

inline std::vector<Cell> lex_smallest_minimizer(const std::vector<std::vector<Cell>>& mins) {
  if (mins.empty()) throw DomainError("no minimizers");
  return *std::min_element(mins.begin(), mins.end());
}

// Best value among k-assignments forced through one position.
template <class S>
S min_through(const Grid<S>& X, int k, const Cell& pos, std::uint64_t cap = 10'000'000) {
  if (k < 1 || k > std::min(X.rows(), X.cols())) throw DomainError("k out of range");
  S here = X.at(pos);
  if (k == 1) return here;
  return here + min_k_bruteforce(X.dropped(pos.first, pos.second), k - 1, cap).value;
}

template <class S>
bool participates(const Grid<S>& X, int k, const Cell& pos, std::uint64_t cap = 10'000'000) {
  return min_through(X, k, pos, cap) == min_k_bruteforce(X, k, cap).value;
}

// Auxiliary matrix over a (t-1)-row/column frame: the framed entries, each
// framed row extended by its best entry outside the frame columns, each framed
// column extended likewise, and a corner holding the best entry outside both.
// Ties resolve to the smallest (row, col). Provenance records which source
// cell backs each border entry.
template <class S>
struct AuxMatrix {
  Grid<S> Y;
  std::vector<int> I, J;      // sorted frame rows/cols, size t-1
  std::vector<Cell> row_ext;  // row_ext[i] backs Y(i, t-1)
  std::vector<Cell> col_ext;  // col_ext[j] backs Y(t-1, j)
  Cell corner_ext{};          // backs Y(t-1, t-1)
};

template <class S>
AuxMatrix<S> aux_matrix(const Grid<S>& X, std::vector<int> I, std::vector<int> J) {
  const int m = X.rows(), n = X.cols();
  std::sort(I.begin(), I.end());
  std::sort(J.begin(), J.end());
  if (I.size() != J.size()) throw DomainError("frame must use equally many rows and columns");
  if (std::adjacent_find(I.begin(), I.end()) != I.end() ||
      std::adjacent_find(J.begin(), J.end()) != J.end())
    throw DomainError("frame rows/cols must be distinct");
  if (!I.empty() && (I.front() < 0 || I.back() >= m)) throw DomainError("frame row out of range");
  if (!J.empty() && (J.front() < 0 || J.back() >= n)) throw DomainError("frame col out of range");
  const int t = static_cast<int>(I.size()) + 1;
  if (static_cast<int>(I.size()) >= m || static_cast<int>(J.size()) >= n)
    throw DomainError("frame leaves no complementary entries");

  std::vector<bool> in_i(m, false), in_j(n, false);
  for (int i : I) in_i[i] = true;
  for (int j : J) in_j[j] = true;

  AuxMatrix<S> aux;
  aux.Y = Grid<S>(t, t, X.at(0, 0));
  aux.I = I;
  aux.J = J;
  aux.row_ext.resize(t - 1);
  aux.col_ext.resize(t - 1);

  for (int a = 0; a < t - 1; ++a)
    for (int b = 0; b < t - 1; ++b) aux.Y.at(a, b) = X.at(I[a], J[b]);

  for (int a = 0; a < t - 1; ++a) {
    bool have = false;
    for (int j = 0; j < n; ++j) {
      if (in_j[j]) continue;
      if (!have || X.at(I[a], j) < aux.Y.at(a, t - 1)) {
        have = true;
        aux.Y.at(a, t - 1) = X.at(I[a], j);
        aux.row_ext[a] = {I[a], j};
      }
    }
  }
  for (int b = 0; b < t - 1; ++b) {
    bool have = false;
    for (int i = 0; i < m; ++i) {
      if (in_i[i]) continue;
      if (!have || X.at(i, J[b]) < aux.Y.at(t - 1, b)) {
        have = true;
        aux.Y.at(t - 1, b) = X.at(i, J[b]);
        aux.col_ext[b] = {i, J[b]};
      }
    }
  }
  {
    bool have = false;
    for (int i = 0; i < m; ++i) {
      if (in_i[i]) continue;
      for (int j = 0; j < n; ++j) {
        if (in_j[j]) continue;
        if (!have || X.at(i, j) < aux.Y.at(t - 1, t - 1)) {
          have = true;
          aux.Y.at(t - 1, t - 1) = X.at(i, j);
          aux.corner_ext = {i, j};
        }
      }
    }
  }
  return aux;
}

// The flag of a matrix: the order in which rows and columns join the optimal
// frames as k grows, plus the optimal values along the way.
template <class S>
struct Flag {
  std::vector<int> rows, cols;  // append order
  std::vector<S> values;        // values[t-1] = minimum t-assignment value
};

// Grows the optimal frame one step at a time. Step t solves the t x t
// auxiliary matrix of the current frame; the border cells its minimizer uses
// name (through provenance) the row and column to append.
template <class S>
Flag<S> min_k_incremental(const Grid<S>& X, int k, std::uint64_t cap = 10'000'000) {
  const int m = X.rows(), n = X.cols();
  if (k < 1 || k > std::min(m, n)) throw DomainError("k out of range for this grid");

  Flag<S> flag;
  std::vector<int> I, J;  // sorted frame
  for (int t = 1; t <= k; ++t) {
    AuxMatrix<S> aux = aux_matrix(X, I, J);
    SolveResult<S> sol = min_k_bruteforce(aux.Y, t, cap);
    std::vector<Cell> best = lex_smallest_minimizer(sol.minimizers);

    int new_row = -1, new_col = -1;
    for (const Cell& c : best) {
      if (c.first == t - 1 && c.second == t - 1) {
        new_row = aux.corner_ext.first;
        new_col = aux.corner_ext.second;
      } else if (c.first == t - 1) {
        new_row = aux.col_ext[c.second].first;
      } else if (c.second == t - 1) {
        new_col = aux.row_ext[c.first].second;
      }
    }
    if (new_row < 0 || new_col < 0) throw DomainError("auxiliary minimizer missed the border");

    flag.rows.push_back(new_row);
    flag.cols.push_back(new_col);
    flag.values.push_back(sol.value);
    I.push_back(new_row);
    J.push_back(new_col);
    std::sort(I.begin(), I.end());
    std::sort(J.begin(), J.end());
  }
  return flag;
}

}  // namespace minkassign
