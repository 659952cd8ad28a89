#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <mutex>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <utility>
#include <vector>

#include "minkassign/errors.hpp"
#include "minkassign/matrix.hpp"
#include "minkassign/scalar.hpp"

namespace minkassign {

// Positions forced to zero, packed as a bitmask over row-major cells.
struct ZeroPattern {
  int rows = 0, cols = 0;
  std::uint32_t mask = 0;

  ZeroPattern(int r, int c, std::uint32_t m = 0) : rows(r), cols(c), mask(m) {
    if (r < 1 || c < 1 || r * c > 25) throw DomainError("pattern grid must be between 1x1 and 5x5");
    if (m >> (r * c) != 0) throw DomainError("pattern bits out of range");
  }

  static ZeroPattern from_cells(int r, int c, const std::vector<Cell>& cells) {
    ZeroPattern z(r, c);
    for (const Cell& p : cells) {
      if (p.first < 0 || p.first >= r || p.second < 0 || p.second >= c)
        throw DomainError("pattern cell out of range");
      z.mask |= 1u << (p.first * c + p.second);
    }
    return z;
  }

  bool contains(int i, int j) const { return mask >> (i * cols + j) & 1u; }
  ZeroPattern with(int i, int j) const {
    return ZeroPattern(rows, cols, mask | (1u << (i * cols + j)));
  }
  std::vector<Cell> cells() const {
    std::vector<Cell> out;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        if (contains(i, j)) out.push_back({i, j});
    return out;
  }
};

// True when the forced zeroes host k cells no two sharing a row or column,
// i.e. the zero positions admit a size-k matching.
inline bool base_case(const ZeroPattern& Z, int k) {
  if (k <= 0) return true;
  std::vector<int> col_owner(Z.cols, -1);
  std::vector<char> seen(Z.cols, 0);
  // row-by-row augmenting paths
  auto augment = [&](int row, auto&& self) -> bool {
    for (int j = 0; j < Z.cols; ++j) {
      if (!Z.contains(row, j) || seen[j]) continue;
      seen[j] = 1;
      if (col_owner[j] < 0 || self(col_owner[j], self)) {
        col_owner[j] = row;
        return true;
      }
    }
    return false;
  };
  int matched = 0;
  for (int i = 0; i < Z.rows && matched < k; ++i) {
    std::fill(seen.begin(), seen.end(), 0);
    if (augment(i, augment)) ++matched;
  }
  return matched >= k;
}

// Which family of candidate windows to prefer when several qualify. Any
// admissible window gives the same expectation, so the two orders must agree;
// that independence is property-tested.
enum class SPriority { kRowsFirst, kColsFirst };

struct SPick {
  std::uint32_t mask = 0;  // cells of the window, disjoint from the zero set
  int r = 0;               // every minimum k-assignment meets the window r times
};

namespace detail {

// Support of an assignment = its cells that are NOT forced zeroes. A
// permutation can be minimal for some positive matrix with this zero set
// exactly when its support is minimal under set inclusion, and permutations
// sharing a support tie together. So a window is usable exactly when every
// inclusion-minimal support meets it in the same number of cells.
inline std::vector<std::uint32_t> minimal_supports(int k, std::uint32_t zmask) {
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::uint32_t> supports;
  do {
    std::uint32_t supp = 0;
    for (int i = 0; i < k; ++i) {
      int cell = i * k + perm[i];
      if (!(zmask >> cell & 1u)) supp |= 1u << cell;
    }
    supports.push_back(supp);
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::sort(supports.begin(), supports.end());
  supports.erase(std::unique(supports.begin(), supports.end()), supports.end());
  std::vector<std::uint32_t> minimal;
  for (std::uint32_t s : supports) {
    bool dominated = false;
    for (std::uint32_t t : supports)
      if (t != s && (t & s) == t) {
        dominated = true;
        break;
      }
    if (!dominated) minimal.push_back(s);
  }
  return minimal;
}

inline int window_multiplicity(const std::vector<std::uint32_t>& minimal, std::uint32_t smask) {
  int r = std::popcount(minimal.front() & smask);
  for (std::uint32_t s : minimal)
    if (std::popcount(s & smask) != r) return -1;
  return r;
}

}  // namespace detail

// Picks a set of positions, disjoint from the zero set, that every minimum
// k-assignment of every positive matrix with that zero set meets in a fixed
// number of positions. Candidates are tried in a deterministic priority
// order (zero-free rows, zero-free columns, then zero-free rectangular
// windows from largest down) and each is verified against the
// inclusion-minimal supports before use.
inline SPick find_S(const ZeroPattern& Z, int k, SPriority prio = SPriority::kRowsFirst) {
  if (Z.rows != k || Z.cols != k || k < 1 || k > 4)
    throw DomainError("window selection supports k x k patterns with k <= 4");
  if (base_case(Z, k)) throw DomainError("pattern is already terminal");

  static std::mutex cache_mutex;
  static std::unordered_map<std::uint64_t, SPick> cache;
  const std::uint64_t key =
      Z.mask | (static_cast<std::uint64_t>(k) << 32) | (static_cast<std::uint64_t>(prio) << 40);
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  const std::vector<std::uint32_t> minimal = detail::minimal_supports(k, Z.mask);
  auto admit = [&](std::uint32_t smask) -> int {
    return detail::window_multiplicity(minimal, smask);
  };

  std::vector<std::uint32_t> candidates;
  auto push_rows = [&] {
    for (int i = 0; i < k; ++i) {
      std::uint32_t row = 0;
      bool clean = true;
      for (int j = 0; j < k; ++j) {
        if (Z.contains(i, j)) clean = false;
        row |= 1u << (i * k + j);
      }
      if (clean) candidates.push_back(row);
    }
  };
  auto push_cols = [&] {
    for (int j = 0; j < k; ++j) {
      std::uint32_t col = 0;
      bool clean = true;
      for (int i = 0; i < k; ++i) {
        if (Z.contains(i, j)) clean = false;
        col |= 1u << (i * k + j);
      }
      if (clean) candidates.push_back(col);
    }
  };
  if (prio == SPriority::kRowsFirst) {
    push_rows();
    push_cols();
  } else {
    push_cols();
    push_rows();
  }

  // rectangular windows, biggest and squarest first
  std::vector<std::pair<int, int>> sizes;
  for (int a = 1; a <= k; ++a)
    for (int b = 1; b <= k; ++b) sizes.push_back({a, b});
  std::stable_sort(sizes.begin(), sizes.end(), [&](auto x, auto y) {
    if (x.first + x.second != y.first + y.second) return x.first + x.second > y.first + y.second;
    if (std::min(x.first, x.second) != std::min(y.first, y.second))
      return std::min(x.first, x.second) > std::min(y.first, y.second);
    return prio == SPriority::kRowsFirst ? x.first < y.first : x.second < y.second;
  });
  auto subsets = [&](int size) {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(size);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
      out.push_back(idx);
      int pos = size - 1;
      while (pos >= 0 && idx[pos] == k - size + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int q = pos + 1; q < size; ++q) idx[q] = idx[q - 1] + 1;
    }
    return out;
  };
  for (auto [a, b] : sizes) {
    for (const std::vector<int>& I : subsets(a))
      for (const std::vector<int>& J : subsets(b)) {
        std::uint32_t smask = 0;
        bool clean = true;
        for (int i : I)
          for (int j : J) {
            if (Z.contains(i, j)) clean = false;
            smask |= 1u << (i * k + j);
          }
        if (clean) candidates.push_back(smask);
      }
  }

  for (std::uint32_t smask : candidates) {
    int r = admit(smask);
    if (r >= 0) {
      SPick pick{smask, r};
      std::lock_guard<std::mutex> lock(cache_mutex);
      cache.emplace(key, pick);
      return pick;
    }
  }

  std::ostringstream os;
  os << "no admissible window for zero pattern {";
  for (const Cell& c : Z.cells()) os << " (" << c.first + 1 << "," << c.second + 1 << ")";
  os << " } at k=" << k << "; this pattern needs a new case analysis";
  throw ContractError(os.str());
}

namespace detail {

template <class S>
struct ExactRec {
  const Grid<S>& A;
  int k;
  bool memoize;
  SPriority prio;
  std::unordered_map<std::uint32_t, S> memo;

  S eval(std::uint32_t zmask) {
    ZeroPattern Z(k, k, zmask);
    if (base_case(Z, k)) return zero_like(A.at(0, 0));
    if (memoize) {
      auto it = memo.find(zmask);
      if (it != memo.end()) return it->second;
    }
    SPick pick = find_S(Z, k, prio);
    S dot = zero_like(A.at(0, 0));
    bool seeded = false;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        if (!(pick.mask >> (i * k + j) & 1u)) continue;
        if (!seeded) {
          dot = A.at(i, j);
          seeded = true;
        } else {
          dot += A.at(i, j);
        }
      }
    S total = value_like(dot, mpz_class(pick.r)) / dot;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        if (!(pick.mask >> (i * k + j) & 1u)) continue;
        total += (A.at(i, j) / dot) * eval(zmask | (1u << (i * k + j)));
      }
    if (memoize) memo.emplace(zmask, total);
    return total;
  }
};

}  // namespace detail

// Exact expectation of the minimum k-assignment of a random matrix whose
// entry (i, j) is exponential with rate A(i, j), by recursing on zero
// patterns. Square shapes with k = m = n <= 4 only; the window case analysis
// is not established beyond that.
template <class S>
S expected_min_exact(const Grid<S>& A, int k, bool memoize = true,
                     SPriority prio = SPriority::kRowsFirst) {
  if (k < 1 || k > 4 || A.rows() != k || A.cols() != k)
    throw DomainError("supported shapes are k x k with k <= 4");
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (!is_valid_rate(A.at(i, j))) throw DomainError("rates must be valid (positive)");
  detail::ExactRec<S> rec{A, k, memoize, prio, {}};
  return rec.eval(0);
}

}  // namespace minkassign
