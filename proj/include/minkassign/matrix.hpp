#pragma once

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "minkassign/errors.hpp"

namespace minkassign {

using Cell = std::pair<int, int>;  // (row, col), 0-based internally

// Dense row-major m x n grid over any scalar.
template <class S>
class Grid {
 public:
  Grid() : rows_(0), cols_(0) {}
  Grid(int rows, int cols, S init = S{}) : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1) throw DomainError("grid dimensions must be positive");
    d_.assign(static_cast<std::size_t>(rows) * cols, init);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  S& at(int i, int j) { return d_[index(i, j)]; }
  const S& at(int i, int j) const { return d_[index(i, j)]; }
  S& at(const Cell& c) { return at(c.first, c.second); }
  const S& at(const Cell& c) const { return at(c.first, c.second); }

  Grid transposed() const {
    Grid t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
  }

  // Copy without one row and one column.
  Grid dropped(int row, int col) const {
    if (rows_ < 2 || cols_ < 2) throw DomainError("cannot drop from a 1-line grid");
    Grid out(rows_ - 1, cols_ - 1);
    for (int i = 0, oi = 0; i < rows_; ++i) {
      if (i == row) continue;
      for (int j = 0, oj = 0; j < cols_; ++j) {
        if (j == col) continue;
        out.at(oi, oj) = at(i, j);
        ++oj;
      }
      ++oi;
    }
    return out;
  }

  friend bool operator==(const Grid& x, const Grid& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.d_ == y.d_;
  }
  friend bool operator!=(const Grid& x, const Grid& y) { return !(x == y); }

 private:
  std::size_t index(int i, int j) const {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw DomainError("grid index out of range");
    return static_cast<std::size_t>(i) * cols_ + j;
  }

  int rows_, cols_;
  std::vector<S> d_;
};

// A k-assignment: k cells, no two sharing a row or a column. Stored sorted by
// row so equal assignments compare equal and "lexicographically smallest" is
// plain vector comparison.
inline bool is_assignment(const std::vector<Cell>& cells) {
  std::set<int> rows, cols;
  for (const Cell& c : cells) {
    if (!rows.insert(c.first).second) return false;
    if (!cols.insert(c.second).second) return false;
  }
  return true;
}

inline std::vector<Cell> normalized_assignment(std::vector<Cell> cells) {
  std::sort(cells.begin(), cells.end());
  if (!is_assignment(cells)) throw DomainError("cells do not form an assignment");
  return cells;
}

// Sum of the selected entries. Seeded from the first entry rather than S{} so
// context-carrying scalars (modular residues) keep their modulus.
template <class S>
S assignment_value(const Grid<S>& g, const std::vector<Cell>& cells) {
  if (cells.empty()) throw DomainError("empty assignment has no value");
  S total = g.at(cells.front());
  for (std::size_t t = 1; t < cells.size(); ++t) total += g.at(cells[t]);
  return total;
}

}  // namespace minkassign
