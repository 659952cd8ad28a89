#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "minkassign/errors.hpp"
#include "minkassign/formulas.hpp"
#include "minkassign/matrix.hpp"
#include "minkassign/rational.hpp"
#include "minkassign/rng.hpp"
#include "minkassign/solver.hpp"

namespace minkassign {

struct SampleConfig {
  std::uint64_t seed = 0;
  long long samples = 1;
  int chunks = 1;
  int threads = 0;  // 0 picks hardware concurrency; never affects results
};

struct EstimateReport {
  double mean = 0;
  double se = 0;  // sample standard deviation / sqrt(samples)
  long long samples = 0;
  std::optional<Rational> target;
  std::optional<double> z;
};

namespace detail {

inline void validate_config(const SampleConfig& cfg) {
  if (cfg.samples < 1) throw DomainError("sample count must be at least 1");
  if (cfg.chunks < 1) throw DomainError("chunk count must be at least 1");
  if (cfg.threads < 0) throw DomainError("thread count cannot be negative");
}

inline long long chunk_size(const SampleConfig& cfg, int chunk) {
  return cfg.samples / cfg.chunks + (chunk < cfg.samples % cfg.chunks ? 1 : 0);
}

// Runs body(chunk, size) over all chunks on a small thread pool and returns
// the accumulators indexed by chunk. Callers merge in chunk order, which
// keeps results independent of the thread count.
template <class Acc, class Body>
std::vector<Acc> run_chunks(const SampleConfig& cfg, Body body) {
  int nthreads = cfg.threads > 0 ? cfg.threads
                                 : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min(nthreads, cfg.chunks));

  std::vector<Acc> out(cfg.chunks);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      int c = next.fetch_add(1);
      if (c >= cfg.chunks) return;
      try {
        out[c] = body(c, chunk_size(cfg, c));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline Grid<double> grid_to_double(const Grid<Rational>& A) {
  Grid<double> out(A.rows(), A.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) {
      if (A.at(i, j).sign() <= 0) throw DomainError("rates must be positive");
      out.at(i, j) = A.at(i, j).to_double();
    }
  return out;
}

inline void fill_sample(Grid<double>& X, const Grid<double>& rates, const CounterRng& rng,
                        std::uint64_t chunk, std::uint64_t sample) {
  const int n = X.cols();
  for (int i = 0; i < X.rows(); ++i)
    for (int j = 0; j < n; ++j)
      X.at(i, j) = exp_draw(rng.uniform(chunk, sample, i * n + j), rates.at(i, j));
}

// Value-only assignment scan with caller-owned scratch, for the hot loop.
struct MinScratch {
  std::vector<int> rowsel, colsel, perm;
};

inline double min_value(const Grid<double>& X, int k, MinScratch& s) {
  const int m = X.rows(), n = X.cols();
  double best = std::numeric_limits<double>::infinity();
  s.rowsel.resize(k);
  s.colsel.resize(k);
  s.perm.resize(k);
  std::iota(s.rowsel.begin(), s.rowsel.end(), 0);
  do {
    std::iota(s.colsel.begin(), s.colsel.end(), 0);
    do {
      std::iota(s.perm.begin(), s.perm.end(), 0);
      do {
        double value = 0;
        for (int t = 0; t < k; ++t) value += X.at(s.rowsel[t], s.colsel[s.perm[t]]);
        best = std::min(best, value);
      } while (std::next_permutation(s.perm.begin(), s.perm.end()));
    } while (next_subset(s.colsel, n));
  } while (next_subset(s.rowsel, m));
  return best;
}

inline void check_enumeration_cap(int m, int n, int k, std::uint64_t cap = 10'000'000) {
  if (k < 1 || k > std::min(m, n)) throw DomainError("k out of range for this grid");
  std::uint64_t work = choose_u64(m, k) * choose_u64(n, k) * falling(k, k);
  if (work > cap)
    throw EnumerationCapError("assignment enumeration would need " + std::to_string(work) +
                              " evaluations per sample (cap " + std::to_string(cap) + ")");
}

struct MeanAcc {
  double sum = 0, sumsq = 0;
  void add(double v) {
    sum += v;
    sumsq += v * v;
  }
};

inline EstimateReport finalize(const MeanAcc& acc, long long n,
                               const std::optional<Rational>& target) {
  EstimateReport rep;
  rep.samples = n;
  rep.mean = acc.sum / static_cast<double>(n);
  double var = 0;
  if (n > 1) var = std::max(0.0, (acc.sumsq - static_cast<double>(n) * rep.mean * rep.mean) /
                                     static_cast<double>(n - 1));
  rep.se = std::sqrt(var / static_cast<double>(n));
  if (target) {
    rep.target = target;
    double t = target->to_double();
    if (rep.se > 0)
      rep.z = (rep.mean - t) / rep.se;
    else
      rep.z = rep.mean == t ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return rep;
}

}  // namespace detail

// One random cost matrix: entry (i,j) exponential with rate rates(i,j),
// inverted from the uniform draw at counter (chunk, sample, i*cols+j).
inline Grid<double> sample_matrix(const Grid<double>& rates, const CounterRng& rng,
                                  std::uint64_t chunk = 0, std::uint64_t sample = 0) {
  for (int i = 0; i < rates.rows(); ++i)
    for (int j = 0; j < rates.cols(); ++j)
      if (!(rates.at(i, j) > 0)) throw DomainError("rates must be positive");
  Grid<double> X(rates.rows(), rates.cols());
  detail::fill_sample(X, rates, rng, chunk, sample);
  return X;
}

// Sample mean of the minimum k-assignment value. A target expectation, when
// supplied, is attached with its z-score.
inline EstimateReport estimate_e_min(const Grid<Rational>& A, int k, const SampleConfig& cfg,
                                     std::optional<Rational> target = {}) {
  detail::validate_config(cfg);
  detail::check_enumeration_cap(A.rows(), A.cols(), k);
  const Grid<double> rates = detail::grid_to_double(A);
  const CounterRng rng(cfg.seed);

  auto chunks = detail::run_chunks<detail::MeanAcc>(cfg, [&](int chunk, long long size) {
    detail::MeanAcc acc;
    detail::MinScratch scratch;
    Grid<double> X(rates.rows(), rates.cols());
    for (long long s = 0; s < size; ++s) {
      detail::fill_sample(X, rates, rng, chunk, s);
      acc.add(detail::min_value(X, k, scratch));
    }
    return acc;
  });

  detail::MeanAcc total;
  for (const detail::MeanAcc& acc : chunks) {
    total.sum += acc.sum;
    total.sumsq += acc.sumsq;
  }
  return detail::finalize(total, cfg.samples, target);
}

// Product-rate convenience: the closed-form value is the natural target.
inline EstimateReport estimate_e_min(int k, const RankOneRates<Rational>& rates,
                                     const SampleConfig& cfg) {
  return estimate_e_min(rate_grid(rates), k, cfg, f_main(k, rates));
}

// Empirical distribution of the nested optimal frames: which row and column
// the optimum appends at each step 1..k, against the urn-sequence law, plus
// the row-set and column-set marginals and their independence.
struct FlagProbReport {
  long long samples = 0;

  struct SeqStat {
    std::vector<int> rows, cols;  // append order
    long long count = 0;
    double freq = 0, se = 0;
    double theory = 0;
    double z = 0;  // against the theoretical binomial sd
  };
  struct SetStat {
    std::vector<int> members;
    long long count = 0;
    double freq = 0, se = 0;
    double theory = 0;
    double z = 0;
  };
  struct PairStat {
    std::vector<int> I, J;
    double joint_freq = 0, product_freq = 0;
    double z = 0;  // joint vs product of marginals
  };

  std::vector<SeqStat> flags;
  std::vector<SetStat> row_sets, col_sets;
  std::vector<PairStat> independence;
};

namespace detail {

inline void ordered_sequences(int n, int k, std::vector<int>& prefix,
                              std::vector<std::vector<int>>& out) {
  if (static_cast<int>(prefix.size()) == k) {
    out.push_back(prefix);
    return;
  }
  for (int v = 0; v < n; ++v) {
    if (std::find(prefix.begin(), prefix.end(), v) != prefix.end()) continue;
    prefix.push_back(v);
    ordered_sequences(n, k, prefix, out);
    prefix.pop_back();
  }
}

inline std::vector<std::vector<int>> ordered_sequences(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> prefix;
  ordered_sequences(n, k, prefix, out);
  return out;
}

inline std::vector<std::vector<int>> index_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  if (k == 0) return {std::vector<int>{}};
  do {
    out.push_back(idx);
  } while (next_subset(idx, n));
  return out;
}

}  // namespace detail

inline FlagProbReport estimate_flag_probs(int k, const RankOneRates<Rational>& rates,
                                          const SampleConfig& cfg) {
  detail::validate_config(cfg);
  const int m = static_cast<int>(rates.r.size()), n = static_cast<int>(rates.c.size());
  if (k < 1 || k > std::min(m, n)) throw DomainError("k out of range for these rates");
  const std::uint64_t nflags = detail::falling(m, k) * detail::falling(n, k);
  if (nflags > 100'000) throw DomainError("too many distinct frames to tabulate");
  const Grid<double> dr = detail::grid_to_double(rate_grid(rates));
  const CounterRng rng(cfg.seed);

  using Key = std::pair<std::vector<int>, std::vector<int>>;
  using CountMap = std::map<Key, long long>;

  auto chunks = detail::run_chunks<CountMap>(cfg, [&](int chunk, long long size) {
    CountMap counts;
    Grid<double> X(m, n);
    for (long long s = 0; s < size; ++s) {
      detail::fill_sample(X, dr, rng, chunk, s);
      Flag<double> flag = min_k_incremental(X, k);
      ++counts[{flag.rows, flag.cols}];
    }
    return counts;
  });

  CountMap counts;
  for (const CountMap& c : chunks)
    for (const auto& [key, cnt] : c) counts[key] += cnt;

  const double N = static_cast<double>(cfg.samples);
  FlagProbReport rep;
  rep.samples = cfg.samples;

  for (const std::vector<int>& rows : detail::ordered_sequences(m, k))
    for (const std::vector<int>& cols : detail::ordered_sequences(n, k)) {
      FlagProbReport::SeqStat st;
      st.rows = rows;
      st.cols = cols;
      auto it = counts.find({rows, cols});
      st.count = it == counts.end() ? 0 : it->second;
      st.freq = static_cast<double>(st.count) / N;
      st.se = std::sqrt(st.freq * (1 - st.freq) / N);
      st.theory = (pr_urn_seq(rates.r, rows) * pr_urn_seq(rates.c, cols)).to_double();
      double sd = std::sqrt(st.theory * (1 - st.theory) / N);
      st.z = sd > 0 ? (st.freq - st.theory) / sd : 0.0;
      rep.flags.push_back(std::move(st));
    }

  // set marginals and the joint table derive from the same counts
  std::map<Key, long long> joint;
  std::map<std::vector<int>, long long> rowc, colc;
  for (const auto& [key, cnt] : counts) {
    std::vector<int> I = key.first, J = key.second;
    std::sort(I.begin(), I.end());
    std::sort(J.begin(), J.end());
    joint[{I, J}] += cnt;
    rowc[I] += cnt;
    colc[J] += cnt;
  }

  auto fill_sets = [&](int len, const std::vector<Rational>& w,
                       const std::map<std::vector<int>, long long>& got,
                       std::vector<FlagProbReport::SetStat>& out) {
    for (const std::vector<int>& I : detail::index_subsets(len, k)) {
      FlagProbReport::SetStat st;
      st.members = I;
      auto it = got.find(I);
      st.count = it == got.end() ? 0 : it->second;
      st.freq = static_cast<double>(st.count) / N;
      st.se = std::sqrt(st.freq * (1 - st.freq) / N);
      st.theory = pr_urn_set(w, I).to_double();
      double sd = std::sqrt(st.theory * (1 - st.theory) / N);
      st.z = sd > 0 ? (st.freq - st.theory) / sd : 0.0;
      out.push_back(std::move(st));
    }
  };
  fill_sets(m, rates.r, rowc, rep.row_sets);
  fill_sets(n, rates.c, colc, rep.col_sets);

  for (const std::vector<int>& I : detail::index_subsets(m, k))
    for (const std::vector<int>& J : detail::index_subsets(n, k)) {
      FlagProbReport::PairStat st;
      st.I = I;
      st.J = J;
      auto jit = joint.find({I, J});
      st.joint_freq = jit == joint.end() ? 0 : static_cast<double>(jit->second) / N;
      auto rit = rowc.find(I);
      auto cit = colc.find(J);
      double p = rit == rowc.end() ? 0 : static_cast<double>(rit->second) / N;
      double q = cit == colc.end() ? 0 : static_cast<double>(cit->second) / N;
      st.product_freq = p * q;
      double var = p * q * (1 - p) * (1 - q) / N;
      st.z = var > 0 ? (st.joint_freq - st.product_freq) / std::sqrt(var) : 0.0;
      rep.independence.push_back(std::move(st));
    }

  return rep;
}

// Per-window expectations: mean over all samples of min_k times the indicator
// that the optimal (k-1)-frame is exactly (I, J). The means partition the
// plain min_k mean, reported in `total`.
struct ContributionReport {
  std::map<std::pair<std::vector<int>, std::vector<int>>, EstimateReport> cells;
  EstimateReport total;
};

inline ContributionReport estimate_contribution(int k, const RankOneRates<Rational>& rates,
                                                const SampleConfig& cfg) {
  detail::validate_config(cfg);
  const int m = static_cast<int>(rates.r.size()), n = static_cast<int>(rates.c.size());
  if (k < 1 || k > std::min(m, n)) throw DomainError("k out of range for these rates");
  detail::check_enumeration_cap(m, n, k);
  const std::uint64_t ncells = detail::choose_u64(m, k - 1) * detail::choose_u64(n, k - 1);
  if (ncells > 10'000) throw DomainError("too many windows to tabulate");
  const Grid<double> dr = detail::grid_to_double(rate_grid(rates));
  const CounterRng rng(cfg.seed);

  using Key = std::pair<std::vector<int>, std::vector<int>>;
  struct Acc {
    std::map<Key, detail::MeanAcc> cells;
    detail::MeanAcc total;
  };

  auto chunks = detail::run_chunks<Acc>(cfg, [&](int chunk, long long size) {
    Acc acc;
    detail::MinScratch scratch;
    Grid<double> X(m, n);
    for (long long s = 0; s < size; ++s) {
      detail::fill_sample(X, dr, rng, chunk, s);
      double v = detail::min_value(X, k, scratch);
      Key key;
      if (k > 1) {
        std::vector<Cell> sub =
            lex_smallest_minimizer(min_k_bruteforce(X, k - 1).minimizers);
        for (const Cell& c : sub) {
          key.first.push_back(c.first);
          key.second.push_back(c.second);
        }
        std::sort(key.first.begin(), key.first.end());
        std::sort(key.second.begin(), key.second.end());
      }
      acc.cells[key].add(v);
      acc.total.add(v);
    }
    return acc;
  });

  std::map<Key, detail::MeanAcc> merged;
  detail::MeanAcc total;
  for (const auto& acc : chunks) {
    for (const auto& [key, ma] : acc.cells) {
      merged[key].sum += ma.sum;
      merged[key].sumsq += ma.sumsq;
    }
    total.sum += acc.total.sum;
    total.sumsq += acc.total.sumsq;
  }

  ContributionReport rep;
  for (const std::vector<int>& I : detail::index_subsets(m, k - 1))
    for (const std::vector<int>& J : detail::index_subsets(n, k - 1)) {
      detail::MeanAcc ma;
      auto it = merged.find({I, J});
      if (it != merged.end()) ma = it->second;
      rep.cells[{I, J}] = detail::finalize(ma, cfg.samples, contribution(k, rates, I, J));
    }
  rep.total = detail::finalize(total, cfg.samples, f_main(k, rates));
  return rep;
}

// The k x k matrix whose border rates absorb everything outside the first
// k-1 rows and columns: border entries are tail sums, the corner the tail
// block sum. Replacing a matrix by its collapsed form preserves the expected
// contribution of the leading (k-1)-frame.
inline Grid<Rational> collapse_rates(const Grid<Rational>& A, int k) {
  const int m = A.rows(), n = A.cols();
  if (k < 1 || k > std::min(m, n)) throw DomainError("k out of range for this grid");
  Grid<Rational> B(k, k);
  for (int i = 0; i < k - 1; ++i)
    for (int j = 0; j < k - 1; ++j) B.at(i, j) = A.at(i, j);
  for (int i = 0; i < k - 1; ++i) {
    Rational s(0);
    for (int j = k - 1; j < n; ++j) s += A.at(i, j);
    B.at(i, k - 1) = s;
  }
  for (int j = 0; j < k - 1; ++j) {
    Rational s(0);
    for (int i = k - 1; i < m; ++i) s += A.at(i, j);
    B.at(k - 1, j) = s;
  }
  Rational corner(0);
  for (int i = k - 1; i < m; ++i)
    for (int j = k - 1; j < n; ++j) corner += A.at(i, j);
  B.at(k - 1, k - 1) = corner;
  return B;
}

inline std::vector<Rational> collapse_vector(const std::vector<Rational>& w, int k) {
  if (k < 1 || k > static_cast<int>(w.size())) throw DomainError("k out of range for this vector");
  std::vector<Rational> out(w.begin(), w.begin() + (k - 1));
  Rational tail(0);
  for (int i = k - 1; i < static_cast<int>(w.size()); ++i) tail += w[i];
  out.push_back(tail);
  return out;
}

struct CollapsedCheck {
  EstimateReport original, collapsed;
  double diff_z = 0;  // difference of means in joint standard errors
};

namespace detail {

inline EstimateReport leading_frame_contribution(const Grid<Rational>& A, int k,
                                                 const SampleConfig& cfg,
                                                 const std::optional<Rational>& target) {
  check_enumeration_cap(A.rows(), A.cols(), k);
  const Grid<double> rates = grid_to_double(A);
  const CounterRng rng(cfg.seed);
  std::vector<int> lead(k - 1);
  std::iota(lead.begin(), lead.end(), 0);

  auto chunks = run_chunks<MeanAcc>(cfg, [&](int chunk, long long size) {
    MeanAcc acc;
    MinScratch scratch;
    Grid<double> X(A.rows(), A.cols());
    for (long long s = 0; s < size; ++s) {
      fill_sample(X, rates, rng, chunk, s);
      bool hit = true;
      if (k > 1) {
        std::vector<Cell> sub = lex_smallest_minimizer(min_k_bruteforce(X, k - 1).minimizers);
        std::vector<int> I, J;
        for (const Cell& c : sub) {
          I.push_back(c.first);
          J.push_back(c.second);
        }
        std::sort(I.begin(), I.end());
        std::sort(J.begin(), J.end());
        hit = I == lead && J == lead;
      }
      acc.add(hit ? min_value(X, k, scratch) : 0.0);
    }
    return acc;
  });

  MeanAcc total;
  for (const MeanAcc& acc : chunks) {
    total.sum += acc.sum;
    total.sumsq += acc.sumsq;
  }
  return finalize(total, cfg.samples, target);
}

}  // namespace detail

// Estimates the leading-frame contribution under A and under its collapsed
// k x k form with the same sampling configuration. When A is already k x k
// the two runs consume identical draws and the reports match bitwise.
inline CollapsedCheck collapsed_rate_check(const Grid<Rational>& A, int k,
                                           const SampleConfig& cfg,
                                           std::optional<Rational> target = {}) {
  detail::validate_config(cfg);
  CollapsedCheck check;
  check.original = detail::leading_frame_contribution(A, k, cfg, target);
  check.collapsed = detail::leading_frame_contribution(collapse_rates(A, k), k, cfg, target);
  double joint = std::sqrt(check.original.se * check.original.se +
                           check.collapsed.se * check.collapsed.se);
  double diff = check.original.mean - check.collapsed.mean;
  check.diff_z = joint > 0 ? diff / joint : (diff == 0 ? 0.0 : std::numeric_limits<double>::infinity());
  return check;
}

// Product-rate convenience: the conjectured contribution at the collapsed
// rates is attached as the target for both sides.
inline CollapsedCheck collapsed_rate_check(int k, const RankOneRates<Rational>& rates,
                                           const SampleConfig& cfg) {
  RankOneRates<Rational> collapsed{collapse_vector(rates.r, k), collapse_vector(rates.c, k)};
  std::vector<int> lead(k - 1);
  std::iota(lead.begin(), lead.end(), 0);
  return collapsed_rate_check(rate_grid(rates), k, cfg,
                              contribution(k, collapsed, lead, lead));
}

}  // namespace minkassign
