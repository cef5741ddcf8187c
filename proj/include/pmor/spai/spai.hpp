#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pmor/detail/parallel.hpp"
#include "pmor/spai/least_squares.hpp"
#include "pmor/spai/preconditioner.hpp"

namespace pmor {

struct SpaiConfig {
  /// Column residual above which the pattern is augmented once.
  double ep = 1e-4;
  /// 0: pattern of A plus diagonal. 1: additionally one augmentation pass
  /// toward the pattern of A^2.
  int pattern_level = 1;
  Index max_fill_per_column = 80;
  int threads = 1;
};

struct SpaiStats {
  std::vector<double> column_residuals;
  Index augmented_columns = 0;
  Index rank_deficient_columns = 0;
  Index nnz = 0;
  double build_seconds = 0.0;

  double max_residual() const {
    return column_residuals.empty()
               ? 0.0
               : *std::max_element(column_residuals.begin(), column_residuals.end());
  }
  double mean_residual() const {
    if (column_residuals.empty()) return 0.0;
    double s = 0.0;
    for (const auto r : column_residuals) s += r;
    return s / static_cast<double>(column_residuals.size());
  }
};

namespace detail {

inline std::vector<Index> level0_support(const ColumnLeastSquares& ls, Index i) {
  const auto rows = ls.column_rows(i);
  std::vector<Index> s(rows.begin(), rows.end());
  const auto it = std::lower_bound(s.begin(), s.end(), i);
  if (it == s.end() || *it != i) s.insert(it, i);
  return s;
}

/// Level-0 support plus the largest A^2 entries, capped at max_fill
/// (the level-0 entries are always kept).
inline std::vector<Index> level1_support(const ColumnLeastSquares& ls, Index i,
                                         const std::vector<Index>& level0, Index max_fill,
                                         ColumnLeastSquares::Workspace& ws) {
  auto candidates = ls.square_column(i, ws);
  std::vector<std::pair<Index, double>> extra;
  for (const auto& [r, w] : candidates)
    if (!std::binary_search(level0.begin(), level0.end(), r)) extra.emplace_back(r, w);
  std::stable_sort(extra.begin(), extra.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  const Index room = std::max<Index>(0, max_fill - static_cast<Index>(level0.size()));
  if (static_cast<Index>(extra.size()) > room) extra.resize(static_cast<std::size_t>(room));
  std::vector<Index> s = level0;
  for (const auto& e : extra) s.push_back(e.first);
  std::sort(s.begin(), s.end());
  return s;
}

struct ColumnOutcome {
  std::vector<Index> support;
  std::vector<Complex> values;
  double residual = 0.0;
  bool augmented = false;
  bool rank_deficient = false;
};

/// Fits every column i against target(i) with the level-0 support,
/// augmenting once when the residual relative to ||target(i)|| exceeds ep.
template <class TargetFn>
std::vector<ColumnOutcome> fit_all_columns(const ColumnLeastSquares& ls, double ep, int pattern_level,
                                           Index max_fill, int threads, TargetFn&& target) {
  const Index n = ls.dimension();
  std::vector<ColumnOutcome> out(static_cast<std::size_t>(n));
  parallel_chunks(n, threads, [&](Index begin, Index end, int) {
    auto ws = ls.make_workspace();
    for (Index i = begin; i < end; ++i) {
      const SparseColumn t = target(i);
      const double scale = t.norm();
      const double denom = scale > 0.0 ? scale : 1.0;
      auto support = level0_support(ls, i);
      auto fit = ls.fit(support, t, ws);
      bool augmented = false;
      if (pattern_level >= 1 && fit.residual / denom > ep) {
        auto wider = level1_support(ls, i, support, max_fill, ws);
        if (wider.size() > support.size()) {
          fit = ls.fit(wider, t, ws);
          augmented = true;
        }
      }
      auto& o = out[static_cast<std::size_t>(i)];
      o.support = std::move(fit.support);
      o.values = std::move(fit.values);
      o.residual = fit.residual / denom;
      o.augmented = augmented;
      o.rank_deficient = fit.rank_deficient;
    }
  });
  return out;
}

inline SparseMatrix assemble_columns(Index n, const std::vector<ColumnOutcome>& cols) {
  std::vector<Triplet> t;
  for (Index j = 0; j < static_cast<Index>(cols.size()); ++j) {
    const auto& c = cols[static_cast<std::size_t>(j)];
    for (std::size_t k = 0; k < c.support.size(); ++k) t.push_back({c.support[k], j, c.values[k]});
  }
  return SparseMatrix::from_triplets(n, static_cast<Index>(cols.size()), std::move(t));
}

template <class Stats>
void collect_stats(const std::vector<ColumnOutcome>& cols, Stats& stats) {
  stats.column_residuals.clear();
  stats.column_residuals.reserve(cols.size());
  for (const auto& c : cols) {
    stats.column_residuals.push_back(c.residual);
    stats.augmented_columns += c.augmented ? 1 : 0;
    stats.rank_deficient_columns += c.rank_deficient ? 1 : 0;
  }
}

}  // namespace detail

/// A-priori pattern for P: level 0 is the pattern of A plus the diagonal;
/// level 1 adds the pattern of A^2, capped per column at max_fill entries
/// by largest |A|·|A| magnitude.
inline SparsityPattern spai_pattern(const SparseMatrix& a, int level, Index max_fill_per_column = 80) {
  if (!a.is_square()) throw DimensionError("spai_pattern: matrix must be square");
  ColumnLeastSquares ls(a);
  auto ws = ls.make_workspace();
  SparsityPattern p;
  p.nrows = a.rows();
  p.columns.resize(static_cast<std::size_t>(a.cols()));
  for (Index i = 0; i < a.cols(); ++i) {
    auto s = detail::level0_support(ls, i);
    if (level >= 1) s = detail::level1_support(ls, i, s, max_fill_per_column, ws);
    p.columns[static_cast<std::size_t>(i)] = std::move(s);
  }
  return p;
}

inline SparsityPattern full_pattern(Index n) {
  SparsityPattern p;
  p.nrows = n;
  std::vector<Index> all(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  p.columns.assign(static_cast<std::size_t>(n), all);
  return p;
}

struct SpaiColumn {
  SparseColumn column;
  double residual = 0.0;
  bool rank_deficient = false;
};

/// Minimizes ||e_i - A p_i||_2 over p_i supported on `pattern_i`.
inline SpaiColumn spai_column(const SparseMatrix& a, Index i, std::span<const Index> pattern_i) {
  if (pattern_i.empty()) throw std::invalid_argument("spai_column: empty pattern");
  if (i < 0 || i >= a.cols()) throw DimensionError("spai_column: column index out of range");
  ColumnLeastSquares ls(a);
  auto ws = ls.make_workspace();
  std::vector<Index> support(pattern_i.begin(), pattern_i.end());
  std::sort(support.begin(), support.end());
  const auto fit = ls.fit(support, unit_column(i), ws);
  return SpaiColumn{SparseColumn{fit.support, fit.values}, fit.residual, fit.rank_deficient};
}

/// Sparse approximate inverse by independent per-column least squares with
/// the static-plus-one-augmentation pattern policy.
inline std::pair<Preconditioner, SpaiStats> spai_build(const SparseMatrix& a, const SpaiConfig& cfg = {}) {
  if (!a.is_square()) throw DimensionError("spai_build: matrix must be square");
  if (!(cfg.ep > 0.0)) throw std::invalid_argument("spai_build: ep must be positive");
  detail::Stopwatch clock;
  ColumnLeastSquares ls(a);
  const auto cols = detail::fit_all_columns(ls, cfg.ep, cfg.pattern_level, cfg.max_fill_per_column,
                                            cfg.threads, [](Index i) { return unit_column(i); });
  auto p = detail::assemble_columns(a.rows(), cols);
  SpaiStats stats;
  detail::collect_stats(cols, stats);
  stats.nnz = p.nnz();
  stats.build_seconds = clock.seconds();
  return {Preconditioner::explicit_inverse(std::move(p)), std::move(stats)};
}

/// SPAI over a caller-supplied pattern (no augmentation).
inline std::pair<Preconditioner, SpaiStats> spai_build(const SparseMatrix& a,
                                                       const SparsityPattern& pattern,
                                                       int threads = 1) {
  if (!a.is_square() || pattern.cols() != a.cols() || pattern.nrows != a.rows())
    throw DimensionError("spai_build: pattern does not conform to matrix");
  detail::Stopwatch clock;
  ColumnLeastSquares ls(a);
  const Index n = a.cols();
  std::vector<detail::ColumnOutcome> cols(static_cast<std::size_t>(n));
  detail::parallel_chunks(n, threads, [&](Index b, Index e, int) {
    auto ws = ls.make_workspace();
    for (Index i = b; i < e; ++i) {
      auto fit = ls.fit(pattern.columns[static_cast<std::size_t>(i)], unit_column(i), ws);
      auto& o = cols[static_cast<std::size_t>(i)];
      o.support = std::move(fit.support);
      o.values = std::move(fit.values);
      o.residual = fit.residual;
      o.rank_deficient = fit.rank_deficient;
    }
  });
  auto p = detail::assemble_columns(a.rows(), cols);
  SpaiStats stats;
  detail::collect_stats(cols, stats);
  stats.nnz = p.nnz();
  stats.build_seconds = clock.seconds();
  return {Preconditioner::explicit_inverse(std::move(p)), std::move(stats)};
}

}  // namespace pmor
