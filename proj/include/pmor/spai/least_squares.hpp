#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/QR>

#include "pmor/sparse/sparse_matrix.hpp"

namespace pmor {

/// A sparse column vector: sorted row indices with values.
struct SparseColumn {
  std::vector<Index> indices;
  std::vector<Complex> values;

  double norm() const {
    double s = 0.0;
    for (const auto& v : values) s += std::norm(v);
    return std::sqrt(s);
  }
};

struct ColumnFit {
  std::vector<Index> support;   // row indices of the fitted column
  std::vector<Complex> values;  // same length as support
  std::vector<Index> touched;   // rows reached by A(:, support)
  double residual = 0.0;        // ||t - A z||_2, including rows outside `touched`
  bool rank_deficient = false;
};

/// Solves min_z ||t - A z||_2 with z restricted to a given support, one
/// column at a time. Column access to A is served by a transposed copy
/// built once at construction.
class ColumnLeastSquares {
 public:
  /// Per-thread scratch space.
  struct Workspace {
    std::vector<Index> local;  // global row -> local row, -1 when absent
    std::vector<double> weight;
  };

  explicit ColumnLeastSquares(const SparseMatrix& a) : a_(&a), columns_(a.transpose()) {
    if (!a.is_square()) throw DimensionError("ColumnLeastSquares: matrix must be square");
  }

  Index dimension() const noexcept { return a_->rows(); }
  const SparseMatrix& matrix() const noexcept { return *a_; }

  Workspace make_workspace() const {
    return Workspace{std::vector<Index>(static_cast<std::size_t>(dimension()), -1),
                     std::vector<double>(static_cast<std::size_t>(dimension()), 0.0)};
  }

  /// Row indices of the stored entries of column j of A.
  std::span<const Index> column_rows(Index j) const {
    const auto rp = columns_.row_ptr();
    return columns_.col_idx().subspan(static_cast<std::size_t>(rp[j]),
                                      static_cast<std::size_t>(rp[j + 1] - rp[j]));
  }

  std::span<const Complex> column_values(Index j) const {
    const auto rp = columns_.row_ptr();
    return columns_.values().subspan(static_cast<std::size_t>(rp[j]),
                                     static_cast<std::size_t>(rp[j + 1] - rp[j]));
  }

  /// Structural support of column i of A^2 ranked by |A|·|A| magnitude.
  /// Returns (row, magnitude) pairs for rows with positive magnitude.
  std::vector<std::pair<Index, double>> square_column(Index i, Workspace& ws) const {
    std::vector<Index> rows;
    const auto ki = column_rows(i);
    const auto vi = column_values(i);
    for (std::size_t a = 0; a < ki.size(); ++a) {
      const Index k = ki[a];
      const double w = std::abs(vi[a]);
      const auto rk = column_rows(k);
      const auto vk = column_values(k);
      for (std::size_t b = 0; b < rk.size(); ++b) {
        auto& slot = ws.weight[static_cast<std::size_t>(rk[b])];
        if (slot == 0.0) rows.push_back(rk[b]);
        slot += w * std::abs(vk[b]);
      }
    }
    std::vector<std::pair<Index, double>> out;
    out.reserve(rows.size());
    for (const auto r : rows) {
      auto& slot = ws.weight[static_cast<std::size_t>(r)];
      if (slot > 0.0) out.emplace_back(r, slot);
      slot = 0.0;
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  ColumnFit fit(std::span<const Index> support, const SparseColumn& target, Workspace& ws) const {
    ColumnFit fit;
    fit.support.assign(support.begin(), support.end());
    for (const auto j : support) {
      const auto rows = column_rows(j);
      fit.touched.insert(fit.touched.end(), rows.begin(), rows.end());
    }
    std::sort(fit.touched.begin(), fit.touched.end());
    fit.touched.erase(std::unique(fit.touched.begin(), fit.touched.end()), fit.touched.end());

    const Index m = static_cast<Index>(fit.touched.size());
    const Index k = static_cast<Index>(support.size());
    for (Index r = 0; r < m; ++r) ws.local[static_cast<std::size_t>(fit.touched[r])] = r;

    Vector rhs = Vector::Zero(m);
    double outside = 0.0;
    for (std::size_t t = 0; t < target.indices.size(); ++t) {
      const Index loc = ws.local[static_cast<std::size_t>(target.indices[t])];
      if (loc >= 0) rhs[loc] = target.values[t];
      else outside += std::norm(target.values[t]);
    }

    fit.values.assign(static_cast<std::size_t>(k), Complex(0.0));
    if (m == 0 || k == 0) {
      fit.residual = std::sqrt(outside + rhs.squaredNorm());
      for (const auto r : fit.touched) ws.local[static_cast<std::size_t>(r)] = -1;
      return fit;
    }

    DenseMatrix sub = DenseMatrix::Zero(m, k);
    for (Index c = 0; c < k; ++c) {
      const auto rows = column_rows(support[static_cast<std::size_t>(c)]);
      const auto vals = column_values(support[static_cast<std::size_t>(c)]);
      for (std::size_t e = 0; e < rows.size(); ++e)
        sub(ws.local[static_cast<std::size_t>(rows[e])], c) = vals[e];
    }
    for (const auto r : fit.touched) ws.local[static_cast<std::size_t>(r)] = -1;

    Eigen::CompleteOrthogonalDecomposition<DenseMatrix> cod(sub);
    const Vector z = cod.solve(rhs);
    fit.rank_deficient = cod.rank() < k;
    for (Index c = 0; c < k; ++c) fit.values[static_cast<std::size_t>(c)] = z[c];
    fit.residual = std::sqrt(outside + (rhs - sub * z).squaredNorm());
    return fit;
  }

 private:
  const SparseMatrix* a_;
  SparseMatrix columns_;  // transpose of A: row j holds column j
};

inline SparseColumn unit_column(Index i) { return SparseColumn{{i}, {Complex(1.0)}}; }

}  // namespace pmor
