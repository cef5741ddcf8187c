#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pmor/core/types.hpp"

namespace pmor {

struct Triplet {
  Index row;
  Index col;
  Complex value;
};

/// Compressed sparse row matrix over complex doubles.
///
/// Column indices are strictly increasing within each row and no explicit
/// zeros are stored. Instances are immutable once built.
class SparseMatrix {
 public:
  SparseMatrix() : row_ptr_(1, 0) {}

  /// All-zero matrix of the given shape.
  SparseMatrix(Index nrows, Index ncols)
      : nrows_(nrows), ncols_(ncols), row_ptr_(static_cast<std::size_t>(nrows) + 1, 0) {
    if (nrows < 0 || ncols < 0) throw DimensionError("SparseMatrix: negative dimension");
  }

  /// Builds from unordered triplets. Duplicates are summed; entries with
  /// modulus zero or below `prune_below` are dropped.
  static SparseMatrix from_triplets(Index nrows, Index ncols, std::vector<Triplet> triplets,
                                    double prune_below = 0.0) {
    SparseMatrix m(nrows, ncols);
    for (const auto& t : triplets) {
      if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols)
        throw DimensionError("SparseMatrix::from_triplets: index out of range (" +
                             std::to_string(t.row) + ", " + std::to_string(t.col) + ")");
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    m.col_idx_.reserve(triplets.size());
    m.values_.reserve(triplets.size());
    std::size_t k = 0;
    for (Index r = 0; r < nrows; ++r) {
      while (k < triplets.size() && triplets[k].row == r) {
        const Index c = triplets[k].col;
        Complex sum = 0.0;
        while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) {
          sum += triplets[k].value;
          ++k;
        }
        if (keep(sum, prune_below)) {
          m.col_idx_.push_back(c);
          m.values_.push_back(sum);
        }
      }
      m.row_ptr_[static_cast<std::size_t>(r) + 1] = static_cast<Index>(m.col_idx_.size());
    }
    return m;
  }

  /// Adopts CSR arrays after validating them. Exact zeros are pruned.
  static SparseMatrix from_csr(Index nrows, Index ncols, std::vector<Index> row_ptr,
                               std::vector<Index> col_idx, std::vector<Complex> values) {
    if (row_ptr.size() != static_cast<std::size_t>(nrows) + 1 || row_ptr.front() != 0 ||
        col_idx.size() != values.size() ||
        row_ptr.back() != static_cast<Index>(col_idx.size()))
      throw DimensionError("SparseMatrix::from_csr: inconsistent array lengths");
    for (Index r = 0; r < nrows; ++r) {
      const auto b = row_ptr[r], e = row_ptr[r + 1];
      if (e < b) throw DimensionError("SparseMatrix::from_csr: row pointer not monotone");
      for (Index k = b; k < e; ++k) {
        if (col_idx[k] < 0 || col_idx[k] >= ncols)
          throw DimensionError("SparseMatrix::from_csr: column index out of range");
        if (k > b && col_idx[k] <= col_idx[k - 1])
          throw DimensionError("SparseMatrix::from_csr: column indices not strictly increasing");
      }
    }
    SparseMatrix m(nrows, ncols);
    m.col_idx_.reserve(col_idx.size());
    m.values_.reserve(values.size());
    for (Index r = 0; r < nrows; ++r) {
      for (Index k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
        if (keep(values[k], 0.0)) {
          m.col_idx_.push_back(col_idx[k]);
          m.values_.push_back(values[k]);
        }
      }
      m.row_ptr_[r + 1] = static_cast<Index>(m.col_idx_.size());
    }
    return m;
  }

  static SparseMatrix identity(Index n) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) t.push_back({i, i, 1.0});
    return from_triplets(n, n, std::move(t));
  }

  static SparseMatrix diagonal(const Vector& d) {
    std::vector<Triplet> t;
    for (Index i = 0; i < d.size(); ++i) t.push_back({i, i, d[i]});
    return from_triplets(d.size(), d.size(), std::move(t));
  }

  Index rows() const noexcept { return nrows_; }
  Index cols() const noexcept { return ncols_; }
  Index nnz() const noexcept { return static_cast<Index>(values_.size()); }
  bool is_square() const noexcept { return nrows_ == ncols_; }

  std::span<const Index> row_ptr() const noexcept { return row_ptr_; }
  std::span<const Index> col_idx() const noexcept { return col_idx_; }
  std::span<const Complex> values() const noexcept { return values_; }

  /// Stored value at (i, j), or zero.
  Complex coeff(Index i, Index j) const {
    const auto b = col_idx_.begin() + row_ptr_[i];
    const auto e = col_idx_.begin() + row_ptr_[i + 1];
    const auto it = std::lower_bound(b, e, j);
    if (it == e || *it != j) return 0.0;
    return values_[static_cast<std::size_t>(it - col_idx_.begin())];
  }

  /// Plain (non-conjugating) transpose.
  SparseMatrix transpose() const {
    SparseMatrix t(ncols_, nrows_);
    std::vector<Index> count(static_cast<std::size_t>(ncols_) + 1, 0);
    for (const auto c : col_idx_) ++count[static_cast<std::size_t>(c) + 1];
    std::partial_sum(count.begin(), count.end(), count.begin());
    t.row_ptr_ = count;
    t.col_idx_.resize(col_idx_.size());
    t.values_.resize(values_.size());
    for (Index r = 0; r < nrows_; ++r) {
      for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
        const auto dst = count[col_idx_[k]]++;
        t.col_idx_[dst] = r;
        t.values_[dst] = values_[k];
      }
    }
    return t;
  }

  SparseMatrix scaled(Complex alpha) const {
    if (alpha == Complex(0.0)) return SparseMatrix(nrows_, ncols_);
    SparseMatrix s = *this;
    for (auto& v : s.values_) v *= alpha;
    return s;
  }

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
    return a.nrows_ == b.nrows_ && a.ncols_ == b.ncols_ && a.row_ptr_ == b.row_ptr_ &&
           a.col_idx_ == b.col_idx_ && a.values_ == b.values_;
  }

 private:
  static bool keep(Complex v, double prune_below) {
    const double m = std::abs(v);
    return m != 0.0 && !(m < prune_below);
  }

  Index nrows_ = 0;
  Index ncols_ = 0;
  std::vector<Index> row_ptr_;
  std::vector<Index> col_idx_;
  std::vector<Complex> values_;
};

/// Per-column sorted, duplicate-free row-index lists.
struct SparsityPattern {
  Index nrows = 0;
  std::vector<std::vector<Index>> columns;

  Index cols() const noexcept { return static_cast<Index>(columns.size()); }

  bool valid() const {
    for (const auto& col : columns) {
      for (std::size_t k = 0; k < col.size(); ++k) {
        if (col[k] < 0 || col[k] >= nrows) return false;
        if (k > 0 && col[k] <= col[k - 1]) return false;
      }
    }
    return true;
  }

  /// True when every entry of `other` is also in this pattern.
  bool contains(const SparsityPattern& other) const {
    if (other.cols() != cols()) return false;
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (!std::includes(columns[j].begin(), columns[j].end(), other.columns[j].begin(),
                         other.columns[j].end()))
        return false;
    }
    return true;
  }
};

inline Vector spmv(const SparseMatrix& a, const Vector& x) {
  if (x.size() != a.cols())
    throw DimensionError("spmv: vector length " + std::to_string(x.size()) +
                         " does not match matrix columns " + std::to_string(a.cols()));
  Vector y(a.rows());
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto va = a.values();
  for (Index r = 0; r < a.rows(); ++r) {
    Complex sum = 0.0;
    for (Index k = rp[r]; k < rp[r + 1]; ++k) sum += va[k] * x[ci[k]];
    y[r] = sum;
  }
  return y;
}

inline DenseBlock spmm(const SparseMatrix& a, const DenseBlock& x) {
  if (x.rows() != a.cols())
    throw DimensionError("spmm: block rows " + std::to_string(x.rows()) +
                         " do not match matrix columns " + std::to_string(a.cols()));
  DenseBlock y = DenseBlock::Zero(a.rows(), x.cols());
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto va = a.values();
  for (Index j = 0; j < x.cols(); ++j) {
    const Complex* xj = x.col(j).data();
    Complex* yj = y.col(j).data();
    for (Index r = 0; r < a.rows(); ++r) {
      Complex sum = 0.0;
      for (Index k = rp[r]; k < rp[r + 1]; ++k) sum += va[k] * xj[ci[k]];
      yj[r] = sum;
    }
  }
  return y;
}

inline double frobenius_norm(const SparseMatrix& a) {
  double sum = 0.0;
  for (const auto& v : a.values()) sum += std::norm(v);
  return std::sqrt(sum);
}

/// alpha*A + beta*B with merged pattern; results with modulus below
/// `prune_below` (or exactly zero) are dropped.
inline SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, Complex alpha = 1.0,
                        Complex beta = 1.0, double prune_below = 0.0) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("add: shape mismatch");
  std::vector<Index> rp(static_cast<std::size_t>(a.rows()) + 1, 0);
  std::vector<Index> ci;
  std::vector<Complex> va;
  ci.reserve(static_cast<std::size_t>(a.nnz() + b.nnz()));
  va.reserve(ci.capacity());
  const auto arp = a.row_ptr(), aci = a.col_idx();
  const auto brp = b.row_ptr(), bci = b.col_idx();
  const auto ava = a.values(), bva = b.values();
  auto push = [&](Index c, Complex v) {
    const double m = std::abs(v);
    if (m != 0.0 && !(m < prune_below)) {
      ci.push_back(c);
      va.push_back(v);
    }
  };
  for (Index r = 0; r < a.rows(); ++r) {
    Index i = arp[r], j = brp[r];
    while (i < arp[r + 1] || j < brp[r + 1]) {
      if (j >= brp[r + 1] || (i < arp[r + 1] && aci[i] < bci[j])) {
        push(aci[i], alpha * ava[i]);
        ++i;
      } else if (i >= arp[r + 1] || bci[j] < aci[i]) {
        push(bci[j], beta * bva[j]);
        ++j;
      } else {
        push(aci[i], alpha * ava[i] + beta * bva[j]);
        ++i;
        ++j;
      }
    }
    rp[r + 1] = static_cast<Index>(ci.size());
  }
  return SparseMatrix::from_csr(a.rows(), a.cols(), std::move(rp), std::move(ci), std::move(va));
}

inline SparseMatrix subtract(const SparseMatrix& a, const SparseMatrix& b) {
  return add(a, b, 1.0, -1.0);
}

/// Sparse-sparse product A*B (row-wise Gustavson).
inline SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("multiply: inner dimension mismatch");
  std::vector<Index> rp(static_cast<std::size_t>(a.rows()) + 1, 0);
  std::vector<Index> ci;
  std::vector<Complex> va;
  std::vector<Complex> acc(static_cast<std::size_t>(b.cols()), 0.0);
  std::vector<Index> marker(static_cast<std::size_t>(b.cols()), -1);
  std::vector<Index> touched;
  const auto arp = a.row_ptr(), aci = a.col_idx();
  const auto brp = b.row_ptr(), bci = b.col_idx();
  const auto ava = a.values(), bva = b.values();
  for (Index r = 0; r < a.rows(); ++r) {
    touched.clear();
    for (Index k = arp[r]; k < arp[r + 1]; ++k) {
      const Index m = aci[k];
      for (Index l = brp[m]; l < brp[m + 1]; ++l) {
        const Index c = bci[l];
        if (marker[c] != r) {
          marker[c] = r;
          acc[c] = 0.0;
          touched.push_back(c);
        }
        acc[c] += ava[k] * bva[l];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (const auto c : touched) {
      if (acc[c] != Complex(0.0)) {
        ci.push_back(c);
        va.push_back(acc[c]);
      }
    }
    rp[r + 1] = static_cast<Index>(ci.size());
  }
  return SparseMatrix::from_csr(a.rows(), b.cols(), std::move(rp), std::move(ci), std::move(va));
}

/// Standard Kronecker product A ⊗ B.
inline SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
  constexpr Index max_index = std::numeric_limits<Index>::max();
  auto checked_mul = [](Index x, Index y) {
    if (x != 0 && y > max_index / x) throw DimensionError("kron: index range overflow");
    return x * y;
  };
  const Index nrows = checked_mul(a.rows(), b.rows());
  const Index ncols = checked_mul(a.cols(), b.cols());
  const Index nnz = checked_mul(a.nnz(), b.nnz());
  std::vector<Index> rp(static_cast<std::size_t>(nrows) + 1, 0);
  std::vector<Index> ci;
  std::vector<Complex> va;
  ci.reserve(static_cast<std::size_t>(nnz));
  va.reserve(static_cast<std::size_t>(nnz));
  const auto arp = a.row_ptr(), aci = a.col_idx();
  const auto brp = b.row_ptr(), bci = b.col_idx();
  const auto ava = a.values(), bva = b.values();
  for (Index ra = 0; ra < a.rows(); ++ra) {
    for (Index rb = 0; rb < b.rows(); ++rb) {
      for (Index ka = arp[ra]; ka < arp[ra + 1]; ++ka) {
        for (Index kb = brp[rb]; kb < brp[rb + 1]; ++kb) {
          ci.push_back(aci[ka] * b.cols() + bci[kb]);
          va.push_back(ava[ka] * bva[kb]);
        }
      }
      rp[static_cast<std::size_t>(ra * b.rows() + rb) + 1] = static_cast<Index>(ci.size());
    }
  }
  return SparseMatrix::from_csr(nrows, ncols, std::move(rp), std::move(ci), std::move(va));
}

inline DenseMatrix to_dense(const SparseMatrix& a) {
  DenseMatrix d = DenseMatrix::Zero(a.rows(), a.cols());
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto va = a.values();
  for (Index r = 0; r < a.rows(); ++r)
    for (Index k = rp[r]; k < rp[r + 1]; ++k) d(r, ci[k]) = va[k];
  return d;
}

inline SparseMatrix from_dense(const DenseMatrix& d, double prune_below = 0.0) {
  std::vector<Triplet> t;
  for (Index j = 0; j < d.cols(); ++j)
    for (Index i = 0; i < d.rows(); ++i)
      if (d(i, j) != Complex(0.0)) t.push_back({i, j, d(i, j)});
  return SparseMatrix::from_triplets(d.rows(), d.cols(), std::move(t), prune_below);
}

/// Column-wise sparsity of A: row indices of the stored entries in each column.
inline SparsityPattern column_pattern(const SparseMatrix& a) {
  SparsityPattern p;
  p.nrows = a.rows();
  p.columns.resize(static_cast<std::size_t>(a.cols()));
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  for (Index r = 0; r < a.rows(); ++r)
    for (Index k = rp[r]; k < rp[r + 1]; ++k) p.columns[ci[k]].push_back(r);
  return p;
}

}  // namespace pmor
