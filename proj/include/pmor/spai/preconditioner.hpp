#pragma once

#include <memory>
#include <utility>

#include "pmor/sparse/sparse_matrix.hpp"

namespace pmor {

/// Right preconditioner: either an explicit sparse approximate inverse P, or
/// a factored update Q * base applied as successive sparse products.
class Preconditioner {
 public:
  enum class Kind { explicit_inverse, factored };

  static Preconditioner explicit_inverse(SparseMatrix p) {
    if (!p.is_square()) throw DimensionError("Preconditioner: explicit P must be square");
    return Preconditioner(Kind::explicit_inverse, std::move(p), nullptr);
  }

  static Preconditioner identity(Index n) { return explicit_inverse(SparseMatrix::identity(n)); }

  /// P = Q * base. The base is shared, never copied or materialized.
  static Preconditioner factored(SparseMatrix q, Preconditioner base) {
    if (!q.is_square() || q.rows() != base.dimension())
      throw DimensionError("Preconditioner: factor Q does not conform to its base");
    return Preconditioner(Kind::factored, std::move(q),
                          std::make_shared<const Preconditioner>(std::move(base)));
  }

  Kind kind() const noexcept { return kind_; }
  bool is_factored() const noexcept { return kind_ == Kind::factored; }
  Index dimension() const noexcept { return matrix_.rows(); }

  /// P for the explicit form, Q for the factored form.
  const SparseMatrix& matrix() const noexcept { return matrix_; }
  const Preconditioner* base() const noexcept { return base_.get(); }

  /// Number of sparse factors applied per product (1 for explicit).
  int depth() const noexcept { return base_ ? 1 + base_->depth() : 1; }

  /// Stored nonzeros over the whole chain.
  Index chain_nnz() const noexcept { return matrix_.nnz() + (base_ ? base_->chain_nnz() : 0); }

  DenseBlock apply(const DenseBlock& v) const {
    if (v.rows() != dimension()) throw DimensionError("Preconditioner::apply: row mismatch");
    if (!base_) return spmm(matrix_, v);
    return spmm(matrix_, base_->apply(v));
  }

  /// Explicit product of the chain. Diagnostic use only; the solve path
  /// always applies factors one at a time.
  SparseMatrix materialize() const {
    if (!base_) return matrix_;
    return multiply(matrix_, base_->materialize());
  }

 private:
  Preconditioner(Kind kind, SparseMatrix m, std::shared_ptr<const Preconditioner> base)
      : kind_(kind), matrix_(std::move(m)), base_(std::move(base)) {}

  Kind kind_;
  SparseMatrix matrix_;
  std::shared_ptr<const Preconditioner> base_;
};

inline DenseBlock apply_preconditioner(const Preconditioner& p, const DenseBlock& v) {
  return p.apply(v);
}

/// ||I - A P||_F with P materialized.
inline double quality(const SparseMatrix& a, const Preconditioner& p) {
  if (a.cols() != p.dimension() || !a.is_square())
    throw DimensionError("quality: preconditioner does not conform to matrix");
  const auto ap = multiply(a, p.materialize());
  return frobenius_norm(subtract(SparseMatrix::identity(a.rows()), ap));
}

}  // namespace pmor
