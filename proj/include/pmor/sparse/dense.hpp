#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>

#include "pmor/core/types.hpp"

namespace pmor {

/// Appends the columns of `candidates` to the orthonormal basis `basis`
/// using modified Gram-Schmidt with one re-orthogonalization pass. A column
/// whose norm after orthogonalization falls below `tol_drop` times its
/// original norm is dropped. Returns the number of columns appended.
inline Index orthonormal_extend(DenseBlock& basis, const DenseBlock& candidates,
                                double tol_drop = 1e-10) {
  if (basis.size() != 0 && basis.rows() != candidates.rows())
    throw DimensionError("orthonormal_extend: row count mismatch");
  const Index n = candidates.rows();
  if (basis.size() == 0) basis.resize(n, 0);
  Index added = 0;
  for (Index j = 0; j < candidates.cols(); ++j) {
    Vector v = candidates.col(j);
    const double original = v.norm();
    if (original == 0.0 || !std::isfinite(original)) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (Index k = 0; k < basis.cols(); ++k) {
        const Complex h = basis.col(k).dot(v);  // conjugates the basis column
        v -= h * basis.col(k);
      }
    }
    const double remaining = v.norm();
    if (remaining < tol_drop * original) continue;
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = v / remaining;
    ++added;
  }
  return added;
}

/// Orthonormal basis for the span of the columns of V (dependent columns dropped).
inline DenseBlock mgs_orthonormalize(const DenseBlock& v, double tol_drop = 1e-10) {
  DenseBlock q(v.rows(), 0);
  orthonormal_extend(q, v, tol_drop);
  return q;
}

/// Dense LU solve with partial pivoting. Oracle-scale only (n <= 500 intended).
inline DenseBlock dense_lu_solve(const DenseMatrix& a, const DenseBlock& b) {
  if (a.rows() != a.cols()) throw DimensionError("dense_lu_solve: matrix not square");
  if (b.rows() != a.rows()) throw DimensionError("dense_lu_solve: right-hand side rows mismatch");
  Eigen::PartialPivLU<DenseMatrix> lu(a);
  const auto& packed = lu.matrixLU();
  double largest = 0.0;
  for (Index i = 0; i < a.rows(); ++i) largest = std::max(largest, std::abs(packed(i, i)));
  const double floor = static_cast<double>(a.rows()) * std::numeric_limits<double>::epsilon() *
                       largest;
  for (Index i = 0; i < a.rows(); ++i) {
    if (!(std::abs(packed(i, i)) > floor))
      throw NumericalError("dense_lu_solve: singular to working precision at pivot " +
                           std::to_string(i));
  }
  return lu.solve(b);
}

}  // namespace pmor
