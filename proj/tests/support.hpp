#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pmor/core/types.hpp"
#include "pmor/sparse/sparse_matrix.hpp"

namespace pmor::testing {

inline Complex random_complex(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng), u(rng)};
}

inline DenseMatrix random_dense(Index rows, Index cols, std::mt19937_64& rng) {
  DenseMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = random_complex(rng);
  return m;
}

/// Random sparse matrix with the given density; `diag_shift` is added to the
/// diagonal so that large shifts give well-conditioned matrices.
inline SparseMatrix random_sparse(Index n, double density, std::mt19937_64& rng,
                                  double diag_shift = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j || u(rng) < density) t.push_back({i, j, random_complex(rng)});
    }
    if (diag_shift != 0.0) t.push_back({i, i, Complex(diag_shift)});
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

/// Diagonally dominant random sparse matrix; condition number stays modest.
inline SparseMatrix well_conditioned(Index n, double density, std::mt19937_64& rng) {
  return random_sparse(n, density, rng, 2.0 + density * static_cast<double>(n));
}

inline double relative_error(const DenseMatrix& a, const DenseMatrix& b) {
  const double nb = b.norm();
  return nb > 0.0 ? (a - b).norm() / nb : (a - b).norm();
}

}  // namespace pmor::testing
