#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pmor/zoo/heat.hpp"
#include "pmor/zoo/penzl.hpp"

namespace pmor {

/// One member of a linear-system sequence.
struct LinearSystem {
  SparseMatrix a;
  DenseBlock b;
  std::string label;
};

/// Second-order system with scalar parameter p: M(p) ẍ + D(p) ẋ + K(p) x = B(p) u.
struct ParametricSecondOrder {
  std::function<SparseMatrix(double)> m;
  std::function<SparseMatrix(double)> d;
  std::function<SparseMatrix(double)> k;
  std::function<DenseBlock(double)> b;
};

/// Penzl-type system in second-order form: M = 0, D = I, K = −𝔸(p), so that
/// s²M + sD + K = sI − 𝔸(p).
inline ParametricSecondOrder penzl_second_order(const PenzlSpec& spec) {
  const Index n = penzl_dimension(spec);
  const auto model = gen_penzl(spec);
  DenseBlock b = model.family.rhs();
  return ParametricSecondOrder{
      [n](double) { return SparseMatrix::from_triplets(n, n, {}); },
      [n](double) { return SparseMatrix::identity(n); },
      [spec](double p) { return penzl_state_matrix(spec, p).scaled(-1.0); },
      [b](double) { return b; }};
}

/// Systems A(s_k, p_j) = s_k² M(p_j) + s_k D(p_j) + K(p_j) with B(p_j), ordered
/// with all parameters for s_1 first, then s_2, and so on.
inline std::vector<LinearSystem> pmor_l_sequence(const ParametricSecondOrder& model,
                                                 const std::vector<Complex>& s_grid,
                                                 const std::vector<double>& p_grid) {
  if (s_grid.empty() || p_grid.empty()) throw std::invalid_argument("pmor_l_sequence: empty grid");
  std::vector<LinearSystem> out;
  out.reserve(s_grid.size() * p_grid.size());
  for (std::size_t k = 0; k < s_grid.size(); ++k) {
    const Complex s = s_grid[k];
    for (std::size_t j = 0; j < p_grid.size(); ++j) {
      const double p = p_grid[j];
      auto a = add(add(model.m(p), model.d(p), s * s, s), model.k(p));
      out.push_back({std::move(a), model.b(p), "s" + std::to_string(k + 1) + "p" + std::to_string(j + 1)});
    }
  }
  return out;
}

/// Vectorized Lyapunov systems (E⊗𝔸(p_j) + 𝔸(p_j)⊗E) z = vec(𝔹𝔹ᵀ), one per point.
inline std::vector<LinearSystem> pbtmr_sequence(const HeatKronSpec& spec) {
  const auto base = heat_base(spec.n);
  const auto rhs = heat_kron_rhs(base);
  std::vector<LinearSystem> out;
  for (std::size_t j = 0; j < spec.points.size(); ++j)
    out.push_back({heat_kron_matrix(base, spec.points[j]), rhs, "p" + std::to_string(j + 1)});
  return out;
}

/// Reshapes a column-stacked n²-vector into the n x n matrix Z.
inline DenseMatrix unvec(const Vector& z, Index n) {
  if (z.size() != n * n) throw DimensionError("unvec: length is not n²");
  return z.reshaped(n, n);
}

/// ||𝔸 Z Eᵀ + E Z 𝔸ᵀ − 𝔹𝔹ᵀ||_F / ||𝔹𝔹ᵀ||_F.
inline double lyapunov_residual(const HeatBase& base, const std::array<double, 4>& p, const DenseMatrix& z) {
  const DenseMatrix a = to_dense(heat_state_matrix(base, p));
  const DenseMatrix e = to_dense(base.e);
  const DenseMatrix bbt = base.bb * base.bb.transpose();
  const DenseMatrix r = a * z * e.transpose() + e * z * a.transpose() - bbt;
  return r.norm() / bbt.norm();
}

}  // namespace pmor
