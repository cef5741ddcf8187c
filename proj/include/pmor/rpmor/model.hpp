#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "pmor/affine/affine_family.hpp"
#include "pmor/sparse/dense.hpp"

namespace pmor {

/// Parametric second-order model in affine form: A(s̃) x = B u, y = Cᵀ x,
/// where A(s̃) collects the s²M + sD + K structure term by term.
using SecondOrderModel = AffineFamily;

/// Galerkin-reduced model: every affine term T becomes Vᴴ T V.
struct ReducedModel {
  std::vector<DenseMatrix> terms;
  std::vector<std::string> term_labels;
  DenseBlock b;  // Vᴴ B
  DenseBlock c;  // Vᵀ C, so that Ĉᵀ = Cᵀ V
  DenseBlock v;  // n x r, orthonormal columns

  Index order() const noexcept { return v.cols(); }
  Index parameter_count() const noexcept { return static_cast<Index>(terms.size()) - 1; }

  DenseMatrix evaluate(const ExpansionPoint& p) const {
    if (p.size() != parameter_count())
      throw DimensionError("ReducedModel::evaluate: point length does not match term count");
    DenseMatrix a = terms.front();
    for (Index j = 0; j < p.size(); ++j)
      if (p.values[static_cast<std::size_t>(j)] != Complex(0.0))
        a += p.values[static_cast<std::size_t>(j)] * terms[static_cast<std::size_t>(j) + 1];
    return a;
  }
};

/// Vᴴ T V for every term, Vᴴ B and Vᵀ C.
inline ReducedModel galerkin_project(const SecondOrderModel& model, const DenseBlock& v) {
  if (v.rows() != model.dimension()) throw DimensionError("galerkin_project: basis rows mismatch");
  if (v.cols() == 0) throw std::invalid_argument("galerkin_project: empty basis");
  ReducedModel r;
  r.v = v;
  r.term_labels = model.term_labels();
  r.terms.reserve(model.terms().size());
  for (const auto& t : model.terms()) r.terms.push_back(v.adjoint() * spmm(t, v));
  if (model.rhs().size() != 0) r.b = v.adjoint() * model.rhs();
  if (model.output().size() != 0) r.c = v.transpose() * model.output();
  return r;
}

inline Eigen::SparseMatrix<Complex> to_eigen(const SparseMatrix& a) {
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(static_cast<std::size_t>(a.nnz()));
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto va = a.values();
  for (Index r = 0; r < a.rows(); ++r)
    for (Index k = rp[r]; k < rp[r + 1]; ++k) t.emplace_back(r, ci[k], va[k]);
  Eigen::SparseMatrix<Complex> m(a.rows(), a.cols());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

/// Direct sparse solve A X = B, used for transfer-function evaluation.
inline DenseBlock sparse_direct_solve(const SparseMatrix& a, const DenseBlock& b) {
  if (!a.is_square() || b.rows() != a.rows())
    throw DimensionError("sparse_direct_solve: dimensions do not conform");
  const auto m = to_eigen(a);
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(m);
  lu.factorize(m);
  if (lu.info() != Eigen::Success) throw NumericalError("sparse_direct_solve: singular system");
  DenseBlock x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw NumericalError("sparse_direct_solve: solve failed");
  return x;
}

/// H = Cᵀ A(p)⁻¹ B, evaluated through a linear solve.
inline DenseMatrix transfer_function(const SecondOrderModel& model, const ExpansionPoint& p) {
  if (model.rhs().size() == 0 || model.output().size() == 0)
    throw std::invalid_argument("transfer_function: model needs both B and C");
  const DenseBlock x = sparse_direct_solve(model.evaluate(p), model.rhs());
  return model.output().transpose() * x;
}

inline DenseMatrix transfer_function(const ReducedModel& model, const ExpansionPoint& p) {
  if (model.b.size() == 0 || model.c.size() == 0)
    throw std::invalid_argument("transfer_function: reduced model needs both B and C");
  return model.c.transpose() * dense_lu_solve(model.evaluate(p), model.b);
}

/// Central-difference derivative of H with respect to coefficient j, with
/// step 1e-6·|s̃_j| + 1e-9.
template <class Model>
DenseMatrix transfer_derivative(const Model& model, const ExpansionPoint& p, Index j) {
  if (j < 0 || j >= p.size()) throw DimensionError("transfer_derivative: direction out of range");
  const double h = 1e-6 * std::abs(p.values[static_cast<std::size_t>(j)]) + 1e-9;
  ExpansionPoint plus = p, minus = p;
  plus.values[static_cast<std::size_t>(j)] += h;
  minus.values[static_cast<std::size_t>(j)] -= h;
  return (transfer_function(model, plus) - transfer_function(model, minus)) / (2.0 * h);
}

}  // namespace pmor
