#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pmor/affine/affine_family.hpp"

namespace pmor {

/// 1-D heat conduction on n interior nodes of [0, 1] with Dirichlet walls
/// and four conductivity regions. 𝔸(p) = p̃1 A1 + p̃2 A2 + p̃3 A3 + p̃4 A4 + A5,
/// where A_k is the finite-difference Laplacian restricted to the edges of
/// region k (wall edges included) and A5 = −I models heat exchange with the
/// surroundings. E is the linear finite-element mass matrix, 𝔹 a unit heat
/// source on every node.
struct HeatKronSpec {
  Index n = 10;
  /// Conductivity vectors p_j = (p̃1, p̃2, p̃3, p̃4), one per point.
  std::vector<std::array<double, 4>> points{{1.0, 1.0, 1.0, 1.0}, {1.1, 0.9, 1.0, 1.05}};
};

struct HeatBase {
  SparseMatrix e;
  std::array<SparseMatrix, 5> a;  // A1..A5
  DenseBlock bb;                  // 𝔹, n x 1
};

struct HeatKronModel {
  HeatBase base;
  /// Terms [E⊗A5 + A5⊗E, E⊗A1 + A1⊗E, …, E⊗A4 + A4⊗E] in the coefficients
  /// (p̃1, …, p̃4); right-hand side vec(𝔹𝔹ᵀ).
  AffineFamily family;
  std::vector<ExpansionPoint> points;
};

inline HeatBase heat_base(Index n) {
  if (n < 3) throw std::invalid_argument("heat_base: need at least three nodes");
  const double h = 1.0 / double(n + 1);
  const double inv_h2 = 1.0 / (h * h);
  // Edge k joins node k-1 and node k for k = 0..n; nodes -1 and n are the
  // fixed-temperature walls. Edges are split into four consecutive regions.
  std::array<std::vector<Triplet>, 5> t;
  for (Index k = 0; k <= n; ++k) {
    const auto region = static_cast<std::size_t>((4 * k) / (n + 1));
    const Index a = k - 1, b = k;
    if (a >= 0) t[region].push_back({a, a, -inv_h2});
    if (b < n) t[region].push_back({b, b, -inv_h2});
    if (a >= 0 && b < n) {
      t[region].push_back({a, b, inv_h2});
      t[region].push_back({b, a, inv_h2});
    }
  }
  // Heat exchange with the surroundings, independent of the conductivities.
  for (Index i = 0; i < n; ++i) t[4].push_back({i, i, -1.0});

  HeatBase base;
  for (std::size_t r = 0; r < 5; ++r) base.a[r] = SparseMatrix::from_triplets(n, n, std::move(t[r]));
  std::vector<Triplet> m;
  for (Index i = 0; i < n; ++i) {
    m.push_back({i, i, 2.0 / 3.0});
    if (i > 0) m.push_back({i, i - 1, 1.0 / 6.0});
    if (i + 1 < n) m.push_back({i, i + 1, 1.0 / 6.0});
  }
  base.e = SparseMatrix::from_triplets(n, n, std::move(m));
  base.bb = DenseBlock::Ones(n, 1);
  return base;
}

/// 𝔸(p) = Σ p̃_k A_k + A5.
inline SparseMatrix heat_state_matrix(const HeatBase& base, const std::array<double, 4>& p) {
  SparseMatrix s = base.a[4];
  for (std::size_t k = 0; k < 4; ++k) s = add(s, base.a[k], 1.0, p[k]);
  return s;
}

/// Parameter-dependent part of 𝔸: Σ p̃_k A_k.
inline SparseMatrix heat_parametric_part(const HeatBase& base, const std::array<double, 4>& p) {
  SparseMatrix s = base.a[0].scaled(p[0]);
  for (std::size_t k = 1; k < 4; ++k) s = add(s, base.a[k], 1.0, p[k]);
  return s;
}

/// Lyapunov operator E⊗M + M⊗E, whose action is vec(M Z Eᵀ + E Z Mᵀ).
inline SparseMatrix lyapunov_operator(const SparseMatrix& e, const SparseMatrix& m) {
  return add(kron(e, m), kron(m, e));
}

/// System matrix of the vectorized Lyapunov equation at p, assembled directly.
inline SparseMatrix heat_kron_matrix(const HeatBase& base, const std::array<double, 4>& p) {
  return lyapunov_operator(base.e, heat_state_matrix(base, p));
}

/// (EA)_j with A(p_j) = A(p_1) + (EA)_j: the Kronecker products of the
/// parametric parts at p_j minus those at p_1.
inline SparseMatrix heat_kron_difference(const HeatBase& base, const std::array<double, 4>& p1,
                                         const std::array<double, 4>& pj) {
  const auto a1 = heat_parametric_part(base, p1);
  const auto aj = heat_parametric_part(base, pj);
  // Terms are paired so that equal parameters cancel exactly.
  const auto left = subtract(kron(base.e, aj), kron(base.e, a1));
  const auto right = subtract(kron(aj, base.e), kron(a1, base.e));
  return add(left, right);
}

/// vec(𝔹𝔹ᵀ), column-stacked.
inline DenseBlock heat_kron_rhs(const HeatBase& base) {
  const DenseMatrix outer = base.bb * base.bb.transpose();
  return DenseBlock(outer.reshaped(outer.size(), 1));
}

inline ExpansionPoint heat_point(const std::array<double, 4>& p, std::string label = {}) {
  return ExpansionPoint{{p[0], p[1], p[2], p[3]}, std::move(label)};
}

inline HeatKronModel gen_heat_kron(const HeatKronSpec& spec) {
  if (spec.n > static_cast<Index>(std::sqrt(double(std::numeric_limits<std::int32_t>::max()))))
    throw DimensionError("gen_heat_kron: n² exceeds the supported system size");
  auto base = heat_base(spec.n);
  std::vector<SparseMatrix> terms;
  terms.push_back(lyapunov_operator(base.e, base.a[4]));
  for (std::size_t k = 0; k < 4; ++k) terms.push_back(lyapunov_operator(base.e, base.a[k]));
  auto rhs = heat_kron_rhs(base);
  HeatKronModel m{std::move(base),
                  AffineFamily(std::move(terms), std::move(rhs), {}, {"EA5", "EA1", "EA2", "EA3", "EA4"}),
                  {}};
  for (std::size_t j = 0; j < spec.points.size(); ++j)
    m.points.push_back(heat_point(spec.points[j], "p" + std::to_string(j + 1)));
  return m;
}

}  // namespace pmor
