#pragma once

#include <complex>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "pmor/affine/affine_family.hpp"
#include "pmor/rpmor/model.hpp"

namespace pmor {

/// First-order test system E ż = 𝔸(p) z + B u with E = I and
/// 𝔸(p) = blkdiag(A1(p), A2, A3, A4), A1(p) = [[-1, p], [-p, -1]],
/// A2 = [[-1, ω2], [-ω2, -1]], A3 = [[-1, ω3], [-ω3, -1]], A4 = diag(1..n4).
struct PenzlSpec {
  std::vector<double> parameters{10.0, 50.0, 100.0};
  Index n4 = 1000;
  double omega2 = 200.0;
  double omega3 = 400.0;
};

struct PenzlModel {
  /// Terms [A0, I, -S] in the coefficients (s, p), where
  /// A(s, p) = sI − 𝔸(p) = A0 + s·I + p·(−S) and S carries the ±1 pattern of A1.
  SecondOrderModel family;
  std::vector<double> parameters;
  Index n = 0;
};

inline Index penzl_dimension(const PenzlSpec& spec) { return 6 + spec.n4; }

/// 𝔸(p) assembled directly from its blocks.
inline SparseMatrix penzl_state_matrix(const PenzlSpec& spec, double p) {
  const Index n = penzl_dimension(spec);
  std::vector<Triplet> t;
  auto block = [&](Index o, double w) {
    t.push_back({o, o, -1.0});
    t.push_back({o, o + 1, w});
    t.push_back({o + 1, o, -w});
    t.push_back({o + 1, o + 1, -1.0});
  };
  block(0, p);
  block(2, spec.omega2);
  block(4, spec.omega3);
  for (Index k = 0; k < spec.n4; ++k) t.push_back({6 + k, 6 + k, double(k + 1)});
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

inline ExpansionPoint penzl_point(Complex s, double p) {
  char label[96];
  std::snprintf(label, sizeof label, "s=%g%+gi,p=%g", s.real(), s.imag(), p);
  return ExpansionPoint{{s, Complex(p)}, label};
}

/// One point per parameter value, all at frequency s.
inline std::vector<ExpansionPoint> penzl_points(const PenzlSpec& spec, Complex s) {
  std::vector<ExpansionPoint> pts;
  for (const double p : spec.parameters) pts.push_back(penzl_point(s, p));
  return pts;
}

inline PenzlModel gen_penzl(const PenzlSpec& spec) {
  if (spec.parameters.empty()) throw std::invalid_argument("gen_penzl: at least one parameter value");
  if (spec.n4 < 1) throw std::invalid_argument("gen_penzl: n4 must be positive");
  const Index n = penzl_dimension(spec);
  // A0 = −𝔸(0); the p-dependent part of −𝔸(p) is −p·S with S = [[0, 1], [−1, 0]].
  const auto a0 = penzl_state_matrix(spec, 0.0).scaled(-1.0);
  const auto s_term =
      SparseMatrix::from_triplets(n, n, {{0, 1, Complex(-1.0)}, {1, 0, Complex(1.0)}});
  DenseBlock b = DenseBlock::Ones(n, 1);
  b.topRows(6).setConstant(10.0);
  DenseBlock c = b;
  PenzlModel m{SecondOrderModel({a0, SparseMatrix::identity(n), s_term}, std::move(b), std::move(c),
                                {"A0", "I", "S"}),
               spec.parameters, n};
  return m;
}

/// A(s, p_j) − A(s, p_1) = blkdiag(A1(p_1) − A1(p_j), 0, …, 0).
inline SparseMatrix penzl_parameter_difference(const PenzlSpec& spec, double p1, double pj) {
  const Index n = penzl_dimension(spec);
  const double delta = p1 - pj;
  return SparseMatrix::from_triplets(n, n, {{0, 1, Complex(delta)}, {1, 0, Complex(-delta)}});
}

}  // namespace pmor
