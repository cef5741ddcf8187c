#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pmor/affine/affine_family.hpp"
#include "pmor/rpmor/model.hpp"

namespace pmor {

/// Desk-scale stand-in for a micro-gyroscope FEM model. The seven terms
/// K1, M1, M2, D1, D2, K2, K3 live on a weighted grid graph with a few
/// random long-range couplings. The scale knobs set how strongly each term
/// moves the system matrix between expansion points.
struct GyroAnalogSpec {
  Index n = 2000;
  std::uint64_t seed = 1;
  /// Expected number of extra long-range couplings per node.
  double coupling_density = 0.1;
  /// Diagonal shift of K1 relative to its mean degree.
  double shift = 0.01;
  double mass_scale = 1e-5;      // M1
  double mass2_scale = 5e-6;     // M2
  double damping_scale = 1.0;    // D1
  double damping2_scale = 0.5;   // D2
  double stiffness2_scale = 1e-5;  // K2, weighted by 1/d
  double stiffness3_scale = 1e-5;  // K3, weighted by d
  /// Raw parameters of the suggested expansion points; empty selects the
  /// four reference points.
  std::vector<RawGyroParams> points;
};

inline const std::vector<std::string>& gyro_term_labels() {
  static const std::vector<std::string> labels{"K1", "M1", "M2", "D1", "D2", "K2", "K3"};
  return labels;
}

/// The four reference expansion points as raw parameters: s = i·2π·√f with
/// f = 0.065, 0.065, 0.0225, 0.0225; sθ = i·π·(5, 5, 3, 3)·1e-7; d = 1, 2, 2, 1.5.
inline std::vector<RawGyroParams> reference_gyro_params() {
  constexpr double pi = std::numbers::pi;
  const double f[4] = {0.065, 0.065, 0.0225, 0.0225};
  const double st[4] = {5.0, 5.0, 3.0, 3.0};
  const double d[4] = {1.0, 2.0, 2.0, 1.5};
  std::vector<RawGyroParams> out;
  for (int k = 0; k < 4; ++k) {
    RawGyroParams r;
    r.s = Complex(0.0, 2.0 * pi * std::sqrt(f[k]));
    // sθ = i·π·st·1e-7 with s = i·|s| gives a real θ.
    r.theta = pi * st[k] * 1e-7 / std::abs(r.s);
    r.d = d[k];
    out.push_back(r);
  }
  return out;
}

struct GyroAnalog {
  SecondOrderModel model;
  std::vector<ExpansionPoint> points;
  std::vector<RawGyroParams> raw_points;
  std::uint64_t seed_used = 0;
  int attempts = 1;
};

namespace detail {

struct GraphEdge {
  Index a, b;
  double w;
};

inline std::vector<GraphEdge> gyro_graph(Index n, double coupling_density, std::mt19937_64& rng) {
  const Index width = std::max<Index>(2, static_cast<Index>(std::lround(std::sqrt(double(n)))));
  std::uniform_real_distribution<double> weight(0.5, 1.5);
  std::vector<GraphEdge> e;
  for (Index i = 0; i < n; ++i) {
    if ((i + 1) % width != 0 && i + 1 < n) e.push_back({i, i + 1, weight(rng)});
    if (i + width < n) e.push_back({i, i + width, weight(rng)});
  }
  std::uniform_int_distribution<Index> node(0, n - 1);
  const auto extra = static_cast<Index>(coupling_density * double(n));
  for (Index k = 0; k < extra; ++k) {
    const Index a = node(rng), b = node(rng);
    if (a != b) e.push_back({a, b, 0.2 * weight(rng)});
  }
  return e;
}

/// Σ w (e_a − e_b)(e_a − e_b)ᵀ over the edges, scaled.
inline SparseMatrix weighted_laplacian(Index n, const std::vector<GraphEdge>& edges, double scale,
                                       double diag_shift = 0.0) {
  std::vector<Triplet> t;
  t.reserve(4 * edges.size() + static_cast<std::size_t>(n));
  for (const auto& e : edges) {
    t.push_back({e.a, e.a, scale * e.w});
    t.push_back({e.b, e.b, scale * e.w});
    t.push_back({e.a, e.b, -scale * e.w});
    t.push_back({e.b, e.a, -scale * e.w});
  }
  if (diag_shift != 0.0)
    for (Index i = 0; i < n; ++i) t.push_back({i, i, diag_shift});
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

/// Consistent-mass-like matrix: diagonal 4·ρ_i plus ρ-weighted couplings.
inline SparseMatrix mass_like(Index n, const std::vector<GraphEdge>& edges, double scale,
                              std::mt19937_64& rng) {
  std::uniform_real_distribution<double> rho(0.8, 1.2);
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) t.push_back({i, i, 4.0 * scale * rho(rng)});
  for (const auto& e : edges) {
    const double v = 0.5 * scale * e.w;
    t.push_back({e.a, e.b, v});
    t.push_back({e.b, e.a, v});
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

/// Skew-symmetric gyroscopic coupling plus a weak symmetric damping diagonal.
inline SparseMatrix gyroscopic(Index n, const std::vector<GraphEdge>& edges, double scale,
                               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Triplet> t;
  for (const auto& e : edges) {
    const double g = scale * u(rng);
    t.push_back({e.a, e.b, g});
    t.push_back({e.b, e.a, -g});
  }
  for (Index i = 0; i < n; ++i) t.push_back({i, i, 0.05 * scale * (1.0 + 0.5 * u(rng))});
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

inline bool nonsingular_at(const SecondOrderModel& m, const ExpansionPoint& p) {
  try {
    const auto a = m.evaluate(p);
    const DenseBlock probe = DenseBlock::Ones(a.rows(), 1);
    (void)sparse_direct_solve(a, probe);
    return true;
  } catch (const NumericalError&) {
    return false;
  }
}

}  // namespace detail

/// Builds the seven-term family A = K1 + s²M1 + s²d M2 + sθ D1 + sθd D2 +
/// (1/d) K2 + d K3 with a SISO input/output pair, and the suggested points
/// mapped through gyro_active_point. A seed whose family is singular at a
/// suggested point is replaced by the next one, up to five attempts.
inline GyroAnalog gen_gyro_analog(const GyroAnalogSpec& spec, int max_attempts = 5) {
  if (spec.n < 10) throw std::invalid_argument("gen_gyro_analog: n must be at least 10");
  if (!(spec.coupling_density >= 0.0)) throw std::invalid_argument("gen_gyro_analog: negative density");
  const auto raw = spec.points.empty() ? reference_gyro_params() : spec.points;
  std::vector<ExpansionPoint> pts;
  for (std::size_t k = 0; k < raw.size(); ++k)
    pts.push_back(gyro_active_point(raw[k], "point" + std::to_string(k + 1)));

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(attempt);
    std::mt19937_64 rng(seed);
    const Index n = spec.n;
    const auto edges = detail::gyro_graph(n, spec.coupling_density, rng);
    double mean_degree = 0.0;
    for (const auto& e : edges) mean_degree += 2.0 * e.w;
    mean_degree /= double(n);

    // K2 and K3 act on two halves of the graph, as geometry-dependent stiffness.
    std::vector<detail::GraphEdge> left, right;
    for (const auto& e : edges) (std::min(e.a, e.b) < n / 2 ? left : right).push_back(e);

    std::vector<SparseMatrix> terms;
    terms.push_back(detail::weighted_laplacian(n, edges, 1.0, spec.shift * mean_degree));
    terms.push_back(detail::mass_like(n, edges, spec.mass_scale, rng));
    terms.push_back(detail::mass_like(n, right, spec.mass2_scale, rng));
    terms.push_back(detail::gyroscopic(n, edges, spec.damping_scale, rng));
    terms.push_back(detail::gyroscopic(n, left, spec.damping2_scale, rng));
    terms.push_back(detail::weighted_laplacian(n, left, spec.stiffness2_scale));
    terms.push_back(detail::weighted_laplacian(n, right, spec.stiffness3_scale));

    // Force applied along the first grid row, displacement read at the last.
    const Index width = std::max<Index>(2, static_cast<Index>(std::lround(std::sqrt(double(n)))));
    DenseBlock b = DenseBlock::Zero(n, 1), c = DenseBlock::Zero(n, 1);
    for (Index i = 0; i < std::min(width, n); ++i) b(i, 0) = 1.0;
    for (Index i = std::max<Index>(0, n - width); i < n; ++i) c(i, 0) = 1.0;

    SecondOrderModel model(std::move(terms), std::move(b), std::move(c), gyro_term_labels());
    bool ok = true;
    for (const auto& p : pts) ok = ok && detail::nonsingular_at(model, p);
    if (ok) return GyroAnalog{std::move(model), pts, raw, seed, attempt + 1};
  }
  throw NumericalError("gen_gyro_analog: family singular at a suggested point after " +
                       std::to_string(max_attempts) + " attempts");
}

}  // namespace pmor
