#pragma once

#include <array>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "pmor/sparse/sparse_matrix.hpp"

namespace pmor {

/// Coefficients (s̃_1, ..., s̃_{w+1}) multiplying the non-constant terms of an
/// affine family. The constant term carries an implicit coefficient of 1.
struct ExpansionPoint {
  std::vector<Complex> values;
  std::string label;

  Index size() const noexcept { return static_cast<Index>(values.size()); }

  friend bool operator==(const ExpansionPoint&, const ExpansionPoint&) = default;
};

inline ExpansionPoint operator+(const ExpansionPoint& a, const ExpansionPoint& b) {
  if (a.size() != b.size()) throw DimensionError("ExpansionPoint: length mismatch");
  ExpansionPoint r{a.values, a.label + "+" + b.label};
  for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] += b.values[i];
  return r;
}

/// A(s̃) = A_0 + sum_j s̃_j A_j over a fixed list of sparse terms.
///
/// The union pattern of all terms is computed once at construction so that
/// repeated evaluations only scatter values.
class AffineFamily {
 public:
  AffineFamily() = default;

  AffineFamily(std::vector<SparseMatrix> terms, DenseBlock rhs = {}, DenseBlock output = {},
               std::vector<std::string> term_labels = {})
      : terms_(std::move(terms)),
        rhs_(std::move(rhs)),
        output_(std::move(output)),
        labels_(std::move(term_labels)) {
    if (terms_.size() < 2) throw DimensionError("AffineFamily: needs at least two terms");
    const Index n = terms_.front().rows();
    for (const auto& t : terms_) {
      if (t.rows() != n || t.cols() != n)
        throw DimensionError("AffineFamily: all terms must share one square dimension");
    }
    if (rhs_.size() != 0 && rhs_.rows() != n)
      throw DimensionError("AffineFamily: right-hand side rows do not match dimension");
    if (output_.size() != 0 && output_.rows() != n)
      throw DimensionError("AffineFamily: output map rows do not match dimension");
    if (labels_.empty()) {
      for (std::size_t j = 0; j < terms_.size(); ++j) labels_.push_back("A" + std::to_string(j));
    } else if (labels_.size() != terms_.size()) {
      throw DimensionError("AffineFamily: one label per term required");
    }
    build_union();
  }

  Index dimension() const noexcept { return terms_.empty() ? 0 : terms_.front().rows(); }
  Index term_count() const noexcept { return static_cast<Index>(terms_.size()); }
  /// Number of coefficients an expansion point must provide.
  Index parameter_count() const noexcept { return term_count() - 1; }

  const std::vector<SparseMatrix>& terms() const noexcept { return terms_; }
  const SparseMatrix& term(Index j) const { return terms_.at(static_cast<std::size_t>(j)); }
  const std::vector<std::string>& term_labels() const noexcept { return labels_; }
  const DenseBlock& rhs() const noexcept { return rhs_; }
  const DenseBlock& output() const noexcept { return output_; }

  /// Entries with modulus below this are treated as exact cancellation.
  static constexpr double prune_threshold = 1e-300;

  SparseMatrix evaluate(const ExpansionPoint& p) const {
    if (p.size() != parameter_count())
      throw DimensionError("AffineFamily::evaluate: point has " + std::to_string(p.size()) +
                           " components, family expects " + std::to_string(parameter_count()));
    std::vector<Complex> acc(union_->col_idx.size(), Complex(0.0));
    for (std::size_t t = 0; t < terms_.size(); ++t) {
      const Complex coef = t == 0 ? Complex(1.0) : p.values[t - 1];
      if (coef == Complex(0.0)) continue;
      const auto vals = terms_[t].values();
      const auto& pos = union_->positions[t];
      for (std::size_t k = 0; k < pos.size(); ++k) acc[pos[k]] += coef * vals[k];
    }
    const Index n = dimension();
    std::vector<Index> rp(static_cast<std::size_t>(n) + 1, 0);
    std::vector<Index> ci;
    std::vector<Complex> va;
    ci.reserve(acc.size());
    va.reserve(acc.size());
    for (Index r = 0; r < n; ++r) {
      for (Index k = union_->row_ptr[r]; k < union_->row_ptr[r + 1]; ++k) {
        if (std::abs(acc[k]) >= prune_threshold) {
          ci.push_back(union_->col_idx[k]);
          va.push_back(acc[k]);
        }
      }
      rp[r + 1] = static_cast<Index>(ci.size());
    }
    return SparseMatrix::from_csr(n, n, std::move(rp), std::move(ci), std::move(va));
  }

  /// Union of all term patterns, as a zero-valued structure with unit entries.
  SparseMatrix union_pattern() const {
    std::vector<Complex> ones(union_->col_idx.size(), Complex(1.0));
    return SparseMatrix::from_csr(dimension(), dimension(), union_->row_ptr, union_->col_idx,
                                  std::move(ones));
  }

 private:
  struct UnionPattern {
    std::vector<Index> row_ptr;
    std::vector<Index> col_idx;
    std::vector<std::vector<std::size_t>> positions;  // per term, stored entry -> union slot
  };

  void build_union() {
    const Index n = dimension();
    auto u = std::make_shared<UnionPattern>();
    u->row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
    std::vector<Index> row;
    for (Index r = 0; r < n; ++r) {
      row.clear();
      for (const auto& t : terms_) {
        const auto rp = t.row_ptr();
        const auto ci = t.col_idx();
        row.insert(row.end(), ci.begin() + rp[r], ci.begin() + rp[r + 1]);
      }
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
      u->col_idx.insert(u->col_idx.end(), row.begin(), row.end());
      u->row_ptr[r + 1] = static_cast<Index>(u->col_idx.size());
    }
    u->positions.resize(terms_.size());
    for (std::size_t t = 0; t < terms_.size(); ++t) {
      const auto rp = terms_[t].row_ptr();
      const auto ci = terms_[t].col_idx();
      auto& pos = u->positions[t];
      pos.reserve(ci.size());
      for (Index r = 0; r < n; ++r) {
        const auto b = u->col_idx.begin() + u->row_ptr[r];
        const auto e = u->col_idx.begin() + u->row_ptr[r + 1];
        for (Index k = rp[r]; k < rp[r + 1]; ++k) {
          const auto it = std::lower_bound(b, e, ci[k]);
          pos.push_back(static_cast<std::size_t>(it - u->col_idx.begin()));
        }
      }
    }
    union_ = std::move(u);
  }

  std::vector<SparseMatrix> terms_;
  DenseBlock rhs_;
  DenseBlock output_;
  std::vector<std::string> labels_;
  std::shared_ptr<const UnionPattern> union_;
};

inline SparseMatrix evaluate(const AffineFamily& f, const ExpansionPoint& p) {
  return f.evaluate(p);
}

/// Raw gyroscope parameters: frequency s, damping scale theta, Rayleigh
/// coefficients alpha and beta, and geometry parameter d.
struct RawGyroParams {
  Complex s{0.0, 0.0};
  double theta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double d = 1.0;
};

/// Maps raw gyroscope parameters to the eleven affine coefficients
/// (s², s²d, sθ, sθd, sα, sαd, sβ, sβ/d, sβd, 1/d, d).
inline ExpansionPoint gyro_point(const RawGyroParams& raw, std::string label = {}) {
  if (raw.d == 0.0) throw std::invalid_argument("gyro_point: d must be nonzero");
  const Complex s = raw.s;
  const Complex s2 = s * s;
  const double d = raw.d;
  return ExpansionPoint{{s2, s2 * d, s * raw.theta, s * raw.theta * d, s * raw.alpha,
                         s * raw.alpha * d, s * raw.beta, s * raw.beta / d, s * raw.beta * d,
                         Complex(1.0 / d), Complex(d)},
                        std::move(label)};
}

/// Indices of the coefficients that remain when alpha = beta = 0.
inline constexpr std::array<std::size_t, 6> gyro_active_components{0, 1, 2, 3, 9, 10};

/// Six-component point (s̃1, s̃2, s̃3, s̃4, s̃10, s̃11) for the seven-term
/// gyroscope family. Requires alpha = beta = 0.
inline ExpansionPoint gyro_active_point(const RawGyroParams& raw, std::string label = {}) {
  if (raw.alpha != 0.0 || raw.beta != 0.0)
    throw std::invalid_argument("gyro_active_point: alpha and beta must be zero");
  const auto full = gyro_point(raw);
  ExpansionPoint p{{}, std::move(label)};
  for (const auto i : gyro_active_components) p.values.push_back(full.values[i]);
  return p;
}

struct DifferenceRow {
  std::string label;
  double identity_gap = 0.0;   // ||I - A(l)||_F
  double reference_gap = 0.0;  // ||A(1) - A(l)||_F
};

inline std::vector<DifferenceRow> pairwise_difference_norms(const AffineFamily& f,
                                                            const std::vector<ExpansionPoint>& points) {
  if (points.empty()) throw std::invalid_argument("pairwise_difference_norms: no points");
  const auto identity = SparseMatrix::identity(f.dimension());
  const auto first = f.evaluate(points.front());
  std::vector<DifferenceRow> rows;
  for (std::size_t l = 0; l < points.size(); ++l) {
    const auto a = l == 0 ? first : f.evaluate(points[l]);
    DifferenceRow row;
    row.label = points[l].label.empty() ? "point" + std::to_string(l + 1) : points[l].label;
    row.identity_gap = frobenius_norm(subtract(identity, a));
    row.reference_gap = l == 0 ? 0.0 : frobenius_norm(subtract(first, a));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace pmor
