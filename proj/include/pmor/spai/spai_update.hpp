#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pmor/affine/affine_family.hpp"
#include "pmor/spai/spai.hpp"

namespace pmor {

enum class UpdateApproach {
  first,   // Q_l minimizes ||A(1) - A(l) Q||_F, P_l = Q_l P_1
  second,  // Q_i minimizes ||A(i-1) - A(i) Q||_F, P_i = Q_i P_{i-1}
};

struct UpdateConfig {
  UpdateApproach approach = UpdateApproach::first;
  /// Candidate pattern of Q: pattern of the new system matrix plus diagonal,
  /// with the same one-pass augmentation rule as SPAI.
  double ep = 1e-4;
  int pattern_level = 1;
  Index max_fill_per_column = 80;
  int threads = 1;
};

struct UpdateStats {
  /// ||a_ref^(i) - A_new q^(i)||_2 / ||a_ref^(i)||_2 per column.
  std::vector<double> column_residuals;
  Index augmented_columns = 0;
  Index rank_deficient_columns = 0;
  Index nnz = 0;
  double build_seconds = 0.0;

  double max_residual() const {
    double m = 0.0;
    for (const auto r : column_residuals) m = std::max(m, r);
    return m;
  }
};

namespace detail {

inline std::pair<SparseMatrix, UpdateStats> fit_update_factor(const SparseMatrix& reference,
                                                              const SparseMatrix& next,
                                                              const UpdateConfig& cfg) {
  if (!reference.is_square() || !next.is_square() || reference.rows() != next.rows())
    throw DimensionError("spai update: matrices do not conform");
  if (!(cfg.ep > 0.0)) throw std::invalid_argument("spai update: ep must be positive");
  Stopwatch clock;
  ColumnLeastSquares ls(next);
  const SparseMatrix ref_cols = reference.transpose();
  const auto rp = ref_cols.row_ptr();
  const auto ci = ref_cols.col_idx();
  const auto va = ref_cols.values();
  auto target = [&](Index i) {
    SparseColumn c;
    c.indices.assign(ci.begin() + rp[i], ci.begin() + rp[i + 1]);
    c.values.assign(va.begin() + rp[i], va.begin() + rp[i + 1]);
    return c;
  };
  const auto cols =
      fit_all_columns(ls, cfg.ep, cfg.pattern_level, cfg.max_fill_per_column, cfg.threads, target);
  auto q = assemble_columns(next.rows(), cols);
  UpdateStats stats;
  collect_stats(cols, stats);
  stats.nnz = q.nnz();
  stats.build_seconds = clock.seconds();
  return {std::move(q), std::move(stats)};
}

/// Same fit over a caller-supplied pattern for Q (no augmentation).
inline std::pair<SparseMatrix, UpdateStats> fit_update_factor(const SparseMatrix& reference,
                                                              const SparseMatrix& next,
                                                              const SparsityPattern& pattern, int threads) {
  if (!reference.is_square() || !next.is_square() || reference.rows() != next.rows())
    throw DimensionError("spai update: matrices do not conform");
  if (pattern.cols() != next.cols() || pattern.nrows != next.rows())
    throw DimensionError("spai update: pattern does not conform to matrix");
  Stopwatch clock;
  ColumnLeastSquares ls(next);
  const SparseMatrix ref_cols = reference.transpose();
  const auto rp = ref_cols.row_ptr();
  const auto ci = ref_cols.col_idx();
  const auto va = ref_cols.values();
  const Index n = next.cols();
  std::vector<ColumnOutcome> cols(static_cast<std::size_t>(n));
  parallel_chunks(n, threads, [&](Index b, Index e, int) {
    auto ws = ls.make_workspace();
    for (Index i = b; i < e; ++i) {
      SparseColumn t;
      t.indices.assign(ci.begin() + rp[i], ci.begin() + rp[i + 1]);
      t.values.assign(va.begin() + rp[i], va.begin() + rp[i + 1]);
      const double denom = t.norm() > 0.0 ? t.norm() : 1.0;
      auto fit = ls.fit(pattern.columns[static_cast<std::size_t>(i)], t, ws);
      auto& o = cols[static_cast<std::size_t>(i)];
      o.support = std::move(fit.support);
      o.values = std::move(fit.values);
      o.residual = fit.residual / denom;
      o.rank_deficient = fit.rank_deficient;
    }
  });
  auto q = assemble_columns(n, cols);
  UpdateStats stats;
  collect_stats(cols, stats);
  stats.nnz = q.nnz();
  stats.build_seconds = clock.seconds();
  return {std::move(q), std::move(stats)};
}

}  // namespace detail

/// P_l = Q_l P_1 with Q_l = argmin ||A1 - Al Q||_F, solved column by column.
inline std::pair<Preconditioner, UpdateStats> update_first(const SparseMatrix& a1,
                                                           const SparseMatrix& al,
                                                           const Preconditioner& p1,
                                                           const UpdateConfig& cfg = {}) {
  if (p1.dimension() != a1.rows()) throw DimensionError("update_first: P1 does not conform");
  auto [q, stats] = detail::fit_update_factor(a1, al, cfg);
  return {Preconditioner::factored(std::move(q), p1), std::move(stats)};
}

/// First approach with Q restricted to `pattern`.
inline std::pair<Preconditioner, UpdateStats> update_first(const SparseMatrix& a1, const SparseMatrix& al,
                                                           const Preconditioner& p1,
                                                           const SparsityPattern& pattern, int threads = 1) {
  if (p1.dimension() != a1.rows()) throw DimensionError("update_first: P1 does not conform");
  auto [q, stats] = detail::fit_update_factor(a1, al, pattern, threads);
  return {Preconditioner::factored(std::move(q), p1), std::move(stats)};
}

/// P_next = Q P_prev with Q = argmin ||A_prev - A_next Q||_F. The factor
/// chain deepens by one per call.
inline std::pair<Preconditioner, UpdateStats> update_second(const SparseMatrix& a_prev,
                                                            const SparseMatrix& a_next,
                                                            const Preconditioner& p_prev,
                                                            const UpdateConfig& cfg = {}) {
  if (p_prev.dimension() != a_prev.rows()) throw DimensionError("update_second: P_prev does not conform");
  auto [q, stats] = detail::fit_update_factor(a_prev, a_next, cfg);
  return {Preconditioner::factored(std::move(q), p_prev), std::move(stats)};
}

enum class PreconditionPolicy {
  none,
  spai,    // fresh SPAI at every point
  update,  // SPAI at the first point, cheap updates after (approach per UpdateConfig)
};

struct PreconditionerChoice {
  PreconditionPolicy policy = PreconditionPolicy::update;
  UpdateApproach approach = UpdateApproach::first;
};

inline std::string to_string(PreconditionerChoice c) {
  switch (c.policy) {
    case PreconditionPolicy::none: return "none";
    case PreconditionPolicy::spai: return "spai";
    case PreconditionPolicy::update:
      return c.approach == UpdateApproach::first ? "spai-update-first" : "spai-update-second";
  }
  return "unknown";
}

inline PreconditionerChoice parse_preconditioner_choice(const std::string& s) {
  if (s == "none") return {PreconditionPolicy::none, UpdateApproach::first};
  if (s == "spai") return {PreconditionPolicy::spai, UpdateApproach::first};
  if (s == "spai-update-first") return {PreconditionPolicy::update, UpdateApproach::first};
  if (s == "spai-update-second") return {PreconditionPolicy::update, UpdateApproach::second};
  throw std::invalid_argument("unknown preconditioner '" + s + "'");
}

struct SequenceConfig {
  PreconditionPolicy policy = PreconditionPolicy::update;
  SpaiConfig spai;
  UpdateConfig update;
  /// First approach only: build updates for points 2.. concurrently.
  bool parallel_points = false;
};

struct StepBuild {
  std::string kind;  // "spai", "update-first", "update-second"
  double build_seconds = 0.0;
  double max_column_residual = 0.0;
  Index augmented_columns = 0;
  Index nnz = 0;
  int chain_depth = 1;
};

/// Builds one preconditioner per system of a sequence. The first system
/// always gets a fresh SPAI; later systems follow the policy.
class SequencePreconditioner {
 public:
  explicit SequencePreconditioner(SequenceConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.policy == PreconditionPolicy::none)
      throw std::invalid_argument("SequencePreconditioner: policy 'none' builds nothing");
  }

  /// Preconditioner for the next system in the sequence.
  const Preconditioner& next(const SparseMatrix& a) {
    StepBuild step;
    const bool fresh = preconds_.empty() || cfg_.policy == PreconditionPolicy::spai;
    if (fresh) {
      auto [p, stats] = spai_build(a, cfg_.spai);
      step.kind = "spai";
      step.build_seconds = stats.build_seconds;
      step.max_column_residual = stats.max_residual();
      step.augmented_columns = stats.augmented_columns;
      step.nnz = stats.nnz;
      preconds_.push_back(std::move(p));
    } else {
      const bool first = cfg_.update.approach == UpdateApproach::first;
      const auto& ref = first ? first_matrix_ : previous_matrix_;
      const auto& base = first ? preconds_.front() : preconds_.back();
      auto [p, stats] = first ? update_first(ref, a, base, cfg_.update)
                              : update_second(ref, a, base, cfg_.update);
      step.kind = first ? "update-first" : "update-second";
      step.build_seconds = stats.build_seconds;
      step.max_column_residual = stats.max_residual();
      step.augmented_columns = stats.augmented_columns;
      step.nnz = stats.nnz;
      preconds_.push_back(std::move(p));
    }
    step.chain_depth = preconds_.back().depth();
    if (preconds_.size() == 1) first_matrix_ = a;
    previous_matrix_ = a;
    steps_.push_back(step);
    return preconds_.back();
  }

  const std::vector<Preconditioner>& preconditioners() const noexcept { return preconds_; }
  const std::vector<StepBuild>& steps() const noexcept { return steps_; }

 private:
  SequenceConfig cfg_;
  SparseMatrix first_matrix_;
  SparseMatrix previous_matrix_;
  std::vector<Preconditioner> preconds_;
  std::vector<StepBuild> steps_;
};

struct SequenceResult {
  std::vector<Preconditioner> preconditioners;
  std::vector<StepBuild> steps;
};

/// One preconditioner per expansion point of the family.
inline SequenceResult sequence_precondition(const AffineFamily& f, const std::vector<ExpansionPoint>& points,
                                            const SequenceConfig& cfg = {}) {
  if (points.empty()) throw std::invalid_argument("sequence_precondition: no points");
  const bool concurrent = cfg.parallel_points && cfg.policy == PreconditionPolicy::update &&
                          cfg.update.approach == UpdateApproach::first &&
                          points.size() > 2;
  if (!concurrent) {
    SequencePreconditioner seq(cfg);
    for (const auto& p : points) seq.next(f.evaluate(p));
    return {seq.preconditioners(), seq.steps()};
  }

  SequencePreconditioner head(cfg);
  const auto a1 = f.evaluate(points.front());
  head.next(a1);
  const auto p1 = head.preconditioners().front();
  const Index rest = static_cast<Index>(points.size()) - 1;
  std::vector<std::optional<Preconditioner>> built(static_cast<std::size_t>(rest));
  std::vector<StepBuild> steps(static_cast<std::size_t>(rest));
  auto ucfg = cfg.update;
  ucfg.threads = 1;
  detail::parallel_chunks(rest, std::max(1, cfg.update.threads), [&](Index b, Index e, int) {
    for (Index k = b; k < e; ++k) {
      const auto al = f.evaluate(points[static_cast<std::size_t>(k + 1)]);
      auto [p, stats] = update_first(a1, al, p1, ucfg);
      auto& s = steps[static_cast<std::size_t>(k)];
      s.kind = "update-first";
      s.build_seconds = stats.build_seconds;
      s.max_column_residual = stats.max_residual();
      s.augmented_columns = stats.augmented_columns;
      s.nnz = stats.nnz;
      s.chain_depth = p.depth();
      built[static_cast<std::size_t>(k)].emplace(std::move(p));
    }
  });
  SequenceResult r{head.preconditioners(), head.steps()};
  for (Index k = 0; k < rest; ++k) {
    r.preconditioners.push_back(std::move(*built[static_cast<std::size_t>(k)]));
    r.steps.push_back(steps[static_cast<std::size_t>(k)]);
  }
  return r;
}

}  // namespace pmor
