#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pmor/krylov/gcro.hpp"
#include "pmor/rpmor/model.hpp"
#include "pmor/spai/spai_update.hpp"

namespace pmor {

enum class SolverKind { gcro, block_gcro };

inline std::string to_string(SolverKind k) { return k == SolverKind::gcro ? "gcro" : "block-gcro"; }

inline SolverKind parse_solver_kind(const std::string& s) {
  if (s == "gcro") return SolverKind::gcro;
  if (s == "block-gcro") return SolverKind::block_gcro;
  throw std::invalid_argument("unknown solver '" + s + "'");
}

/// How each linear-system block is solved. With `gcro` every column is a
/// separate call; with `block_gcro` the whole block is one call.
struct MomentSolver {
  SolverKind kind = SolverKind::block_gcro;
  SolverConfig config;
};

/// Raised when a moment solve fails and the pipeline is not told to go on.
class SolveFailure : public NumericalError {
 public:
  SolveFailure(const std::string& what, SolveReport report)
      : NumericalError(what), report_(std::move(report)) {}
  const SolveReport& report() const noexcept { return report_; }

 private:
  SolveReport report_;
};

struct MomentSolve {
  DenseBlock x;
  SolveReport report;
  Index calls = 0;
};

/// Solves A X = B with the configured solver. Per-column reports from
/// single-vector calls are merged into one.
inline MomentSolve solve_block(const SparseMatrix& a, const DenseBlock& b, const Preconditioner* p,
                               const MomentSolver& solver) {
  MomentSolve out;
  if (solver.kind == SolverKind::block_gcro) {
    auto r = block_gcro_solve(a, b, p, solver.config);
    out.x = std::move(r.x);
    out.report = std::move(r.report);
    out.calls = 1;
    return out;
  }
  out.x.resize(b.rows(), b.cols());
  SolveReport& rep = out.report;
  rep.converged = true;
  rep.status = SolveStatus::converged;
  for (Index j = 0; j < b.cols(); ++j) {
    auto r = gcro_solve(a, b.col(j), p, solver.config);
    out.x.col(j) = r.x;
    rep.iterations += r.report.iterations;
    rep.matvec_count += r.report.matvec_count;
    rep.precond_apply_count += r.report.precond_apply_count;
    rep.cycles += r.report.cycles;
    rep.wall_time += r.report.wall_time;
    rep.residual_history.push_back(std::move(r.report.residual_history.front()));
    rep.final_residuals.push_back(r.report.final_residuals.front());
    if (!r.report.converged && rep.converged) {
      rep.converged = false;
      rep.status = r.report.status;
    }
    ++out.calls;
  }
  return out;
}

namespace detail {

inline void require_converged(const MomentSolve& s, const std::string& where) {
  if (!s.report.converged)
    throw SolveFailure(where + ": solver stopped with status " + to_string(s.report.status),
                       s.report);
}

inline DenseBlock stacked_rhs(const SecondOrderModel& f, const Vector& x, const std::vector<Index>& dirs) {
  DenseBlock rhs(f.dimension(), static_cast<Index>(dirs.size()));
  for (std::size_t k = 0; k < dirs.size(); ++k)
    rhs.col(static_cast<Index>(k)) = spmv(f.term(dirs[k]), x);
  return rhs;
}

inline std::vector<Index> all_directions(const SecondOrderModel& f) {
  std::vector<Index> d;
  for (Index j = 1; j < f.term_count(); ++j) d.push_back(j);
  return d;
}

}  // namespace detail

/// x⁽⁰⁾ solving A(pt) x = B.
inline MomentSolve zeroth_moment(const SecondOrderModel& f, const ExpansionPoint& pt,
                                 const MomentSolver& solver, const Preconditioner* p) {
  if (f.rhs().size() == 0) throw std::invalid_argument("zeroth_moment: model has no B");
  auto s = solve_block(f.evaluate(pt), f.rhs(), p, solver);
  detail::require_converged(s, "zeroth moment at point '" + pt.label + "'");
  return s;
}

/// Columns x⁽ʲ⁾ solving A(pt) x⁽ʲ⁾ = A_j x⁽⁰⁾ for every parameter direction
/// j = 1..w+1, as one stacked solve.
inline MomentSolve first_moments(const SecondOrderModel& f, const ExpansionPoint& pt, const Vector& x0,
                                 const MomentSolver& solver, const Preconditioner* p) {
  if (x0.size() != f.dimension()) throw DimensionError("first_moments: x0 length mismatch");
  const auto rhs = detail::stacked_rhs(f, x0, detail::all_directions(f));
  auto s = solve_block(f.evaluate(pt), rhs, p, solver);
  detail::require_converged(s, "first moments at point '" + pt.label + "'");
  return s;
}

struct PipelineConfig {
  /// Highest moment level h. Level k >= 1 issues one stacked solve per
  /// column of level k-1.
  Index levels = 1;
  MomentSolver solver;
  PreconditionerChoice precond;
  SpaiConfig spai;
  UpdateConfig update;
  /// Build the updates for points 2.. concurrently (first approach only).
  bool parallel_points = false;
  /// Parameter directions used for the stacked right-hand sides; empty means
  /// every non-constant term.
  std::vector<Index> directions;
  double drop_tol = 1e-10;
  /// Record failed solves and keep going instead of throwing.
  bool continue_on_failure = false;
  /// Also compute ||I - A P||_F per point (materializes factored forms).
  bool compute_quality = false;
};

struct SolveRecord {
  std::size_t point = 0;
  Index level = 0;
  Index columns = 0;
  Index calls = 0;
  SolveReport report;
};

struct PointRecord {
  std::string label;
  std::optional<StepBuild> preconditioner;
  std::optional<double> quality;
  std::vector<SolveRecord> solves;
  Index moment_columns = 0;
  Index basis_columns_added = 0;
};

struct RunReport {
  std::vector<PointRecord> points;
  Index total_iterations = 0;
  Index total_calls = 0;
  Index total_systems = 0;
  Index total_matvecs = 0;
  Index failures = 0;
  double solve_seconds = 0.0;
  double precondition_seconds = 0.0;
};

struct ReductionResult {
  ReducedModel reduced;
  RunReport report;
  std::vector<Preconditioner> preconditioners;  // one per point; empty with policy none
};

/// Moment columns of every point, orthonormalized into one basis.
struct MomentRun {
  DenseBlock basis;
  RunReport report;
  std::vector<Preconditioner> preconditioners;  // one per point; empty with policy none
};

/// Per point: precondition, solve level 0 then the stacked higher levels,
/// and extend the basis by incremental Gram-Schmidt. The basis may be empty.
inline MomentRun rpmor_collect(const SecondOrderModel& model, const std::vector<ExpansionPoint>& points,
                               const PipelineConfig& cfg = {}) {
  if (points.empty()) throw std::invalid_argument("rpmor_collect: no expansion points");
  if (cfg.levels < 0) throw std::invalid_argument("rpmor_collect: levels must be nonnegative");
  if (model.rhs().size() == 0) throw std::invalid_argument("rpmor_collect: model has no B");
  const auto dirs = cfg.directions.empty() ? detail::all_directions(model) : cfg.directions;
  for (const auto j : dirs)
    if (j < 1 || j >= model.term_count()) throw DimensionError("rpmor_collect: direction out of range");

  MomentRun out;
  RunReport& rep = out.report;
  std::vector<SparseMatrix> systems;
  systems.reserve(points.size());
  for (const auto& pt : points) systems.push_back(model.evaluate(pt));

  if (cfg.precond.policy != PreconditionPolicy::none) {
    SequenceConfig sc;
    sc.policy = cfg.precond.policy;
    sc.spai = cfg.spai;
    sc.update = cfg.update;
    sc.update.approach = cfg.precond.approach;
    sc.parallel_points = cfg.parallel_points;
    detail::Stopwatch clock;
    auto seq = sequence_precondition(model, points, sc);
    rep.precondition_seconds = clock.seconds();
    out.preconditioners = std::move(seq.preconditioners);
    rep.points.resize(points.size());
    for (std::size_t l = 0; l < points.size(); ++l) rep.points[l].preconditioner = seq.steps[l];
  } else {
    rep.points.resize(points.size());
  }

  out.basis.resize(model.dimension(), 0);
  for (std::size_t l = 0; l < points.size(); ++l) {
    auto& pr = rep.points[l];
    pr.label = points[l].label.empty() ? "point" + std::to_string(l + 1) : points[l].label;
    const Preconditioner* p = out.preconditioners.empty() ? nullptr : &out.preconditioners[l];
    if (p && cfg.compute_quality) pr.quality = quality(systems[l], *p);

    auto run = [&](const DenseBlock& rhs, Index level) {
      auto s = solve_block(systems[l], rhs, p, cfg.solver);
      SolveRecord rec{l, level, rhs.cols(), s.calls, s.report};
      rep.total_iterations += s.report.iterations;
      rep.total_calls += s.calls;
      rep.total_systems += rhs.cols();
      rep.total_matvecs += s.report.matvec_count;
      rep.solve_seconds += s.report.wall_time;
      if (!s.report.converged) {
        ++rep.failures;
        if (!cfg.continue_on_failure) {
          pr.solves.push_back(rec);
          throw SolveFailure("level " + std::to_string(level) + " solve at point '" + pr.label +
                                 "' stopped with status " + to_string(s.report.status),
                             s.report);
        }
      }
      pr.solves.push_back(std::move(rec));
      return std::move(s.x);
    };

    DenseBlock level_cols = run(model.rhs(), 0);
    DenseBlock moments = level_cols;
    for (Index h = 1; h <= cfg.levels; ++h) {
      DenseBlock next(model.dimension(), level_cols.cols() * static_cast<Index>(dirs.size()));
      for (Index c = 0; c < level_cols.cols(); ++c) {
        const auto rhs = detail::stacked_rhs(model, level_cols.col(c), dirs);
        next.middleCols(c * rhs.cols(), rhs.cols()) = run(rhs, h);
      }
      level_cols = std::move(next);
      DenseBlock grown(model.dimension(), moments.cols() + level_cols.cols());
      grown << moments, level_cols;
      moments = std::move(grown);
    }
    pr.moment_columns = moments.cols();
    pr.basis_columns_added = orthonormal_extend(out.basis, moments, cfg.drop_tol);
  }
  return out;
}

/// Moment-matching reduction over a list of expansion points: collects the
/// moment basis V and projects every term.
inline ReductionResult rpmor_reduce(const SecondOrderModel& model, const std::vector<ExpansionPoint>& points,
                                    const PipelineConfig& cfg = {}) {
  auto run = rpmor_collect(model, points, cfg);
  if (run.basis.cols() == 0) throw NumericalError("rpmor_reduce: every moment column was dropped");
  return ReductionResult{galerkin_project(model, run.basis), std::move(run.report),
                         std::move(run.preconditioners)};
}

}  // namespace pmor
