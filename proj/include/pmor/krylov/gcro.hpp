#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/QR>

#include "pmor/detail/parallel.hpp"
#include "pmor/spai/preconditioner.hpp"
#include "pmor/sparse/sparse_matrix.hpp"

namespace pmor {

struct SolverConfig {
  /// Relative residual tolerance ||b - Ax|| / ||b|| per column.
  double tol = 1e-10;
  /// Budget of inner (block) Arnoldi steps.
  Index max_iters = 2000;
  /// Outer space size, in columns per right-hand side.
  Index outer_space_dim = 10;
  /// Inner GMRES cycle length.
  Index inner_restart = 50;
  /// Relative threshold below which a block direction is deflated.
  double deflation_tol = 1e-12;
};

enum class SolveStatus { converged, max_iterations, breakdown };

inline std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::breakdown: return "breakdown";
  }
  return "unknown";
}

struct SolveReport {
  Index iterations = 0;
  bool converged = false;
  SolveStatus status = SolveStatus::max_iterations;
  /// Per column: relative residual estimates after every inner step in
  /// which the column was active, followed by the true exit residual.
  std::vector<std::vector<double>> residual_history;
  /// True relative residual ||b_j - A x_j|| / ||b_j|| at exit.
  std::vector<double> final_residuals;
  Index matvec_count = 0;
  Index precond_apply_count = 0;
  Index cycles = 0;
  double wall_time = 0.0;
};

struct BlockSolveResult {
  DenseBlock x;
  SolveReport report;
};

struct SolveResult {
  Vector x;
  SolveReport report;
};

namespace detail {

/// Column-wise modified Gram-Schmidt (two passes) against the columns already
/// accepted from `w`. Directions whose remaining norm is at most `drop` are
/// discarded. On return `q` holds the kept orthonormal columns and `r`
/// (kept x w.cols()) the coefficients with w ≈ q r.
inline void deflating_qr(const DenseBlock& w, double drop, DenseBlock& q, DenseMatrix& r) {
  const Index n = w.rows();
  const Index s = w.cols();
  q.resize(n, s);
  DenseMatrix coef = DenseMatrix::Zero(s, s);
  Index kept = 0;
  for (Index j = 0; j < s; ++j) {
    Vector v = w.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index k = 0; k < kept; ++k) {
        const Complex h = q.col(k).dot(v);
        coef(k, j) += h;
        v -= h * q.col(k);
      }
    }
    const double nv = v.norm();
    if (nv > drop) {
      q.col(kept) = v / nv;
      coef(kept, j) = nv;
      ++kept;
    }
  }
  q.conservativeResize(n, kept);
  r = coef.topRows(kept);
}

/// Householder reflector acting on rows [start, start + v.size()).
struct Reflector {
  Index start = 0;
  Vector v;  // unit vector, empty for identity

  template <class Derived>
  void apply(Eigen::MatrixBase<Derived>& m) const {
    if (v.size() == 0) return;
    for (Index c = 0; c < m.cols(); ++c) {
      auto seg = m.col(c).segment(start, v.size());
      const Complex h = v.dot(seg);
      seg -= (2.0 * h) * v;
    }
  }
};

inline Reflector make_reflector(const Vector& x, Index start) {
  Reflector r;
  r.start = start;
  const double tail = x.size() > 1 ? x.tail(x.size() - 1).norm() : 0.0;
  if (tail == 0.0) return r;
  const double nx = x.norm();
  const Complex phase = std::abs(x[0]) == 0.0 ? Complex(1.0) : x[0] / std::abs(x[0]);
  Vector v = x;
  v[0] += phase * nx;
  r.v = v / v.norm();
  return r;
}

}  // namespace detail

/// Block GCRO with right preconditioning and zero initial guess.
///
/// The outer loop keeps an orthonormal space C = A P U across restarts; each
/// cycle runs block GMRES on (I - C C^H) A P from the current residual,
/// appends the resulting correction directions to (U, C), and truncates the
/// oldest ones beyond outer_space_dim. Columns are scaled by ||b_j|| so one
/// tolerance governs all of them; converged columns leave the active block,
/// and rank-deficient directions are deflated from the Krylov block.
inline BlockSolveResult block_gcro_solve(const SparseMatrix& a, const DenseBlock& b,
                                         const Preconditioner* p, const SolverConfig& cfg = {}) {
  if (!a.is_square()) throw DimensionError("block_gcro_solve: matrix must be square");
  if (b.rows() != a.rows()) throw DimensionError("block_gcro_solve: right-hand side rows mismatch");
  if (b.cols() < 1) throw DimensionError("block_gcro_solve: empty right-hand side block");
  if (p && p->dimension() != a.rows()) throw DimensionError("block_gcro_solve: preconditioner mismatch");
  if (!(cfg.tol > 0.0) || cfg.max_iters < 1 || cfg.inner_restart < 1)
    throw std::invalid_argument("block_gcro_solve: invalid solver configuration");

  detail::Stopwatch clock;
  const Index n = a.rows();
  const Index s = b.cols();
  SolveReport rep;
  rep.residual_history.assign(static_cast<std::size_t>(s), {});
  rep.final_residuals.assign(static_cast<std::size_t>(s), 0.0);

  auto op = [&](const DenseBlock& v) -> DenseBlock {
    rep.matvec_count += v.cols();
    if (!p) return spmm(a, v);
    rep.precond_apply_count += v.cols();
    return spmm(a, p->apply(v));
  };

  std::vector<double> bnorm(static_cast<std::size_t>(s));
  for (Index j = 0; j < s; ++j) bnorm[static_cast<std::size_t>(j)] = b.col(j).norm();

  DenseBlock y = DenseBlock::Zero(n, s);  // preconditioned-space iterate, x = P y
  DenseBlock r = b;
  DenseBlock u_space(n, 0), c_space(n, 0);
  const Index outer_cap = std::max<Index>(0, cfg.outer_space_dim) * s;
  const double eps = std::numeric_limits<double>::epsilon();

  auto relres = [&](const DenseBlock& res, Index j) {
    const double bn = bnorm[static_cast<std::size_t>(j)];
    return bn > 0.0 ? res.col(j).norm() / bn : 0.0;
  };
  auto recover_x = [&]() -> DenseBlock { return p ? p->apply(y) : y; };

  bool breakdown = false;
  std::vector<Index> forced;  // columns re-entering after a failed true-residual check
  for (;;) {
    std::vector<Index> active;
    for (Index j = 0; j < s; ++j) {
      const bool force = std::find(forced.begin(), forced.end(), j) != forced.end();
      if (force || relres(r, j) > cfg.tol) active.push_back(j);
    }
    forced.clear();

    if (active.empty()) {
      // Confirm with the true residual; stale columns re-enter with it.
      const DenseBlock rt = b - spmm(a, recover_x());
      rep.matvec_count += s;
      for (Index j = 0; j < s; ++j)
        if (relres(rt, j) > cfg.tol) forced.push_back(j);
      if (forced.empty()) break;
      r = rt;
      if (c_space.cols() > 0) {
        const DenseMatrix proj = c_space.adjoint() * r;
        y += u_space * proj;
        r -= c_space * proj;
      }
      continue;
    }
    if (rep.iterations >= cfg.max_iters || breakdown) break;

    const Index sa = static_cast<Index>(active.size());
    DenseBlock f(n, sa);
    for (Index t = 0; t < sa; ++t) {
      const Index j = active[static_cast<std::size_t>(t)];
      f.col(t) = r.col(j) / bnorm[static_cast<std::size_t>(j)];
    }

    // Starting block with deflation of dependent residual directions.
    double fmax = 0.0;
    for (Index t = 0; t < sa; ++t) fmax = std::max(fmax, f.col(t).norm());
    DenseBlock v1;
    DenseMatrix s0;
    detail::deflating_qr(f, cfg.deflation_tol * fmax, v1, s0);
    if (v1.cols() == 0) {
      breakdown = true;
      break;
    }

    const Index max_cols = (cfg.inner_restart + 1) * sa;
    DenseBlock basis(n, max_cols);
    basis.leftCols(v1.cols()) = v1;
    std::vector<Index> block_start{0, v1.cols()};  // basis offsets per Arnoldi block
    DenseMatrix hraw = DenseMatrix::Zero(max_cols, max_cols);
    DenseMatrix hqr = DenseMatrix::Zero(max_cols, max_cols);
    DenseMatrix g = DenseMatrix::Zero(max_cols, sa);
    g.topRows(s0.rows()) = s0;
    DenseMatrix cproj = DenseMatrix::Zero(c_space.cols(), max_cols);  // C^H A P V
    std::vector<detail::Reflector> reflectors;
    Index ncols = 0;  // columns of H processed
    Index nrows = v1.cols();
    double hnorm = 0.0;

    for (Index step = 0; step < cfg.inner_restart && rep.iterations < cfg.max_iters; ++step) {
      const Index b0 = block_start[static_cast<std::size_t>(step)];
      const Index b1 = block_start[static_cast<std::size_t>(step) + 1];
      const Index pj = b1 - b0;
      if (pj == 0) break;
      DenseBlock w = op(basis.middleCols(b0, pj));
      double wmax = 0.0;
      for (Index t = 0; t < pj; ++t) wmax = std::max(wmax, w.col(t).norm());
      if (c_space.cols() > 0) {
        for (int pass = 0; pass < 2; ++pass) {
          const DenseMatrix h = c_space.adjoint() * w;
          cproj.middleCols(b0, pj) += h;
          w -= c_space * h;
        }
      }
      for (int pass = 0; pass < 2; ++pass) {
        const DenseMatrix h = basis.leftCols(b1).adjoint() * w;
        hraw.block(0, b0, b1, pj) += h;
        w -= basis.leftCols(b1) * h;
      }
      DenseBlock vnext;
      DenseMatrix hsub;
      detail::deflating_qr(w, cfg.deflation_tol * std::max(wmax, eps), vnext, hsub);
      const Index pn = vnext.cols();
      basis.middleCols(b1, pn) = vnext;
      hraw.block(b1, b0, pn, pj) = hsub;
      block_start.push_back(b1 + pn);
      nrows = b1 + pn;
      ++rep.iterations;

      // Extend the QR factorization of H by the new columns.
      for (Index c = b0; c < b1; ++c) {
        hqr.block(0, c, nrows, 1) = hraw.block(0, c, nrows, 1);
        hnorm = std::max(hnorm, hraw.block(0, c, nrows, 1).norm());
        auto col = hqr.block(0, c, nrows, 1);
        for (const auto& refl : reflectors) refl.apply(col);
        const Vector x = hqr.block(c, c, nrows - c, 1);
        auto refl = detail::make_reflector(x, c);
        refl.apply(col);
        auto gr = g.topRows(nrows);
        refl.apply(gr);
        reflectors.push_back(std::move(refl));
        ++ncols;
      }

      bool done = true;
      for (Index t = 0; t < sa; ++t) {
        const double est = g.block(ncols, t, nrows - ncols, 1).norm();
        rep.residual_history[static_cast<std::size_t>(active[static_cast<std::size_t>(t)])]
            .push_back(est);
        if (est > cfg.tol) done = false;
      }
      if (done || pn == 0) break;
    }
    ++rep.cycles;
    if (ncols == 0) {
      breakdown = true;
      break;
    }

    for (Index k = 0; k < ncols; ++k) {
      if (!(std::abs(hqr(k, k)) > 10.0 * eps * std::max(hnorm, eps))) breakdown = true;
    }
    if (breakdown) break;

    const DenseMatrix coeffs = hqr.topLeftCorner(ncols, ncols)
                                   .triangularView<Eigen::Upper>()
                                   .solve(g.topRows(ncols));
    DenseBlock dy = basis.leftCols(ncols) * coeffs;
    if (c_space.cols() > 0) dy -= u_space * (cproj.leftCols(ncols) * coeffs);
    DenseBlock dc = basis.leftCols(nrows) * (hraw.topLeftCorner(nrows, ncols) * coeffs);

    for (Index t = 0; t < sa; ++t) {
      const Index j = active[static_cast<std::size_t>(t)];
      const double scale = bnorm[static_cast<std::size_t>(j)];
      y.col(j) += scale * dy.col(t);
      r.col(j) -= scale * dc.col(t);
    }

    // Append the new correction directions to the outer space.
    if (outer_cap > 0) {
      double cmax = 0.0;
      for (Index t = 0; t < sa; ++t) cmax = std::max(cmax, dc.col(t).norm());
      if (c_space.cols() > 0) {
        const DenseMatrix h = c_space.adjoint() * dc;
        dc -= c_space * h;
        dy -= u_space * h;
      }
      DenseBlock cq;
      DenseMatrix cr;
      detail::deflating_qr(dc, cfg.deflation_tol * std::max(cmax, eps), cq, cr);
      if (cq.cols() > 0) {
        // dc = cq cr  =>  cq = dc cr^+ ; apply the same map to dy.
        const DenseMatrix map = cr.completeOrthogonalDecomposition().pseudoInverse();
        const DenseBlock uq = dy * map;
        const Index keep_old = std::max<Index>(0, std::min(c_space.cols(), outer_cap - cq.cols()));
        const Index add = std::min(cq.cols(), outer_cap);
        DenseBlock c_new(n, keep_old + add), u_new(n, keep_old + add);
        c_new.leftCols(keep_old) = c_space.rightCols(keep_old);
        u_new.leftCols(keep_old) = u_space.rightCols(keep_old);
        c_new.rightCols(add) = cq.rightCols(add);
        u_new.rightCols(add) = uq.rightCols(add);
        c_space = std::move(c_new);
        u_space = std::move(u_new);
      }
    }
  }

  BlockSolveResult out;
  out.x = recover_x();
  const DenseBlock rt = b - spmm(a, out.x);
  rep.matvec_count += s;
  bool all_ok = true;
  for (Index j = 0; j < s; ++j) {
    const double rr = relres(rt, j);
    rep.final_residuals[static_cast<std::size_t>(j)] = rr;
    rep.residual_history[static_cast<std::size_t>(j)].push_back(rr);
    if (rr > cfg.tol) all_ok = false;
  }
  rep.converged = all_ok;
  rep.status = all_ok ? SolveStatus::converged
                      : (breakdown ? SolveStatus::breakdown : SolveStatus::max_iterations);
  rep.wall_time = clock.seconds();
  out.report = std::move(rep);
  return out;
}

/// Single right-hand-side GCRO; the one-column case of block_gcro_solve.
inline SolveResult gcro_solve(const SparseMatrix& a, const Vector& b, const Preconditioner* p,
                              const SolverConfig& cfg = {}) {
  if (b.size() != a.rows()) throw DimensionError("gcro_solve: right-hand side length mismatch");
  DenseBlock bb = b;
  auto res = block_gcro_solve(a, bb, p, cfg);
  return SolveResult{res.x.col(0), std::move(res.report)};
}

}  // namespace pmor
