#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pmor/bench/config.hpp"
#include "pmor/bench/report.hpp"
#include "pmor/io/preconditioner_io.hpp"
#include "pmor/io/reduced_io.hpp"

namespace pmor::bench {

/// Stable process exit codes.
enum ExitCode : int { exit_success = 0, exit_usage = 1, exit_numerical = 2 };

// gen

struct GenResult {
  io::FamilyData data;
  std::filesystem::path dir;
};

/// Reads a generator spec (a model object, or an experiment config with a
/// "model" key) and writes the family directory.
inline GenResult cmd_gen(const std::filesystem::path& spec_file, const std::filesystem::path& out_dir,
                         std::optional<std::uint64_t> seed = std::nullopt) {
  Json j;
  try {
    j = io::read_json(spec_file);
  } catch (const io::FormatError& e) {
    throw UsageError(e.what());
  }
  const Json model = j.is_object() && j.contains("model") ? j["model"] : j;
  std::uint64_t s = seed.value_or(1);
  if (!seed && j.is_object() && j.contains("seed") && j["seed"].is_number_unsigned()) s = j["seed"].get<std::uint64_t>();
  const auto src = parse_model_source(model, spec_file.parent_path());
  if (!src.family_dir.empty()) throw UsageError("gen: spec must name a generator, not a family directory");
  auto data = build_family(src, s);
  io::save_family(data, out_dir);
  return {std::move(data), out_dir};
}

// analyze

inline std::vector<ExpansionPoint> load_points_file(const std::filesystem::path& path) {
  try {
    const auto j = io::read_json(path);
    return io::points_from_json(j.is_object() && j.contains("points") ? j["points"] : j);
  } catch (const io::FormatError& e) {
    throw UsageError(e.what());
  }
}

inline std::string difference_rows_to_csv(const std::vector<DifferenceRow>& rows) {
  std::ostringstream out;
  out << "label,identity_gap,reference_gap,ratio\n";
  for (const auto& r : rows)
    out << detail::csv_field(r.label) << ',' << detail::csv_double(r.identity_gap) << ','
        << detail::csv_double(r.reference_gap) << ','
        << detail::csv_double(r.identity_gap > 0.0 ? r.reference_gap / r.identity_gap : 0.0) << '\n';
  return out.str();
}

inline Json difference_rows_to_json(const std::vector<DifferenceRow>& rows) {
  Json a = Json::array();
  for (const auto& r : rows)
    a.push_back({{"label", r.label},
                 {"identity_gap", r.identity_gap},
                 {"reference_gap", r.reference_gap},
                 {"ratio", r.identity_gap > 0.0 ? r.reference_gap / r.identity_gap : 0.0}});
  return a;
}

inline std::vector<DifferenceRow> difference_rows_from_json(const Json& a) {
  std::vector<DifferenceRow> rows;
  for (const auto& r : a)
    rows.push_back({r.at("label").get<std::string>(), r.at("identity_gap").get<double>(),
                    r.at("reference_gap").get<double>()});
  return rows;
}

/// Table-2 style norms ||I - A(l)||_F and ||A(1) - A(l)||_F. Points come
/// from `points_file` when given, otherwise from the family manifest.
/// Writes analysis.csv and analysis.json when `out_dir` is set.
inline std::vector<DifferenceRow> cmd_analyze(const std::filesystem::path& family_dir,
                                              const std::optional<std::filesystem::path>& points_file = {},
                                              const std::optional<std::filesystem::path>& out_dir = {}) {
  io::FamilyData data;
  try {
    data = io::load_family(family_dir);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  const auto points = points_file ? load_points_file(*points_file) : data.points;
  if (points.empty()) throw UsageError("analyze: no expansion points");
  for (const auto& p : points)
    if (p.size() != data.family.parameter_count())
      throw UsageError("analyze: point '" + p.label + "' does not match the family");
  const auto rows = pairwise_difference_norms(data.family, points);
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    io::write_text(*out_dir / "analysis.csv", difference_rows_to_csv(rows));
    io::write_json(*out_dir / "analysis.json",
                   Json{{"family_fingerprint", io::family_fingerprint(data.family)},
                        {"rows", difference_rows_to_json(rows)}});
  }
  return rows;
}

inline std::string difference_table(const std::vector<DifferenceRow>& rows) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-24s %14s %14s %12s\n", "point", "|I-A(l)|_F", "|A(1)-A(l)|_F", "ratio");
  out << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-24s %14.6e %14.6e %12.4e\n", r.label.substr(0, 24).c_str(), r.identity_gap,
                  r.reference_gap, r.identity_gap > 0.0 ? r.reference_gap / r.identity_gap : 0.0);
    out << buf;
  }
  return out.str();
}

// run

inline PipelineConfig pipeline_config(const ExperimentConfig& c) {
  PipelineConfig p;
  p.levels = c.levels;
  p.solver = MomentSolver{c.solver, c.solver_config};
  p.precond = c.precond;
  p.spai = c.spai;
  p.spai.threads = c.threads;
  p.update = c.update;
  p.update.threads = c.threads;
  p.parallel_points = c.threads > 1;
  p.continue_on_failure = true;
  p.compute_quality = c.compute_quality;
  return p;
}

/// Runs the configured sequence and writes report.json, report.csv,
/// summary.txt and, if enabled, the reduced model and preconditioners.
/// Solver failures are recorded and the run continues; the caller maps
/// `totals.failures > 0` or a nonempty `error` to a nonzero exit.
inline RunRecord cmd_run(const ExperimentConfig& cfg) {
  const auto data = build_family(cfg.model, cfg.seed);
  const auto points = cfg.points ? *cfg.points : data.points;
  if (points.empty()) throw UsageError("run: no expansion points");
  for (const auto& p : points)
    if (p.size() != data.family.parameter_count())
      throw UsageError("run: point '" + p.label + "' does not match the family");
  if (data.family.rhs().size() == 0) throw UsageError("run: family has no right-hand side");

  RunRecord rec;
  rec.config_hash = config_hash(cfg);
  rec.seed = cfg.seed;
  rec.threads = cfg.threads;
  rec.family_fingerprint = io::family_fingerprint(data.family);
  rec.dimension = data.family.dimension();
  rec.solver = to_string(cfg.solver);
  rec.precond = to_string(cfg.precond);
  rec.levels = cfg.levels;
  for (std::size_t k = 0; k < points.size(); ++k)
    rec.point_labels.push_back(points[k].label.empty() ? "point" + std::to_string(k + 1) : points[k].label);

  const auto run = rpmor_collect(data.family, points, pipeline_config(cfg));
  const auto diffs = pairwise_difference_norms(data.family, points);
  const auto& rep = run.report;
  for (std::size_t l = 0; l < rep.points.size(); ++l) {
    const auto& pr = rep.points[l];
    StepRecord s;
    s.step = l + 1;
    s.point = rec.point_labels[l];
    s.precond_kind = pr.preconditioner ? pr.preconditioner->kind : "none";
    if (pr.preconditioner) {
      s.build_seconds = pr.preconditioner->build_seconds;
      s.nnz = pr.preconditioner->nnz;
      s.augmented_columns = pr.preconditioner->augmented_columns;
      s.max_column_residual = pr.preconditioner->max_column_residual;
      s.chain_depth = pr.preconditioner->chain_depth;
    }
    s.quality = pr.quality;
    s.identity_gap = diffs[l].identity_gap;
    s.reference_gap = diffs[l].reference_gap;
    s.moment_columns = pr.moment_columns;
    s.basis_columns_added = pr.basis_columns_added;
    rec.steps.push_back(std::move(s));
    for (const auto& solve : pr.solves) {
      SystemRecord sys;
      sys.step = l + 1;
      sys.point = rec.point_labels[l];
      sys.level = solve.level;
      sys.columns = solve.columns;
      sys.calls = solve.calls;
      sys.iterations = solve.report.iterations;
      sys.matvecs = solve.report.matvec_count;
      sys.precond_applies = solve.report.precond_apply_count;
      sys.solve_seconds = solve.report.wall_time;
      sys.converged = solve.report.converged;
      sys.status = to_string(solve.report.status);
      for (const auto r : solve.report.final_residuals) sys.max_final_residual = std::max(sys.max_final_residual, r);
      rec.systems.push_back(std::move(sys));
    }
  }
  rec.totals = RunTotals{rep.total_iterations, rep.total_calls, rep.total_systems,   rep.total_matvecs,
                         rep.failures,         rep.solve_seconds, rep.precondition_seconds};

  std::filesystem::create_directories(cfg.output);
  if (run.basis.cols() == 0) {
    rec.error = "every moment column was dropped; no reduced model";
  } else {
    const auto reduced = galerkin_project(data.family, run.basis);
    rec.reduced_order = reduced.order();
    if (cfg.write_matrices) io::save_reduced(reduced, cfg.output / "reduced");
  }
  if (cfg.write_matrices) {
    for (std::size_t l = 0; l < run.preconditioners.size(); ++l)
      io::save_preconditioner(run.preconditioners[l], cfg.output / "preconditioners",
                              "step" + std::to_string(l + 1), to_json(rec.steps[l]));
  }
  io::write_json(cfg.output / "report.json", to_json(rec));
  io::write_text(cfg.output / "report.csv", systems_to_csv(rec.systems));
  io::write_text(cfg.output / "summary.txt", summary_text(rec));
  return rec;
}

// compare

struct StepDelta {
  std::size_t step = 0;
  std::string point;
  Index iterations_a = 0, iterations_b = 0;
  double build_seconds_a = 0.0, build_seconds_b = 0.0;
  double solve_seconds_a = 0.0, solve_seconds_b = 0.0;
};

struct CompareResult {
  std::vector<StepDelta> steps;
  Index iterations_a = 0, iterations_b = 0;
  double build_seconds_a = 0.0, build_seconds_b = 0.0;
  double solve_seconds_a = 0.0, solve_seconds_b = 0.0;
};

/// Percentage saved by b relative to a; 0 when both are 0.
inline double saving_percent(double a, double b) { return a == 0.0 ? (b == 0.0 ? 0.0 : -100.0) : 100.0 * (a - b) / a; }

inline CompareResult compare_runs(const RunRecord& a, const RunRecord& b) {
  if (a.family_fingerprint != b.family_fingerprint)
    throw UsageError("compare: runs were made on different families");
  if (a.point_labels != b.point_labels) throw UsageError("compare: runs use different expansion points");
  CompareResult c;
  for (std::size_t l = 0; l < a.point_labels.size(); ++l) {
    StepDelta d;
    d.step = l + 1;
    d.point = a.point_labels[l];
    for (const auto* r : {&a, &b}) {
      Index its = 0;
      double solve = 0.0, build = 0.0;
      for (const auto& s : r->systems)
        if (s.step == d.step) {
          its += s.iterations;
          solve += s.solve_seconds;
        }
      for (const auto& s : r->steps)
        if (s.step == d.step) build = s.build_seconds;
      (r == &a ? d.iterations_a : d.iterations_b) = its;
      (r == &a ? d.solve_seconds_a : d.solve_seconds_b) = solve;
      (r == &a ? d.build_seconds_a : d.build_seconds_b) = build;
    }
    c.iterations_a += d.iterations_a;
    c.iterations_b += d.iterations_b;
    c.build_seconds_a += d.build_seconds_a;
    c.build_seconds_b += d.build_seconds_b;
    c.solve_seconds_a += d.solve_seconds_a;
    c.solve_seconds_b += d.solve_seconds_b;
    c.steps.push_back(d);
  }
  return c;
}

inline Json to_json(const CompareResult& c) {
  Json steps = Json::array();
  for (const auto& d : c.steps)
    steps.push_back({{"step", d.step},
                     {"point", d.point},
                     {"iterations_a", d.iterations_a},
                     {"iterations_b", d.iterations_b},
                     {"iterations_saving_pct", saving_percent(double(d.iterations_a), double(d.iterations_b))},
                     {"build_seconds_a", d.build_seconds_a},
                     {"build_seconds_b", d.build_seconds_b},
                     {"build_saving_pct", saving_percent(d.build_seconds_a, d.build_seconds_b)},
                     {"solve_seconds_a", d.solve_seconds_a},
                     {"solve_seconds_b", d.solve_seconds_b},
                     {"solve_saving_pct", saving_percent(d.solve_seconds_a, d.solve_seconds_b)}});
  return Json{{"steps", steps},
              {"iterations_a", c.iterations_a},
              {"iterations_b", c.iterations_b},
              {"iterations_saving_pct", saving_percent(double(c.iterations_a), double(c.iterations_b))},
              {"build_saving_pct", saving_percent(c.build_seconds_a, c.build_seconds_b)},
              {"solve_saving_pct", saving_percent(c.solve_seconds_a, c.solve_seconds_b)}};
}

inline std::string compare_table(const CompareResult& c) {
  std::ostringstream out;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-4s %-24s %8s %8s %9s %10s %10s %9s\n", "step", "point", "iters A", "iters B",
                "saving%", "build A[s]", "build B[s]", "saving%");
  out << buf;
  for (const auto& d : c.steps) {
    std::snprintf(buf, sizeof buf, "%-4zu %-24s %8lld %8lld %9.2f %10.4f %10.4f %9.2f\n", d.step,
                  d.point.substr(0, 24).c_str(), static_cast<long long>(d.iterations_a),
                  static_cast<long long>(d.iterations_b),
                  saving_percent(double(d.iterations_a), double(d.iterations_b)), d.build_seconds_a,
                  d.build_seconds_b, saving_percent(d.build_seconds_a, d.build_seconds_b));
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "%-29s %8lld %8lld %9.2f %10.4f %10.4f %9.2f\n", "Sum",
                static_cast<long long>(c.iterations_a), static_cast<long long>(c.iterations_b),
                saving_percent(double(c.iterations_a), double(c.iterations_b)), c.build_seconds_a,
                c.build_seconds_b, saving_percent(c.build_seconds_a, c.build_seconds_b));
  out << buf;
  return out.str();
}

/// Loads two run reports (directories or report.json paths) and writes
/// compare.json and compare.csv when `out_dir` is set.
inline CompareResult cmd_compare(const std::filesystem::path& a, const std::filesystem::path& b,
                                 const std::optional<std::filesystem::path>& out_dir = {}) {
  RunRecord ra, rb;
  try {
    ra = load_run(a);
    rb = load_run(b);
  } catch (const io::FormatError& e) {
    throw UsageError(e.what());
  }
  auto c = compare_runs(ra, rb);
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    io::write_json(*out_dir / "compare.json", to_json(c));
    std::ostringstream csv;
    csv << "step,point,iterations_a,iterations_b,iterations_saving_pct,build_seconds_a,build_seconds_b,"
           "build_saving_pct\n";
    for (const auto& d : c.steps)
      csv << d.step << ',' << detail::csv_field(d.point) << ',' << d.iterations_a << ',' << d.iterations_b << ','
          << detail::csv_double(saving_percent(double(d.iterations_a), double(d.iterations_b))) << ','
          << detail::csv_double(d.build_seconds_a) << ',' << detail::csv_double(d.build_seconds_b) << ','
          << detail::csv_double(saving_percent(d.build_seconds_a, d.build_seconds_b)) << '\n';
    io::write_text(*out_dir / "compare.csv", csv.str());
  }
  return c;
}

}  // namespace pmor::bench
