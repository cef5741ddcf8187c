#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pmor/io/json_util.hpp"

namespace pmor::bench {

using io::Json;

/// One solve call group: a level of one expansion point.
struct SystemRecord {
  std::size_t step = 0;  // 1-based expansion point index
  std::string point;
  Index level = 0;
  Index columns = 0;
  Index calls = 0;
  Index iterations = 0;
  Index matvecs = 0;
  Index precond_applies = 0;
  double solve_seconds = 0.0;
  bool converged = false;
  std::string status;
  double max_final_residual = 0.0;

  friend bool operator==(const SystemRecord&, const SystemRecord&) = default;
};

/// Per expansion point: preconditioner build and difference norms.
struct StepRecord {
  std::size_t step = 0;
  std::string point;
  std::string precond_kind;  // "none", "spai", "update-first", "update-second"
  double build_seconds = 0.0;
  Index nnz = 0;
  Index augmented_columns = 0;
  double max_column_residual = 0.0;
  int chain_depth = 0;
  std::optional<double> quality;
  double identity_gap = 0.0;   // ||I - A(l)||_F
  double reference_gap = 0.0;  // ||A(1) - A(l)||_F
  Index moment_columns = 0;
  Index basis_columns_added = 0;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct RunTotals {
  Index iterations = 0;
  Index calls = 0;
  Index systems = 0;
  Index matvecs = 0;
  Index failures = 0;
  double solve_seconds = 0.0;
  double precondition_seconds = 0.0;

  friend bool operator==(const RunTotals&, const RunTotals&) = default;
};

struct RunRecord {
  std::string config_hash;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string family_fingerprint;
  Index dimension = 0;
  std::string solver;
  std::string precond;
  Index levels = 0;
  std::vector<std::string> point_labels;
  std::vector<StepRecord> steps;
  std::vector<SystemRecord> systems;
  RunTotals totals;
  Index reduced_order = 0;
  /// Set when the run stopped before completing every point.
  std::string error;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

// JSON

inline Json to_json(const SystemRecord& r) {
  return Json{{"step", r.step},
              {"point", r.point},
              {"level", r.level},
              {"columns", r.columns},
              {"calls", r.calls},
              {"iterations", r.iterations},
              {"matvecs", r.matvecs},
              {"precond_applies", r.precond_applies},
              {"solve_seconds", r.solve_seconds},
              {"converged", r.converged},
              {"status", r.status},
              {"max_final_residual", r.max_final_residual}};
}

inline SystemRecord system_from_json(const Json& j) {
  SystemRecord r;
  r.step = j.at("step").get<std::size_t>();
  r.point = j.at("point").get<std::string>();
  r.level = j.at("level").get<Index>();
  r.columns = j.at("columns").get<Index>();
  r.calls = j.at("calls").get<Index>();
  r.iterations = j.at("iterations").get<Index>();
  r.matvecs = j.at("matvecs").get<Index>();
  r.precond_applies = j.at("precond_applies").get<Index>();
  r.solve_seconds = j.at("solve_seconds").get<double>();
  r.converged = j.at("converged").get<bool>();
  r.status = j.at("status").get<std::string>();
  r.max_final_residual = j.at("max_final_residual").get<double>();
  return r;
}

inline Json to_json(const StepRecord& r) {
  Json j{{"step", r.step},
         {"point", r.point},
         {"precond_kind", r.precond_kind},
         {"build_seconds", r.build_seconds},
         {"nnz", r.nnz},
         {"augmented_columns", r.augmented_columns},
         {"max_column_residual", r.max_column_residual},
         {"chain_depth", r.chain_depth},
         {"quality", nullptr},
         {"identity_gap", r.identity_gap},
         {"reference_gap", r.reference_gap},
         {"moment_columns", r.moment_columns},
         {"basis_columns_added", r.basis_columns_added}};
  if (r.quality) j["quality"] = *r.quality;
  return j;
}

inline StepRecord step_from_json(const Json& j) {
  StepRecord r;
  r.step = j.at("step").get<std::size_t>();
  r.point = j.at("point").get<std::string>();
  r.precond_kind = j.at("precond_kind").get<std::string>();
  r.build_seconds = j.at("build_seconds").get<double>();
  r.nnz = j.at("nnz").get<Index>();
  r.augmented_columns = j.at("augmented_columns").get<Index>();
  r.max_column_residual = j.at("max_column_residual").get<double>();
  r.chain_depth = j.at("chain_depth").get<int>();
  if (!j.at("quality").is_null()) r.quality = j["quality"].get<double>();
  r.identity_gap = j.at("identity_gap").get<double>();
  r.reference_gap = j.at("reference_gap").get<double>();
  r.moment_columns = j.at("moment_columns").get<Index>();
  r.basis_columns_added = j.at("basis_columns_added").get<Index>();
  return r;
}

inline Json to_json(const RunRecord& r) {
  Json steps = Json::array(), systems = Json::array();
  for (const auto& s : r.steps) steps.push_back(to_json(s));
  for (const auto& s : r.systems) systems.push_back(to_json(s));
  const auto& t = r.totals;
  return Json{{"format", "pmor-run-report"},
              {"version", 1},
              {"config_hash", r.config_hash},
              {"seed", r.seed},
              {"threads", r.threads},
              {"family_fingerprint", r.family_fingerprint},
              {"dimension", r.dimension},
              {"solver", r.solver},
              {"precond", r.precond},
              {"levels", r.levels},
              {"point_labels", r.point_labels},
              {"steps", steps},
              {"systems", systems},
              {"totals",
               {{"iterations", t.iterations},
                {"calls", t.calls},
                {"systems", t.systems},
                {"matvecs", t.matvecs},
                {"failures", t.failures},
                {"solve_seconds", t.solve_seconds},
                {"precondition_seconds", t.precondition_seconds}}},
              {"reduced_order", r.reduced_order},
              {"error", r.error}};
}

inline RunRecord run_from_json(const Json& j) {
  if (j.value("format", std::string{}) != "pmor-run-report") throw io::FormatError("not a run report");
  RunRecord r;
  r.config_hash = j.at("config_hash").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.threads = j.at("threads").get<int>();
  r.family_fingerprint = j.at("family_fingerprint").get<std::string>();
  r.dimension = j.at("dimension").get<Index>();
  r.solver = j.at("solver").get<std::string>();
  r.precond = j.at("precond").get<std::string>();
  r.levels = j.at("levels").get<Index>();
  r.point_labels = j.at("point_labels").get<std::vector<std::string>>();
  for (const auto& s : j.at("steps")) r.steps.push_back(step_from_json(s));
  for (const auto& s : j.at("systems")) r.systems.push_back(system_from_json(s));
  const auto& t = j.at("totals");
  r.totals.iterations = t.at("iterations").get<Index>();
  r.totals.calls = t.at("calls").get<Index>();
  r.totals.systems = t.at("systems").get<Index>();
  r.totals.matvecs = t.at("matvecs").get<Index>();
  r.totals.failures = t.at("failures").get<Index>();
  r.totals.solve_seconds = t.at("solve_seconds").get<double>();
  r.totals.precondition_seconds = t.at("precondition_seconds").get<double>();
  r.reduced_order = j.at("reduced_order").get<Index>();
  r.error = j.value("error", std::string{});
  return r;
}

inline RunRecord load_run(const std::filesystem::path& dir_or_file) {
  const auto path = std::filesystem::is_directory(dir_or_file) ? dir_or_file / "report.json" : dir_or_file;
  try {
    return run_from_json(io::read_json(path));
  } catch (const Json::exception& e) {
    throw io::FormatError(path.string() + ": " + e.what());
  }
}

// CSV: one row per system record.

namespace detail {

inline std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace detail

inline constexpr const char* system_csv_header =
    "step,point,level,columns,calls,iterations,matvecs,precond_applies,solve_seconds,converged,status,"
    "max_final_residual";

inline std::string systems_to_csv(const std::vector<SystemRecord>& rows) {
  std::ostringstream out;
  out << system_csv_header << '\n';
  for (const auto& r : rows) {
    out << r.step << ',' << detail::csv_field(r.point) << ',' << r.level << ',' << r.columns << ',' << r.calls
        << ',' << r.iterations << ',' << r.matvecs << ',' << r.precond_applies << ','
        << detail::csv_double(r.solve_seconds) << ',' << (r.converged ? 1 : 0) << ',' << r.status << ','
        << detail::csv_double(r.max_final_residual) << '\n';
  }
  return out.str();
}

inline std::vector<SystemRecord> systems_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != system_csv_header) throw io::FormatError("unexpected CSV header");
  std::vector<SystemRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 12) throw io::FormatError("CSV row has " + std::to_string(f.size()) + " fields");
    SystemRecord r;
    r.step = std::stoull(f[0]);
    r.point = f[1];
    r.level = std::stoll(f[2]);
    r.columns = std::stoll(f[3]);
    r.calls = std::stoll(f[4]);
    r.iterations = std::stoll(f[5]);
    r.matvecs = std::stoll(f[6]);
    r.precond_applies = std::stoll(f[7]);
    r.solve_seconds = std::stod(f[8]);
    r.converged = f[9] == "1";
    r.status = f[10];
    r.max_final_residual = std::stod(f[11]);
    rows.push_back(std::move(r));
  }
  return rows;
}

// Text summary

inline std::string summary_text(const RunRecord& r) {
  std::ostringstream out;
  char buf[256];
  out << "config " << r.config_hash << "  seed " << r.seed << "  threads " << r.threads << '\n';
  out << "family " << r.family_fingerprint << "  n = " << r.dimension << "  points = " << r.point_labels.size()
      << '\n';
  out << "solver " << r.solver << "  precond " << r.precond << "  levels " << r.levels << "\n\n";
  std::snprintf(buf, sizeof buf, "%-4s %-24s %-14s %10s %9s %12s %12s %8s\n", "step", "point", "precond",
                "build[s]", "nnz", "|I-A|_F", "|A1-A|_F", "iters");
  out << buf;
  for (const auto& s : r.steps) {
    Index its = 0;
    for (const auto& sys : r.systems)
      if (sys.step == s.step) its += sys.iterations;
    std::snprintf(buf, sizeof buf, "%-4zu %-24s %-14s %10.4f %9lld %12.4e %12.4e %8lld\n", s.step,
                  s.point.substr(0, 24).c_str(), s.precond_kind.c_str(), s.build_seconds,
                  static_cast<long long>(s.nnz), s.identity_gap, s.reference_gap, static_cast<long long>(its));
    out << buf;
  }
  out << '\n';
  std::snprintf(buf, sizeof buf, "%-4s %-24s %5s %7s %6s %8s %9s %10s\n", "step", "point", "level", "columns",
                "calls", "iters", "matvecs", "solve[s]");
  out << buf;
  for (const auto& s : r.systems) {
    std::snprintf(buf, sizeof buf, "%-4zu %-24s %5lld %7lld %6lld %8lld %9lld %10.4f%s\n", s.step,
                  s.point.substr(0, 24).c_str(), static_cast<long long>(s.level),
                  static_cast<long long>(s.columns), static_cast<long long>(s.calls),
                  static_cast<long long>(s.iterations), static_cast<long long>(s.matvecs), s.solve_seconds,
                  s.converged ? "" : "  FAILED");
    out << buf;
  }
  const auto& t = r.totals;
  std::snprintf(buf, sizeof buf,
                "\nSum: iterations %lld  calls %lld  systems %lld  matvecs %lld  failures %lld\n"
                "Total time: precondition %.4f s  solve %.4f s\n",
                static_cast<long long>(t.iterations), static_cast<long long>(t.calls),
                static_cast<long long>(t.systems), static_cast<long long>(t.matvecs),
                static_cast<long long>(t.failures), t.precondition_seconds, t.solve_seconds);
  out << buf;
  out << "reduced order " << r.reduced_order << '\n';
  if (!r.error.empty()) out << "error: " << r.error << '\n';
  return out.str();
}

}  // namespace pmor::bench
