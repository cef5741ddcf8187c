#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pmor/io/family_io.hpp"
#include "pmor/io/json_util.hpp"
#include "pmor/rpmor/pipeline.hpp"
#include "pmor/zoo/gyro.hpp"
#include "pmor/zoo/heat.hpp"
#include "pmor/zoo/penzl.hpp"

namespace pmor::bench {

using io::Json;

/// Invalid configuration or command-line input; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

/// Either a generator name with its parameters or a family directory.
struct ModelSource {
  std::string generator;  // "gyro", "penzl", "heat", "identity"; empty with family_dir
  Json spec = Json::object();
  std::filesystem::path family_dir;
};

struct ExperimentConfig {
  ModelSource model;
  /// Overrides the family's suggested points when present.
  std::optional<std::vector<ExpansionPoint>> points;
  SolverKind solver = SolverKind::block_gcro;
  PreconditionerChoice precond;
  SolverConfig solver_config;
  SpaiConfig spai;
  UpdateConfig update;
  Index levels = 1;
  std::uint64_t seed = 1;
  int threads = 1;
  bool write_matrices = true;
  bool compute_quality = false;
  std::filesystem::path output = "run";
};

namespace detail {

inline void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw UsageError(where + ": unknown key '" + it.key() + "'");
}

template <class T>
T get_or(const Json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw UsageError(where + ": key '" + key + "' has the wrong type");
  }
}

inline Json object_or_empty(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) return Json::object();
  if (!j[key].is_object()) throw UsageError(where + ": '" + key + "' must be an object");
  return j[key];
}

}  // namespace detail

inline SolverConfig parse_solver_config(const Json& j) {
  detail::reject_unknown(j, {"tol", "max_iters", "outer_space_dim", "inner_restart", "deflation_tol"},
                         "solver_config");
  SolverConfig c;
  c.tol = detail::get_or(j, "tol", c.tol, "solver_config");
  c.max_iters = detail::get_or(j, "max_iters", c.max_iters, "solver_config");
  c.outer_space_dim = detail::get_or(j, "outer_space_dim", c.outer_space_dim, "solver_config");
  c.inner_restart = detail::get_or(j, "inner_restart", c.inner_restart, "solver_config");
  c.deflation_tol = detail::get_or(j, "deflation_tol", c.deflation_tol, "solver_config");
  if (!(c.tol > 0.0)) throw UsageError("solver_config: tol must be positive");
  if (c.max_iters < 1) throw UsageError("solver_config: max_iters must be at least 1");
  if (c.inner_restart < 1 || c.outer_space_dim < 0) throw UsageError("solver_config: invalid space sizes");
  return c;
}

inline SpaiConfig parse_spai_config(const Json& j) {
  detail::reject_unknown(j, {"ep", "pattern_level", "max_fill_per_column"}, "spai");
  SpaiConfig c;
  c.ep = detail::get_or(j, "ep", c.ep, "spai");
  c.pattern_level = detail::get_or(j, "pattern_level", c.pattern_level, "spai");
  c.max_fill_per_column = detail::get_or(j, "max_fill_per_column", c.max_fill_per_column, "spai");
  if (!(c.ep > 0.0)) throw UsageError("spai: ep must be positive");
  if (c.pattern_level != 0 && c.pattern_level != 1) throw UsageError("spai: pattern_level must be 0 or 1");
  if (c.max_fill_per_column < 1) throw UsageError("spai: max_fill_per_column must be positive");
  return c;
}

inline UpdateConfig parse_update_config(const Json& j) {
  detail::reject_unknown(j, {"ep", "pattern_level", "max_fill_per_column"}, "update");
  const auto s = parse_spai_config(j);
  UpdateConfig c;
  c.ep = s.ep;
  c.pattern_level = s.pattern_level;
  c.max_fill_per_column = s.max_fill_per_column;
  return c;
}

inline ModelSource parse_model_source(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw UsageError("model must be an object");
  ModelSource m;
  if (j.contains("family_dir")) {
    detail::reject_unknown(j, {"family_dir"}, "model");
    auto dir = std::filesystem::path(detail::get_or(j, "family_dir", std::string{}, "model"));
    m.family_dir = dir.is_absolute() ? dir : base_dir / dir;
    if (!std::filesystem::exists(m.family_dir / "manifest.json"))
      throw UsageError("model: no family manifest in " + m.family_dir.string());
    return m;
  }
  m.generator = detail::get_or(j, "generator", std::string{}, "model");
  static const std::set<std::string> generators{"gyro", "penzl", "heat", "identity"};
  if (!generators.count(m.generator))
    throw UsageError("model: 'generator' must be one of gyro, penzl, heat, identity or give 'family_dir'");
  m.spec = j;
  m.spec.erase("generator");
  return m;
}

inline ExperimentConfig parse_experiment(const Json& j, const std::filesystem::path& base_dir = ".") {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  detail::reject_unknown(j,
                         {"model", "points", "solver", "precond", "solver_config", "spai", "update", "levels",
                          "seed", "threads", "write_matrices", "compute_quality", "output"},
                         "config");
  if (!j.contains("model")) throw UsageError("config: 'model' is required");
  ExperimentConfig c;
  c.model = parse_model_source(j["model"], base_dir);
  try {
    if (j.contains("points")) c.points = io::points_from_json(j["points"]);
    c.solver = parse_solver_kind(detail::get_or(j, "solver", to_string(c.solver), "config"));
    c.precond = parse_preconditioner_choice(detail::get_or(j, "precond", to_string(c.precond), "config"));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("config: ") + e.what());
  } catch (const io::FormatError& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  c.solver_config = parse_solver_config(detail::object_or_empty(j, "solver_config", "config"));
  c.spai = parse_spai_config(detail::object_or_empty(j, "spai", "config"));
  c.update = parse_update_config(detail::object_or_empty(j, "update", "config"));
  c.levels = detail::get_or(j, "levels", c.levels, "config");
  c.seed = detail::get_or(j, "seed", c.seed, "config");
  c.threads = detail::get_or(j, "threads", c.threads, "config");
  c.write_matrices = detail::get_or(j, "write_matrices", c.write_matrices, "config");
  c.compute_quality = detail::get_or(j, "compute_quality", c.compute_quality, "config");
  c.output = detail::get_or(j, "output", c.output.string(), "config");
  if (c.levels < 0) throw UsageError("config: levels must be nonnegative");
  if (c.threads < 1) throw UsageError("config: threads must be at least 1");
  return c;
}

inline ExperimentConfig load_experiment(const std::filesystem::path& path) {
  try {
    return parse_experiment(io::read_json(path), path.parent_path());
  } catch (const io::FormatError& e) {
    throw UsageError(e.what());
  }
}

/// Canonical form of every setting that affects results; hashed into reports.
inline Json canonical(const ExperimentConfig& c) {
  Json model = c.model.family_dir.empty()
                   ? Json{{"generator", c.model.generator}, {"spec", c.model.spec}}
                   : Json{{"family_dir", c.model.family_dir.lexically_normal().string()}};
  const auto& s = c.solver_config;
  Json j{{"model", model},
         {"solver", to_string(c.solver)},
         {"precond", to_string(c.precond)},
         {"solver_config",
          {{"tol", s.tol},
           {"max_iters", s.max_iters},
           {"outer_space_dim", s.outer_space_dim},
           {"inner_restart", s.inner_restart},
           {"deflation_tol", s.deflation_tol}}},
         {"spai", {{"ep", c.spai.ep}, {"pattern_level", c.spai.pattern_level}, {"max_fill_per_column", c.spai.max_fill_per_column}}},
         {"update",
          {{"ep", c.update.ep}, {"pattern_level", c.update.pattern_level}, {"max_fill_per_column", c.update.max_fill_per_column}}},
         {"levels", c.levels},
         {"seed", c.seed}};
  if (c.points) j["points"] = io::points_to_json(*c.points);
  return j;
}

inline std::string config_hash(const ExperimentConfig& c) { return io::json_hash(canonical(c)); }

// Generators

namespace detail {

inline GyroAnalogSpec gyro_spec_from_json(const Json& j, std::uint64_t seed) {
  reject_unknown(j,
                 {"n", "seed", "coupling_density", "shift", "mass_scale", "mass2_scale", "damping_scale",
                  "damping2_scale", "stiffness2_scale", "stiffness3_scale", "raw_points"},
                 "gyro");
  GyroAnalogSpec s;
  s.n = get_or(j, "n", s.n, "gyro");
  s.seed = get_or(j, "seed", seed, "gyro");
  s.coupling_density = get_or(j, "coupling_density", s.coupling_density, "gyro");
  s.shift = get_or(j, "shift", s.shift, "gyro");
  s.mass_scale = get_or(j, "mass_scale", s.mass_scale, "gyro");
  s.mass2_scale = get_or(j, "mass2_scale", s.mass2_scale, "gyro");
  s.damping_scale = get_or(j, "damping_scale", s.damping_scale, "gyro");
  s.damping2_scale = get_or(j, "damping2_scale", s.damping2_scale, "gyro");
  s.stiffness2_scale = get_or(j, "stiffness2_scale", s.stiffness2_scale, "gyro");
  s.stiffness3_scale = get_or(j, "stiffness3_scale", s.stiffness3_scale, "gyro");
  if (j.contains("raw_points")) {
    for (const auto& r : j["raw_points"]) {
      reject_unknown(r, {"s", "theta", "d"}, "gyro.raw_points");
      RawGyroParams p;
      p.s = io::complex_from_json(r.at("s"));
      p.theta = get_or(r, "theta", 0.0, "gyro.raw_points");
      p.d = get_or(r, "d", 1.0, "gyro.raw_points");
      s.points.push_back(p);
    }
  }
  return s;
}

inline PenzlSpec penzl_spec_from_json(const Json& j) {
  reject_unknown(j, {"parameters", "n4", "omega2", "omega3", "frequency"}, "penzl");
  PenzlSpec s;
  s.parameters = get_or(j, "parameters", s.parameters, "penzl");
  s.n4 = get_or(j, "n4", s.n4, "penzl");
  s.omega2 = get_or(j, "omega2", s.omega2, "penzl");
  s.omega3 = get_or(j, "omega3", s.omega3, "penzl");
  return s;
}

inline HeatKronSpec heat_spec_from_json(const Json& j) {
  reject_unknown(j, {"n", "points"}, "heat");
  HeatKronSpec s;
  s.n = get_or(j, "n", s.n, "heat");
  if (j.contains("points")) {
    s.points.clear();
    for (const auto& p : j["points"]) {
      const auto v = p.get<std::vector<double>>();
      if (v.size() != 4) throw UsageError("heat: each point needs four conductivities");
      s.points.push_back({v[0], v[1], v[2], v[3]});
    }
  }
  return s;
}

}  // namespace detail

/// Builds the family a model source describes. `seed` is used by randomized
/// generators unless the source fixes its own.
inline io::FamilyData build_family(const ModelSource& m, std::uint64_t seed) {
  if (!m.family_dir.empty()) return io::load_family(m.family_dir);
  try {
    if (m.generator == "gyro") {
      const auto spec = detail::gyro_spec_from_json(m.spec, seed);
      auto g = gen_gyro_analog(spec);
      Json gen = m.spec;
      gen["generator"] = "gyro";
      gen["seed"] = spec.seed;
      gen["seed_used"] = g.seed_used;
      return {std::move(g.model), std::move(g.points), gen};
    }
    if (m.generator == "penzl") {
      const auto spec = detail::penzl_spec_from_json(m.spec);
      const Complex s = m.spec.contains("frequency") ? io::complex_from_json(m.spec["frequency"]) : Complex(0.0, 100.0);
      auto p = gen_penzl(spec);
      Json gen = m.spec;
      gen["generator"] = "penzl";
      return {std::move(p.family), penzl_points(spec, s), gen};
    }
    if (m.generator == "heat") {
      auto h = gen_heat_kron(detail::heat_spec_from_json(m.spec));
      Json gen = m.spec;
      gen["generator"] = "heat";
      return {std::move(h.family), std::move(h.points), gen};
    }
    if (m.generator == "identity") {
      detail::reject_unknown(m.spec, {"n"}, "identity");
      const Index n = detail::get_or(m.spec, "n", Index{10}, "identity");
      if (n < 1) throw UsageError("identity: n must be positive");
      const auto i = SparseMatrix::identity(n);
      AffineFamily f({i, i}, DenseBlock::Ones(n, 1), DenseBlock::Ones(n, 1), {"I", "I"});
      return {std::move(f), {ExpansionPoint{{0.0}, "point1"}}, Json{{"generator", "identity"}, {"n", n}}};
    }
  } catch (const Json::exception& e) {
    throw UsageError(m.generator + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(m.generator + ": " + e.what());
  }
  throw UsageError("unknown generator '" + m.generator + "'");
}

}  // namespace pmor::bench
