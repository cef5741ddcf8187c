#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "pmor/bench/commands.hpp"
#include "support.hpp"

using namespace pmor;
using namespace pmor::bench;
namespace fs = std::filesystem;

namespace {

/// Fresh scratch directory per test, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / ("pmor_bench_" + std::string(info->name()) + "_" + tag);
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<fs::path> mtx_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.path().extension() == ".mtx") out.push_back(fs::relative(e.path(), dir));
  std::sort(out.begin(), out.end());
  return out;
}

void write_file(const fs::path& p, const std::string& text) { io::write_text(p, text); }

ExperimentConfig gyro_config(const fs::path& out, SolverKind solver, const std::string& precond, Index n = 600) {
  ExperimentConfig c;
  c.model.generator = "gyro";
  c.model.spec = Json{{"n", n}};
  c.solver = solver;
  c.precond = parse_preconditioner_choice(precond);
  c.output = out;
  return c;
}

Index step_iterations(const RunRecord& r, std::size_t step) {
  Index its = 0;
  for (const auto& s : r.systems)
    if (s.step == step) its += s.iterations;
  return its;
}

}  // namespace

// Family persistence

TEST(FamilyIo, RoundTripIsExact) {
  ScratchDir dir("fam");
  GyroAnalogSpec spec;
  spec.n = 40;
  auto g = gen_gyro_analog(spec);
  io::FamilyData data{g.model, g.points, Json{{"generator", "gyro"}}};
  io::save_family(data, dir.path());
  const auto back = io::load_family(dir.path());
  ASSERT_EQ(back.family.term_count(), data.family.term_count());
  for (Index j = 0; j < data.family.term_count(); ++j)
    EXPECT_EQ((to_dense(back.family.term(j)) - to_dense(data.family.term(j))).norm(), 0.0);
  EXPECT_EQ((back.family.rhs() - data.family.rhs()).norm(), 0.0);
  EXPECT_EQ(back.family.term_labels(), data.family.term_labels());
  ASSERT_EQ(back.points.size(), data.points.size());
  for (std::size_t l = 0; l < back.points.size(); ++l) {
    EXPECT_EQ(back.points[l].values, data.points[l].values);
    EXPECT_EQ(back.points[l].label, data.points[l].label);
  }
  EXPECT_EQ(io::family_fingerprint(back.family), io::family_fingerprint(data.family));
}

TEST(FamilyIo, MissingManifestIsFormatError) {
  ScratchDir dir("fam");
  EXPECT_THROW(io::load_family(dir.path()), io::FormatError);
}

TEST(PreconditionerIo, FactoredChainRoundTrip) {
  ScratchDir dir("p");
  std::mt19937_64 rng(21);
  const auto m0 = pmor::testing::well_conditioned(20, 0.2, rng);
  const auto m1 = pmor::testing::well_conditioned(20, 0.2, rng);
  const auto m2 = pmor::testing::well_conditioned(20, 0.2, rng);
  const auto p = Preconditioner::factored(m2, Preconditioner::factored(m1, Preconditioner::explicit_inverse(m0)));
  io::save_preconditioner(p, dir.path(), "step3", Json{{"note", "x"}});
  const auto q = io::load_preconditioner(dir.path(), "step3");
  EXPECT_EQ(q.depth(), p.depth());
  EXPECT_EQ((to_dense(q.materialize()) - to_dense(p.materialize())).norm(), 0.0);
  EXPECT_EQ(io::read_json(dir / "step3.json")["info"]["note"], "x");
}

TEST(ReducedIo, RoundTripIsExact) {
  ScratchDir dir("r");
  GyroAnalogSpec spec;
  spec.n = 30;
  const auto g = gen_gyro_analog(spec);
  std::mt19937_64 rng(22);
  DenseBlock v = pmor::testing::random_dense(30, 4, rng);
  v = Eigen::HouseholderQR<DenseMatrix>(v).householderQ() * DenseMatrix::Identity(30, 4);
  const auto r = galerkin_project(g.model, v);
  io::save_reduced(r, dir.path());
  const auto back = io::load_reduced(dir.path());
  ASSERT_EQ(back.terms.size(), r.terms.size());
  for (std::size_t j = 0; j < r.terms.size(); ++j) EXPECT_EQ((back.terms[j] - r.terms[j]).norm(), 0.0);
  EXPECT_EQ((back.b - r.b).norm(), 0.0);
  EXPECT_EQ((back.c - r.c).norm(), 0.0);
  EXPECT_EQ((back.v - r.v).norm(), 0.0);
}

// gen

TEST(CmdGen, PenzlWritesMatrixFilesAndManifest) {
  ScratchDir dir("gen");
  write_file(dir / "penzl.json", R"({"generator": "penzl", "n4": 30})");
  const auto res = cmd_gen(dir / "penzl.json", dir / "fam");
  const auto files = mtx_files(dir / "fam");
  // Three affine terms plus input and output matrices.
  EXPECT_EQ(files.size(), 5u);
  EXPECT_TRUE(fs::exists(dir / "fam" / "manifest.json"));
  EXPECT_EQ(res.data.family.term_count(), 3);
  EXPECT_EQ(res.data.points.size(), 3u);
}

TEST(CmdGen, SameSeedGivesByteIdenticalOutput) {
  ScratchDir dir("gen");
  write_file(dir / "gyro.json", R"({"generator": "gyro", "n": 60})");
  cmd_gen(dir / "gyro.json", dir / "a", 7);
  cmd_gen(dir / "gyro.json", dir / "b", 7);
  const auto files = mtx_files(dir / "a");
  ASSERT_EQ(files, mtx_files(dir / "b"));
  for (const auto& f : files) EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  EXPECT_EQ(slurp(dir / "a" / "manifest.json"), slurp(dir / "b" / "manifest.json"));
  cmd_gen(dir / "gyro.json", dir / "c", 8);
  EXPECT_NE(slurp(dir / "a" / "term_00.mtx"), slurp(dir / "c" / "term_00.mtx"));
}

TEST(CmdGen, InvalidSpecIsUsageError) {
  ScratchDir dir("gen");
  write_file(dir / "bad1.json", R"({"generator": "penzl", "n4": "many"})");
  write_file(dir / "bad2.json", R"({"generator": "nope"})");
  write_file(dir / "bad3.json", R"({"generator": "gyro", "bogus": 1})");
  write_file(dir / "bad4.json", R"({"generator": "gyro", "n": 2})");
  write_file(dir / "bad5.json", "{ not json");
  for (const auto* f : {"bad1.json", "bad2.json", "bad3.json", "bad4.json", "bad5.json"})
    EXPECT_THROW(cmd_gen(dir / f, dir / "out"), UsageError) << f;
  EXPECT_THROW(cmd_gen(dir / "missing.json", dir / "out"), UsageError);
}

// analyze

TEST(CmdAnalyze, OnePointGivesZeroReferenceGap) {
  ScratchDir dir("an");
  write_file(dir / "penzl.json", R"({"generator": "penzl", "n4": 10})");
  cmd_gen(dir / "penzl.json", dir / "fam");
  write_file(dir / "pts.json", R"({"points": [{"label": "only", "values": [[0, 100], 50]}]})");
  const auto rows = cmd_analyze(dir / "fam", dir / "pts.json", dir / "out");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].reference_gap, 0.0);
  EXPECT_GT(rows[0].identity_gap, 0.0);
  EXPECT_TRUE(fs::exists(dir / "out" / "analysis.csv"));
  const auto back = difference_rows_from_json(io::read_json(dir / "out" / "analysis.json")["rows"]);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].identity_gap, rows[0].identity_gap);
  EXPECT_EQ(back[0].label, "only");
}

TEST(CmdAnalyze, IdenticalPointsGiveZeros) {
  ScratchDir dir("an");
  write_file(dir / "penzl.json", R"({"generator": "penzl", "n4": 10})");
  cmd_gen(dir / "penzl.json", dir / "fam");
  write_file(dir / "pts.json", R"([{"values": [[0, 3], 10]}, {"values": [[0, 3], 10]}, {"values": [[0, 3], 10]}])");
  const auto rows = cmd_analyze(dir / "fam", dir / "pts.json");
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) EXPECT_EQ(r.reference_gap, 0.0);
}

TEST(CmdAnalyze, MatchesDirectComputationOnGyroAnalog) {
  ScratchDir dir("an");
  write_file(dir / "gyro.json", R"({"generator": "gyro", "n": 300})");
  const auto gen = cmd_gen(dir / "gyro.json", dir / "fam");
  const auto rows = cmd_analyze(dir / "fam");
  const auto direct = pairwise_difference_norms(gen.data.family, gen.data.points);
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t l = 0; l < rows.size(); ++l) {
    EXPECT_EQ(rows[l].identity_gap, direct[l].identity_gap);
    EXPECT_EQ(rows[l].reference_gap, direct[l].reference_gap);
    EXPECT_LT(rows[l].reference_gap, 0.1 * rows[l].identity_gap);
  }
}

TEST(CmdAnalyze, MismatchedPointsAreUsageErrors) {
  ScratchDir dir("an");
  write_file(dir / "penzl.json", R"({"generator": "penzl", "n4": 10})");
  cmd_gen(dir / "penzl.json", dir / "fam");
  write_file(dir / "pts.json", R"([{"values": [1, 2, 3]}])");
  EXPECT_THROW(cmd_analyze(dir / "fam", dir / "pts.json"), UsageError);
  EXPECT_THROW(cmd_analyze(dir / "nofam"), UsageError);
}

// config

TEST(Config, RejectsUnknownKeysAndBadEnums) {
  EXPECT_THROW(parse_experiment(Json{{"model", {{"generator", "gyro"}}}, {"solvr", "gcro"}}), UsageError);
  EXPECT_THROW(parse_experiment(Json{{"model", {{"generator", "gyro"}}}, {"solver", "cg"}}), UsageError);
  EXPECT_THROW(parse_experiment(Json{{"model", {{"generator", "gyro"}}}, {"precond", "ilu"}}), UsageError);
  EXPECT_THROW(parse_experiment(Json{{"model", {{"family_dir", "/nonexistent/dir"}}}}), UsageError);
  EXPECT_THROW(parse_experiment(Json{{"solver", "gcro"}}), UsageError);
  EXPECT_THROW(parse_experiment(Json{{"model", {{"generator", "gyro"}}}, {"threads", 0}}), UsageError);
}

TEST(Config, HashTracksResultAffectingSettings) {
  const Json base{{"model", {{"generator", "gyro"}, {"n", 100}}}, {"solver", "gcro"}};
  const auto a = parse_experiment(base);
  auto j = base;
  j["output"] = "elsewhere";
  EXPECT_EQ(config_hash(a), config_hash(parse_experiment(j)));
  j = base;
  j["solver"] = "block-gcro";
  EXPECT_NE(config_hash(a), config_hash(parse_experiment(j)));
  j = base;
  j["seed"] = 9;
  EXPECT_NE(config_hash(a), config_hash(parse_experiment(j)));
}

// run

TEST(CmdRun, IdentityFamilyWithoutPreconditionerTakesOneIteration) {
  ScratchDir dir("run");
  ExperimentConfig c;
  c.model.generator = "identity";
  c.model.spec = Json{{"n", 25}};
  c.precond = parse_preconditioner_choice("none");
  c.output = dir / "out";
  for (const auto solver : {SolverKind::gcro, SolverKind::block_gcro}) {
    c.solver = solver;
    const auto rec = cmd_run(c);
    ASSERT_FALSE(rec.systems.empty());
    for (const auto& s : rec.systems) {
      EXPECT_TRUE(s.converged);
      EXPECT_EQ(s.iterations, s.calls) << "level " << s.level;
    }
    EXPECT_EQ(rec.totals.failures, 0);
    EXPECT_EQ(rec.steps[0].precond_kind, "none");
  }
}

TEST(CmdRun, WritesReportsWithHashAndSeed) {
  ScratchDir dir("run");
  auto c = gyro_config(dir / "out", SolverKind::block_gcro, "spai-update-first", 300);
  c.seed = 42;
  const auto rec = cmd_run(c);
  for (const auto* f : {"report.json", "report.csv", "summary.txt"}) EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  const auto j = io::read_json(dir / "out" / "report.json");
  EXPECT_EQ(j["config_hash"], config_hash(c));
  EXPECT_EQ(j["seed"], 42);
  const auto summary = slurp(dir / "out" / "summary.txt");
  EXPECT_NE(summary.find(config_hash(c)), std::string::npos);
  EXPECT_NE(summary.find("Sum:"), std::string::npos);
  EXPECT_NE(summary.find("Total time:"), std::string::npos);
  EXPECT_EQ(rec.steps.size(), 4u);
  EXPECT_EQ(rec.steps[0].precond_kind, "spai");
  EXPECT_EQ(rec.steps[1].precond_kind, "update-first");
  EXPECT_EQ(rec.totals.calls, 8);
  EXPECT_EQ(rec.totals.systems, 28);
  EXPECT_GT(rec.reduced_order, 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "reduced" / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "out" / "preconditioners" / "step4.json"));
}

TEST(CmdRun, SameConfigTwiceIsDeterministic) {
  ScratchDir dir("run");
  auto a = gyro_config(dir / "a", SolverKind::block_gcro, "spai-update-second", 300);
  auto b = a;
  b.output = dir / "b";
  const auto ra = cmd_run(a), rb = cmd_run(b);
  ASSERT_EQ(ra.systems.size(), rb.systems.size());
  for (std::size_t k = 0; k < ra.systems.size(); ++k) {
    EXPECT_EQ(ra.systems[k].iterations, rb.systems[k].iterations);
    EXPECT_EQ(ra.systems[k].matvecs, rb.systems[k].matvecs);
    EXPECT_EQ(ra.systems[k].max_final_residual, rb.systems[k].max_final_residual);
  }
  const auto files = mtx_files(dir / "a");
  ASSERT_EQ(files, mtx_files(dir / "b"));
  EXPECT_FALSE(files.empty());
  for (const auto& f : files) EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  EXPECT_FALSE(slurp(dir / "a" / "report.csv").empty());
}

TEST(CmdRun, UpdateBuildsFasterThanFreshSpai) {
  ScratchDir dir("run");
  const auto spai = cmd_run(gyro_config(dir / "s", SolverKind::block_gcro, "spai", 1500));
  const auto upd = cmd_run(gyro_config(dir / "u", SolverKind::block_gcro, "spai-update-first", 1500));
  for (std::size_t l = 1; l < 4; ++l) {
    EXPECT_LT(upd.steps[l].build_seconds, spai.steps[l].build_seconds) << "step " << l + 1;
    EXPECT_EQ(upd.steps[l].precond_kind, "update-first");
    EXPECT_EQ(spai.steps[l].precond_kind, "spai");
  }
}

TEST(CmdRun, PointOverrideMustMatchFamily) {
  ScratchDir dir("run");
  auto c = gyro_config(dir / "out", SolverKind::gcro, "none", 50);
  c.points = std::vector<ExpansionPoint>{ExpansionPoint{{1.0, 2.0}, "bad"}};
  EXPECT_THROW(cmd_run(c), UsageError);
}

// Report round trips

TEST(Report, JsonRoundTripReproducesRecord) {
  ScratchDir dir("rep");
  auto c = gyro_config(dir / "out", SolverKind::gcro, "spai-update-second", 200);
  c.compute_quality = true;
  const auto rec = cmd_run(c);
  EXPECT_TRUE(rec.steps[1].quality.has_value());
  EXPECT_EQ(load_run(dir / "out"), rec);
  EXPECT_EQ(load_run(dir / "out" / "report.json"), rec);
}

TEST(Report, CsvRoundTripReproducesSystems) {
  ScratchDir dir("rep");
  const auto rec = cmd_run(gyro_config(dir / "out", SolverKind::block_gcro, "spai", 200));
  EXPECT_EQ(systems_from_csv(slurp(dir / "out" / "report.csv")), rec.systems);
}

TEST(Report, CsvQuotesAwkwardLabels) {
  SystemRecord s;
  s.step = 2;
  s.point = "s=1,\"p\"=2";
  s.level = 1;
  s.solve_seconds = 0.1;
  s.max_final_residual = 1.0 / 3.0;
  s.status = "converged";
  EXPECT_EQ(systems_from_csv(systems_to_csv({s})), std::vector<SystemRecord>{s});
}

TEST(Report, RejectsForeignJson) {
  EXPECT_THROW(run_from_json(Json{{"format", "something-else"}}), io::FormatError);
}

// compare

TEST(CmdCompare, RunAgainstItselfSavesNothing) {
  ScratchDir dir("cmp");
  cmd_run(gyro_config(dir / "a", SolverKind::block_gcro, "spai-update-first", 200));
  const auto c = cmd_compare(dir / "a", dir / "a", dir / "out");
  EXPECT_EQ(saving_percent(double(c.iterations_a), double(c.iterations_b)), 0.0);
  for (const auto& d : c.steps) {
    EXPECT_EQ(d.iterations_a, d.iterations_b);
    EXPECT_EQ(saving_percent(d.build_seconds_a, d.build_seconds_b), 0.0);
  }
  const auto j = io::read_json(dir / "out" / "compare.json");
  EXPECT_EQ(j["iterations_saving_pct"], 0.0);
  EXPECT_TRUE(fs::exists(dir / "out" / "compare.csv"));
}

TEST(CmdCompare, GcroVersusBlockGcroReportsIterationSaving) {
  ScratchDir dir("cmp");
  const auto a = cmd_run(gyro_config(dir / "a", SolverKind::gcro, "spai", 400));
  const auto b = cmd_run(gyro_config(dir / "b", SolverKind::block_gcro, "spai", 400));
  const auto c = cmd_compare(dir / "a", dir / "b");
  EXPECT_EQ(c.iterations_a, a.totals.iterations);
  EXPECT_EQ(c.iterations_b, b.totals.iterations);
  for (const auto& d : c.steps) {
    EXPECT_EQ(d.iterations_a, step_iterations(a, d.step));
    EXPECT_EQ(d.iterations_b, step_iterations(b, d.step));
  }
  const double expect = 100.0 * double(a.totals.iterations - b.totals.iterations) / double(a.totals.iterations);
  EXPECT_DOUBLE_EQ(to_json(c)["iterations_saving_pct"].get<double>(), expect);
  EXPECT_GT(expect, 0.0);
}

TEST(CmdCompare, MismatchedFamiliesAreRejected) {
  ScratchDir dir("cmp");
  cmd_run(gyro_config(dir / "a", SolverKind::gcro, "none", 100));
  cmd_run(gyro_config(dir / "b", SolverKind::gcro, "none", 120));
  EXPECT_THROW(cmd_compare(dir / "a", dir / "b"), UsageError);
  EXPECT_THROW(cmd_compare(dir / "a", dir / "missing"), UsageError);
}

TEST(SavingPercent, Arithmetic) {
  EXPECT_EQ(saving_percent(200.0, 50.0), 75.0);
  EXPECT_EQ(saving_percent(0.0, 0.0), 0.0);
  EXPECT_EQ(saving_percent(10.0, 20.0), -100.0);
}
