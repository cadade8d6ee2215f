#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "ipsolve/bench.hpp"

using namespace ipsolve;
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ipsolve_test_" + name);
  fs::remove_all(p);
  return p;
}

bool same_bits(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

void expect_rows_equal(const std::vector<StepRow>& a, const std::vector<StepRow>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].step, b[i].step);
    EXPECT_TRUE(same_bits(a[i].time_s, b[i].time_s));
    EXPECT_EQ(a[i].iterations, b[i].iterations);
    EXPECT_TRUE(same_bits(a[i].alpha_min, b[i].alpha_min));
    EXPECT_TRUE(same_bits(a[i].alpha_mean, b[i].alpha_mean));
    EXPECT_TRUE(same_bits(a[i].beta_final, b[i].beta_final));
    EXPECT_EQ(a[i].projected_iters, b[i].projected_iters);
    EXPECT_EQ(a[i].chol_failures, b[i].chol_failures);
    EXPECT_TRUE(same_bits(a[i].criterion_value, b[i].criterion_value));
    EXPECT_TRUE(same_bits(a[i].energy, b[i].energy));
    EXPECT_TRUE(same_bits(a[i].wall_ms, b[i].wall_ms));
  }
}

std::vector<StepRow> sample_rows() {
  return {{0, 0.0167, 3, 0.5, 0.8333333333333334, kNaN, 1, 2, 1.2345678901234567e-3, -12.75, 3.25},
          {1, 0.0334, 0, kNaN, kNaN, 0.125, 0, 0, 0.1, 1e-300, 0.0}};
}

RunConfig tiny_config() {
  RunConfig c;
  c.scene = "swinging-beam-desk";
  c.subdivisions = std::array<int, 3>{2, 1, 1};
  c.duration = 0.1;
  c.tolerance = 0.01;
  return c;
}

#ifdef IPSOLVE_CLI
int run_cli(const std::string& args) {
  const int status = std::system((std::string(IPSOLVE_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

}  // namespace

TEST(SceneCatalog, FullScaleParameters) {
  const Scene swing = find_scene("swinging-beam");
  EXPECT_DOUBLE_EQ(swing.dt, 0.0167);
  EXPECT_DOUBLE_EQ(swing.material.youngs_modulus, 4e5);
  EXPECT_DOUBLE_EQ(swing.material.poisson_ratio, 0.4);
  EXPECT_DOUBLE_EQ(swing.material.density, 1000.0);
  EXPECT_DOUBLE_EQ(swing.duration, 6.0);

  const Scene twist = find_scene("twisting-beam");
  EXPECT_DOUBLE_EQ(twist.material.youngs_modulus, 1e7);
  EXPECT_DOUBLE_EQ(twist.material.poisson_ratio, 0.49);
  EXPECT_DOUBLE_EQ(twist.penalty, 1e8);
  EXPECT_NEAR(twist.dt, 0.0333, 1e-4);
  EXPECT_NEAR(find_scene("twisting-beam-large-dt").dt, 0.333, 1e-3);

  const Scene box = find_scene("compressing-box");
  EXPECT_DOUBLE_EQ(box.material.youngs_modulus, 1e5);
  EXPECT_DOUBLE_EQ(box.material.poisson_ratio, 0.4);
  EXPECT_DOUBLE_EQ(box.penalty, 1e10);
  EXPECT_DOUBLE_EQ(box.dt, 0.01);
}

TEST(SceneCatalog, DeskVariants) {
  const Scene desk = find_scene("swinging-beam-desk");
  EXPECT_EQ(desk.subdivisions, (std::array<int, 3>{8, 4, 4}));
  EXPECT_DOUBLE_EQ(desk.duration, 2.0);
  EXPECT_EQ(desk.num_steps(), 120);
  const Scene full = find_scene("swinging-beam");
  EXPECT_DOUBLE_EQ(desk.dt, full.dt);
  EXPECT_DOUBLE_EQ(desk.material.youngs_modulus, full.material.youngs_modulus);
  for (const Scene& s : scene_catalog()) {
    if (s.name.size() < 5 || s.name.substr(s.name.size() - 5) != "-desk") continue;
    const auto& n = s.subdivisions;
    int vertices = (n[0] + 1) * (n[1] + 1) * (n[2] + 1);
    if (s.element == ElementKind::P2) vertices = (2 * n[0] + 1) * (2 * n[1] + 1) * (2 * n[2] + 1);
    EXPECT_LE(vertices, 6000) << s.name;
  }
  EXPECT_THROW(find_scene("no-such-scene"), std::invalid_argument);
}

TEST(SceneCatalog, TwistTrajectoryIsContinuousAndClampsLeftFace) {
  const Scene s = find_scene("twisting-beam-desk");
  const TetMesh m = build_mesh(s);
  const BoundarySpec b = build_boundary(s, m, BoundaryMode::Penalty);
  ASSERT_TRUE(b.target);
  for (int v : b.constrained.indices()) {
    const Vec3 x = m.vertex(v);
    EXPECT_LT(b.target(x, 0.0).norm(), 1e-14);
    EXPECT_LT((b.target(x, 0.5) - b.target(x, 0.5 + 1e-7)).norm(), 1e-5);
    if (x.x() < 1e-9) EXPECT_EQ(b.target(x, 1.0).norm(), 0.0);
  }
}

TEST(SceneCatalog, CompressionReachesEightyFivePercent) {
  const Scene s = find_scene("compressing-box-desk");
  const TetMesh m = build_mesh(s);
  const BoundarySpec b = build_boundary(s, m, BoundaryMode::Penalty);
  double max_drop = 0.0;
  for (int v : b.constrained.indices()) {
    const Vec3 x = m.vertex(v);
    EXPECT_LT(b.target(x, 0.0).norm(), 1e-14);
    if (std::abs(x.y() - s.extent.y()) < 1e-9) max_drop = std::max(max_drop, -b.target(x, s.duration).y());
    if (x.y() < 1e-9) EXPECT_EQ(b.target(x, s.duration).y(), 0.0);
  }
  EXPECT_NEAR(max_drop, 0.85 * s.extent.y(), 1e-12);
}

TEST(RunLogCsv, RoundTripIsBitIdentical) {
  const std::vector<StepRow> rows = sample_rows();
  const std::string text = steps_to_csv(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "step,time_s,iterations,alpha_min,alpha_mean,beta_final,projected_iters,chol_failures,criterion_value,"
            "energy,wall_ms");
  expect_rows_equal(steps_from_csv(text), rows);
  EXPECT_EQ(steps_to_csv(steps_from_csv(text)), text);
}

TEST(RunLogCsv, SchemaErrorsNameTheColumn) {
  const std::string good = steps_to_csv(sample_rows());
  auto message = [](const std::string& text) {
    try {
      steps_from_csv(text);
    } catch (const std::runtime_error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  std::string renamed = good;
  renamed.replace(renamed.find("alpha_mean"), 10, "alpha_avg_");
  EXPECT_NE(message(renamed).find("alpha_mean"), std::string::npos);

  std::string missing = good;
  missing.replace(missing.find(",wall_ms"), 8, "");
  EXPECT_NE(message(missing).find("wall_ms"), std::string::npos);

  std::string bad_cell = good;
  const std::size_t row = bad_cell.find('\n') + 1;
  bad_cell.replace(row, 1, "x");
  EXPECT_NE(message(bad_cell).find("step"), std::string::npos);

  std::string fractional = good;
  const std::size_t iters = fractional.find(",3,", row);
  fractional.replace(iters, 3, ",3.5,");
  EXPECT_NE(message(fractional).find("iterations"), std::string::npos);
}

TEST(RunLogJson, SummaryAndDirectoryRoundTrip) {
  RunLog log;
  log.header = {{"config", {{"scene", "x"}}}, {"version", "test"}};
  log.rows = sample_rows();
  log.summary.steps_planned = 5;
  log.summary.failure_reason = "line_search_failure";
  log.summary.failed_step = 1;
  log.summary.failures = 1;
  refresh_summary(log);
  EXPECT_EQ(log.summary.total_iterations, 3);
  EXPECT_EQ(log.summary.steps_completed, 1);
  EXPECT_EQ(log.summary.total_chol_failures, 2);
  EXPECT_DOUBLE_EQ(log.summary.mean_iterations, 1.5);

  const fs::path dir = scratch_dir("runlog");
  write_run_log(log, dir);
  EXPECT_TRUE(fs::exists(dir / "steps.csv"));
  EXPECT_TRUE(fs::exists(dir / "run.json"));
  const RunLog back = read_run_log(dir);
  EXPECT_EQ(back.header, log.header);
  expect_rows_equal(back.rows, log.rows);
  EXPECT_EQ(summary_to_json(back.summary), summary_to_json(log.summary));
  fs::remove_all(dir);
}

TEST(Config, NamesRoundTrip) {
  for (auto k : {SolverVariant::Kind::Newton, SolverVariant::Kind::ProjectedNewton, SolverVariant::Kind::PodNewton,
                 SolverVariant::Kind::KineticNewton}) {
    EXPECT_EQ(parse_solver(to_string(k)), k);
  }
  EXPECT_EQ(parse_solver("pod"), SolverVariant::Kind::PodNewton);
  EXPECT_EQ(parse_line_search("armijo"), LineSearchKind::StandardArmijo);
  EXPECT_EQ(parse_criterion("scaled"), ConvergenceCriterion::Kind::ScaledResidual);
  EXPECT_EQ(parse_projection("element"), ProjectionMode::PerElementNumerical);
  EXPECT_EQ(parse_boundary("penalty"), BoundaryMode::Penalty);
  EXPECT_EQ(parse_element("p2"), ElementKind::P2);
  EXPECT_EQ(parse_material("snh"), MaterialKind::StableNeoHookean);
  EXPECT_EQ(parse_mass_inverse("diagonal"), MassInverse::DiagonalApprox);
  EXPECT_EQ(parse_sweep_axis("boundary-mode"), SweepAxis::BoundaryMode);
  EXPECT_THROW(parse_solver("lbfgs"), ConfigError);
  EXPECT_THROW(parse_sweep_axis("color"), ConfigError);
}

TEST(Config, JsonMirrorsRunConfig) {
  RunConfig c = tiny_config();
  c.variant = SolverVariant::pod_newton(3);
  c.line_search = LineSearchKind::StandardArmijo;
  c.criterion = ConvergenceCriterion::Kind::StepLength;
  c.boundary = BoundaryMode::Penalty;
  c.element = ElementKind::P2;
  const RunConfig back = config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(back.variant.projected_steps, 3);

  EXPECT_THROW(config_from_json(nlohmann::json{{"sovler", "newton"}}), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"tol", -1.0}}).solver_options(), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"duration", 0.0}}).resolved_scene(), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"tol", "small"}}), ConfigError);
  // Missing keys keep the base values.
  const RunConfig partial = config_from_json(nlohmann::json{{"solver", "kn"}}, c);
  EXPECT_EQ(partial.variant.kind, SolverVariant::Kind::KineticNewton);
  EXPECT_EQ(partial.scene, c.scene);
}

TEST(Run, CompletesAndSummaryMatchesColumns) {
  const RunLog log = run(tiny_config());
  const int steps = static_cast<int>(std::ceil(0.1 / 0.0167 - 1e-9));
  EXPECT_EQ(log.summary.steps_planned, steps);
  ASSERT_EQ(static_cast<int>(log.rows.size()), steps);
  EXPECT_TRUE(log.summary.completed);
  EXPECT_EQ(log.summary.failure_reason, "none");
  long total = 0;
  for (const StepRow& r : log.rows) {
    total += r.iterations;
    EXPECT_TRUE(std::isnan(r.beta_final));
  }
  EXPECT_EQ(log.summary.total_iterations, total);
  EXPECT_DOUBLE_EQ(log.summary.mean_iterations, static_cast<double>(total) / steps);
  EXPECT_EQ(log.header["config"]["scene"], "swinging-beam-desk");
  EXPECT_TRUE(log.header.contains("mesh"));
}

TEST(Run, Reproducible) {
  RunConfig c = tiny_config();
  c.variant = SolverVariant::kinetic_newton();
  const RunLog a = run(c), b = run(c);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].iterations, b.rows[i].iterations);
    EXPECT_TRUE(same_bits(a.rows[i].alpha_mean, b.rows[i].alpha_mean));
    EXPECT_TRUE(same_bits(a.rows[i].energy, b.rows[i].energy));
    EXPECT_EQ(a.rows[i].beta_final, b.rows[i].beta_final);
  }
}

TEST(Run, StopsAtFirstFailureAndWritesLog) {
  RunConfig c = tiny_config();
  c.tolerance = 1e-12;
  c.max_iterations = 1;
  c.output_dir = scratch_dir("failing_run").string();
  const RunLog log = run(c);
  EXPECT_FALSE(log.summary.completed);
  EXPECT_EQ(log.summary.failure_reason, "max_iterations");
  EXPECT_EQ(log.summary.failed_step, 0);
  EXPECT_EQ(log.rows.size(), 1u);
  EXPECT_EQ(log.summary.steps_completed, 0);
  const RunLog back = read_run_log(c.output_dir);
  expect_rows_equal(back.rows, log.rows);
  fs::remove_all(c.output_dir);
}

TEST(Sweep, IsolatesFailingValues) {
  RunConfig base = tiny_config();
  base.output_dir = scratch_dir("sweep").string();
  const auto entries = sweep(base, SweepAxis::Solver, {"newton", "bogus", "kn"});
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_TRUE(entries[0].error.empty());
  EXPECT_FALSE(entries[1].error.empty());
  EXPECT_TRUE(entries[2].error.empty());
  EXPECT_TRUE(entries[0].log.summary.completed);
  EXPECT_TRUE(entries[2].log.summary.completed);
  EXPECT_TRUE(fs::exists(fs::path(base.output_dir) / "solver-newton" / "steps.csv"));
  EXPECT_TRUE(fs::exists(fs::path(base.output_dir) / "solver-kn" / "run.json"));
  std::ifstream in(fs::path(base.output_dir) / "sweep_summary.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), sweep_summary_csv(SweepAxis::Solver, entries));
  EXPECT_NE(ss.str().find("bogus"), std::string::npos);
  fs::remove_all(base.output_dir);
}

TEST(Sweep, ResolutionValues) {
  RunConfig base = tiny_config();
  base.duration = 0.0167;
  const auto entries = sweep(base, SweepAxis::Resolution, {"2x1x1", "3x2x2", "3x2"});
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_EQ(entries[0].log.header["mesh"]["vertices"], 12);
  EXPECT_EQ(entries[1].log.header["mesh"]["vertices"], 36);
  EXPECT_FALSE(entries[2].error.empty());
}

#ifdef IPSOLVE_CLI
TEST(Cli, ExitCodes) {
  const fs::path dir = scratch_dir("cli");
  EXPECT_EQ(run_cli("list-scenes"), 0);
  EXPECT_EQ(run_cli("run --scene swinging-beam-desk --subdivisions 2 1 1 --duration 0.05 --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "steps.csv"));
  EXPECT_EQ(run_cli("run --scene nowhere"), 3);
  EXPECT_EQ(run_cli("run --solver lbfgs"), 3);
  EXPECT_EQ(run_cli("run --scene swinging-beam-desk --subdivisions 2 1 1 --duration 0.05 --tol 1e-12 "
                    "--max-iters 1 --out " + (dir / "fail").string()),
            2);
  EXPECT_TRUE(fs::exists(dir / "fail" / "run.json"));

  std::ofstream(dir / "config.json") << R"({"scene": "swinging-beam-desk", "subdivisions": [2, 1, 1],
                                            "duration": 0.05, "solver": "pn"})";
  EXPECT_EQ(run_cli("run --config " + (dir / "config.json").string() + " --solver kn --out " + (dir / "cfg").string()),
            0);
  EXPECT_EQ(read_run_log(dir / "cfg").header["config"]["solver"], "kn");
  std::ofstream(dir / "broken.json") << R"({"scene": )";
  EXPECT_EQ(run_cli("run --config " + (dir / "broken.json").string()), 3);
  fs::remove_all(dir);
}
#endif
