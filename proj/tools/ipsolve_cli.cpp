// Command line front end: run a scene, sweep one configuration axis, or list
// the scene catalog.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ipsolve/bench.hpp"

namespace {

constexpr int kExitSolverFailure = 2;
constexpr int kExitConfigError = 3;

struct Flags {
  std::string config_file;
  std::string scene;
  std::string solver;
  std::string line_search;
  std::string criterion;
  double tol = 0.0;
  std::string projection;
  std::string bc;
  int max_iters = 0;
  std::string out;
  std::vector<int> subdivisions;
  std::string element;
  double duration = 0.0;
  std::string material;
  std::string mass_inverse;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_file, "JSON file with run settings; flags override it");
  cmd->add_option("--scene", f.scene, "scene name (see list-scenes)");
  cmd->add_option("--solver", f.solver, "newton|pn|pod|kn");
  cmd->add_option("--line-search", f.line_search, "armijo|robust");
  cmd->add_option("--criterion", f.criterion, "resnorm|scaled|step|accel");
  cmd->add_option("--tol", f.tol, "criterion tolerance");
  cmd->add_option("--projection", f.projection, "element|quadrature");
  cmd->add_option("--bc", f.bc, "direct|penalty");
  cmd->add_option("--max-iters", f.max_iters, "iteration cap per time step");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--subdivisions", f.subdivisions, "grid cells along x y z")->expected(3);
  cmd->add_option("--element", f.element, "p1|p2");
  cmd->add_option("--duration", f.duration, "simulated time in seconds");
  cmd->add_option("--material", f.material, "nh|snh");
  cmd->add_option("--mass-inverse", f.mass_inverse, "exact|diagonal (accel criterion)");
}

ipsolve::RunConfig build_config(const CLI::App* cmd, const Flags& f) {
  ipsolve::RunConfig c;
  if (!f.config_file.empty()) {
    std::ifstream in(f.config_file);
    if (!in) throw ipsolve::ConfigError("cannot read config file " + f.config_file);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ipsolve::ConfigError(std::string("config file: ") + e.what());
    }
    c = ipsolve::config_from_json(j, c);
  }
  auto given = [cmd](const char* name) { return cmd->count(name) > 0; };
  if (given("--scene")) c.scene = f.scene;
  if (given("--solver")) c.variant.kind = ipsolve::parse_solver(f.solver);
  if (given("--line-search")) c.line_search = ipsolve::parse_line_search(f.line_search);
  if (given("--criterion")) c.criterion = ipsolve::parse_criterion(f.criterion);
  if (given("--tol")) c.tolerance = f.tol;
  if (given("--projection")) c.projection = ipsolve::parse_projection(f.projection);
  if (given("--bc")) c.boundary = ipsolve::parse_boundary(f.bc);
  if (given("--max-iters")) c.max_iterations = f.max_iters;
  if (given("--out")) c.output_dir = f.out;
  if (given("--subdivisions")) c.subdivisions = std::array<int, 3>{f.subdivisions[0], f.subdivisions[1], f.subdivisions[2]};
  if (given("--element")) c.element = ipsolve::parse_element(f.element);
  if (given("--duration")) c.duration = f.duration;
  if (given("--material")) c.material = ipsolve::parse_material(f.material);
  if (given("--mass-inverse")) c.mass_inverse = ipsolve::parse_mass_inverse(f.mass_inverse);
  // Validate eagerly so that config errors never start a run.
  c.resolved_scene();
  c.solver_options();
  return c;
}

void print_summary(const std::string& label, const ipsolve::RunLog& log) {
  const auto& s = log.summary;
  std::printf("%s: steps %d/%d, iterations %ld (%.3f per step), projected %ld, cholesky failures %ld, %s\n",
              label.c_str(), s.steps_completed, s.steps_planned, s.total_iterations, s.mean_iterations,
              s.total_projected_iters, s.total_chol_failures,
              s.completed ? "completed" : ("failed: " + s.failure_reason).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Newton-type solvers for implicit elastodynamics benchmarks"};
  app.require_subcommand(1);

  Flags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "simulate one scene");
  add_run_flags(run_cmd, run_flags);

  Flags sweep_flags;
  std::string axis;
  std::vector<std::string> values;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run one configuration per axis value");
  add_run_flags(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--axis", axis, "solver|resolution|tolerance|projection|boundary-mode")->required();
  sweep_cmd->add_option("--values", values, "axis values; resolutions as 8x4x4")->required();

  CLI::App* list_cmd = app.add_subcommand("list-scenes", "print the scene catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (list_cmd->parsed()) {
      for (const auto& s : ipsolve::scene_catalog()) {
        std::printf("%-24s dt=%gs T=%gs E=%g nu=%g rho=%g cells=%dx%dx%d  %s\n", s.name.c_str(), s.dt, s.duration,
                    s.material.youngs_modulus, s.material.poisson_ratio, s.material.density, s.subdivisions[0],
                    s.subdivisions[1], s.subdivisions[2], s.description.c_str());
      }
      return 0;
    }
    if (run_cmd->parsed()) {
      const ipsolve::RunConfig config = build_config(run_cmd, run_flags);
      const ipsolve::RunLog log = ipsolve::run(config);
      print_summary(config.scene, log);
      return log.summary.completed ? 0 : kExitSolverFailure;
    }
    const ipsolve::RunConfig config = build_config(sweep_cmd, sweep_flags);
    const auto sweep_axis = ipsolve::parse_sweep_axis(axis);
    const auto entries = ipsolve::sweep(config, sweep_axis, values);
    bool all_ok = true;
    for (const auto& e : entries) {
      if (!e.error.empty()) {
        std::fprintf(stderr, "%s: %s\n", e.value.c_str(), e.error.c_str());
        all_ok = false;
        continue;
      }
      print_summary(e.value, e.log);
      all_ok = all_ok && e.log.summary.completed;
    }
    return all_ok ? 0 : kExitSolverFailure;
  } catch (const ipsolve::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
