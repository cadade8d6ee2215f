#include "ipsolve/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

namespace ipsolve {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kVersion = "ipsolve 0.1.0";

template <typename T>
T lookup(const std::map<std::string, T>& table, const std::string& s, const char* what) {
  const auto it = table.find(s);
  if (it != table.end()) return it->second;
  std::string names;
  for (const auto& [k, v] : table) names += (names.empty() ? "" : "|") + k;
  throw ConfigError(std::string("unknown ") + what + " '" + s + "' (expected " + names + ")");
}

template <typename T>
std::string reverse_lookup(const std::map<std::string, T>& table, T value) {
  for (const auto& [k, v] : table) {
    if (v == value) return k;
  }
  return "unknown";
}

const std::map<std::string, SolverVariant::Kind> kSolvers{{"newton", SolverVariant::Kind::Newton},
                                                          {"pn", SolverVariant::Kind::ProjectedNewton},
                                                          {"pod", SolverVariant::Kind::PodNewton},
                                                          {"kn", SolverVariant::Kind::KineticNewton}};
const std::map<std::string, LineSearchKind> kLineSearches{{"armijo", LineSearchKind::StandardArmijo},
                                                          {"robust", LineSearchKind::Robust}};
const std::map<std::string, ConvergenceCriterion::Kind> kCriteria{
    {"resnorm", ConvergenceCriterion::Kind::ResidualNorm},
    {"scaled", ConvergenceCriterion::Kind::ScaledResidual},
    {"step", ConvergenceCriterion::Kind::StepLength},
    {"accel", ConvergenceCriterion::Kind::AccelerationBalance}};
const std::map<std::string, ProjectionMode> kProjections{{"none", ProjectionMode::None},
                                                         {"element", ProjectionMode::PerElementNumerical},
                                                         {"quadrature", ProjectionMode::PerQuadratureAnalytic}};
const std::map<std::string, BoundaryMode> kBoundaries{{"direct", BoundaryMode::Direct},
                                                      {"penalty", BoundaryMode::Penalty}};
const std::map<std::string, ElementKind> kElements{{"p1", ElementKind::P1}, {"p2", ElementKind::P2}};
const std::map<std::string, MaterialKind> kMaterials{{"nh", MaterialKind::NeoHookean},
                                                     {"snh", MaterialKind::StableNeoHookean}};
const std::map<std::string, MassInverse> kMassInverses{{"exact", MassInverse::Exact},
                                                       {"diagonal", MassInverse::DiagonalApprox}};
const std::map<std::string, SweepAxis> kAxes{{"solver", SweepAxis::Solver},
                                             {"resolution", SweepAxis::Resolution},
                                             {"tolerance", SweepAxis::Tolerance},
                                             {"projection", SweepAxis::Projection},
                                             {"boundary-mode", SweepAxis::BoundaryMode}};

std::array<int, 3> parse_resolution(const std::string& s) {
  std::array<int, 3> r{};
  char x1 = 0;
  char x2 = 0;
  char extra = 0;
  if (std::sscanf(s.c_str(), "%d%c%d%c%d%c", &r[0], &x1, &r[1], &x2, &r[2], &extra) != 5 || x1 != 'x' ||
      x2 != 'x' || r[0] < 1 || r[1] < 1 || r[2] < 1) {
    throw ConfigError("resolution '" + s + "' must look like 8x4x4");
  }
  return r;
}

double parse_tolerance(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && v > 0.0 && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("tolerance '" + s + "' must be a positive number");
}

StepRow make_row(int step, double time, const StepReport& report, bool kinetic, double wall_ms) {
  StepRow row;
  row.step = step;
  row.time_s = time;
  row.iterations = report.iterations;
  const bool moved = report.iterations > 0;
  row.alpha_min = moved ? report.min_alpha() : kNaN;
  row.alpha_mean = moved ? report.mean_alpha() : kNaN;
  row.beta_final = kinetic ? report.final_beta() : kNaN;
  row.projected_iters = report.projected_iterations();
  row.chol_failures = report.factorization_failures();
  row.criterion_value = report.criterion_value;
  row.energy = report.energy;
  row.wall_ms = wall_ms;
  return row;
}

}  // namespace

SolverVariant::Kind parse_solver(const std::string& s) { return lookup(kSolvers, s, "solver"); }
LineSearchKind parse_line_search(const std::string& s) { return lookup(kLineSearches, s, "line search"); }
ConvergenceCriterion::Kind parse_criterion(const std::string& s) { return lookup(kCriteria, s, "criterion"); }
ProjectionMode parse_projection(const std::string& s) { return lookup(kProjections, s, "projection"); }
BoundaryMode parse_boundary(const std::string& s) { return lookup(kBoundaries, s, "boundary mode"); }
ElementKind parse_element(const std::string& s) { return lookup(kElements, s, "element"); }
MaterialKind parse_material(const std::string& s) { return lookup(kMaterials, s, "material"); }
MassInverse parse_mass_inverse(const std::string& s) { return lookup(kMassInverses, s, "mass inverse"); }
SweepAxis parse_sweep_axis(const std::string& s) { return lookup(kAxes, s, "sweep axis"); }

std::string to_string(SolverVariant::Kind k) { return reverse_lookup(kSolvers, k); }
std::string to_string(LineSearchKind k) { return reverse_lookup(kLineSearches, k); }
std::string to_string(ConvergenceCriterion::Kind k) { return reverse_lookup(kCriteria, k); }
std::string to_string(ProjectionMode m) { return reverse_lookup(kProjections, m); }
std::string to_string(BoundaryMode m) { return reverse_lookup(kBoundaries, m); }
std::string to_string(ElementKind k) { return reverse_lookup(kElements, k); }
std::string to_string(MaterialKind k) { return reverse_lookup(kMaterials, k); }
std::string to_string(MassInverse m) { return reverse_lookup(kMassInverses, m); }
std::string to_string(SweepAxis a) { return reverse_lookup(kAxes, a); }

Scene RunConfig::resolved_scene() const {
  Scene s;
  try {
    s = find_scene(scene);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (subdivisions) {
    for (int n : *subdivisions) {
      if (n < 1) throw ConfigError("subdivisions must be positive");
    }
    s.subdivisions = *subdivisions;
  }
  if (element) s.element = *element;
  if (duration) {
    if (!(*duration > 0.0)) throw ConfigError("duration must be positive");
    s.duration = *duration;
  }
  if (material) s.material_kind = *material;
  return s;
}

SolverOptions RunConfig::solver_options() const {
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (max_iterations < 1) throw ConfigError("max-iters must be at least 1");
  SolverOptions o;
  o.variant = variant;
  try {
    o.variant.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  o.line_search = line_search;
  o.criterion.kind = criterion;
  o.criterion.tolerance = tolerance;
  o.criterion.mass_inverse = mass_inverse;
  o.projection = projection;
  o.max_iterations = max_iterations;
  return o;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j{{"scene", c.scene},
                   {"solver", to_string(c.variant.kind)},
                   {"pod-steps", c.variant.projected_steps},
                   {"line-search", to_string(c.line_search)},
                   {"criterion", to_string(c.criterion)},
                   {"tol", c.tolerance},
                   {"mass-inverse", to_string(c.mass_inverse)},
                   {"projection", to_string(c.projection)},
                   {"max-iters", c.max_iterations},
                   {"out", c.output_dir}};
  if (c.boundary) j["bc"] = to_string(*c.boundary);
  if (c.subdivisions) j["subdivisions"] = *c.subdivisions;
  if (c.element) j["element"] = to_string(*c.element);
  if (c.duration) j["duration"] = *c.duration;
  if (c.material) j["material"] = to_string(*c.material);
  return j;
}

RunConfig config_from_json(const nlohmann::json& j, RunConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known{"scene",      "solver",     "pod-steps", "line-search",
                                              "criterion",  "tol",        "mass-inverse", "projection",
                                              "bc",         "max-iters",  "out",       "subdivisions",
                                              "element",    "duration",   "material"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  try {
    if (j.contains("scene")) c.scene = j["scene"].get<std::string>();
    if (j.contains("solver")) c.variant.kind = parse_solver(j["solver"].get<std::string>());
    if (j.contains("pod-steps")) c.variant.projected_steps = j["pod-steps"].get<int>();
    if (j.contains("line-search")) c.line_search = parse_line_search(j["line-search"].get<std::string>());
    if (j.contains("criterion")) c.criterion = parse_criterion(j["criterion"].get<std::string>());
    if (j.contains("tol")) c.tolerance = j["tol"].get<double>();
    if (j.contains("mass-inverse")) c.mass_inverse = parse_mass_inverse(j["mass-inverse"].get<std::string>());
    if (j.contains("projection")) c.projection = parse_projection(j["projection"].get<std::string>());
    if (j.contains("bc")) c.boundary = parse_boundary(j["bc"].get<std::string>());
    if (j.contains("max-iters")) c.max_iterations = j["max-iters"].get<int>();
    if (j.contains("out")) c.output_dir = j["out"].get<std::string>();
    if (j.contains("subdivisions")) c.subdivisions = j["subdivisions"].get<std::array<int, 3>>();
    if (j.contains("element")) c.element = parse_element(j["element"].get<std::string>());
    if (j.contains("duration")) c.duration = j["duration"].get<double>();
    if (j.contains("material")) c.material = parse_material(j["material"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

RunLog run(const RunConfig& config) {
  const Scene scene = config.resolved_scene();
  const SolverOptions options = config.solver_options();
  IncrementalPotential ip = build_potential(scene, config.boundary);
  const bool kinetic = config.variant.kind == SolverVariant::Kind::KineticNewton;

  RunLog log;
  log.header = {{"config", to_json(config)},
                {"version", kVersion},
                {"scene",
                 {{"name", scene.name},
                  {"extent", {scene.extent.x(), scene.extent.y(), scene.extent.z()}},
                  {"subdivisions", scene.subdivisions},
                  {"element", to_string(scene.element)},
                  {"material", to_string(scene.material_kind)},
                  {"youngs_modulus", scene.material.youngs_modulus},
                  {"poisson_ratio", scene.material.poisson_ratio},
                  {"density", scene.material.density},
                  {"dt", scene.dt},
                  {"duration", scene.duration},
                  {"penalty", ip.boundary().penalty},
                  {"boundary", to_string(ip.boundary().mode)}}},
                {"mesh",
                 {{"vertices", ip.assembler().mesh().num_vertices()},
                  {"elements", ip.assembler().mesh().num_elements()},
                  {"dofs", ip.num_dofs()},
                  {"unknowns", ip.num_unknowns()},
                  {"constrained_vertices", ip.boundary().constrained.size()}}}};
  log.summary.steps_planned = scene.num_steps();

  for (int step = 0; step < scene.num_steps(); ++step) {
    const auto start = std::chrono::steady_clock::now();
    StepResult result = solve_step(ip, options);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    log.rows.push_back(make_row(step, ip.time() + ip.time_step(), result.report, kinetic, ms));
    if (!result.report.converged) {
      log.summary.failure_reason = to_string(result.report.failure_reason);
      log.summary.failed_step = step;
      log.summary.failures = 1;
      break;
    }
    ip.advance(result.u);
  }
  log.summary.completed = log.summary.failed_step < 0;
  refresh_summary(log);
  if (!config.output_dir.empty()) write_run_log(log, config.output_dir);
  return log;
}

std::vector<SweepEntry> sweep(const RunConfig& base, SweepAxis axis, const std::vector<std::string>& values) {
  std::vector<SweepEntry> entries;
  for (const std::string& value : values) {
    SweepEntry entry;
    entry.value = value;
    try {
      RunConfig c = base;
      switch (axis) {
        case SweepAxis::Solver: c.variant.kind = parse_solver(value); break;
        case SweepAxis::Resolution: c.subdivisions = parse_resolution(value); break;
        case SweepAxis::Tolerance: c.tolerance = parse_tolerance(value); break;
        case SweepAxis::Projection: c.projection = parse_projection(value); break;
        case SweepAxis::BoundaryMode: c.boundary = parse_boundary(value); break;
      }
      if (!base.output_dir.empty()) {
        c.output_dir = (std::filesystem::path(base.output_dir) / (to_string(axis) + "-" + value)).string();
      }
      entry.log = run(c);
    } catch (const std::exception& e) {
      entry.error = e.what();
      entry.log.summary.failure_reason = "config_error";
      entry.log.summary.failures = 1;
    }
    entries.push_back(std::move(entry));
  }
  if (!base.output_dir.empty()) {
    std::filesystem::create_directories(base.output_dir);
    std::ofstream out(std::filesystem::path(base.output_dir) / "sweep_summary.csv");
    if (!out) throw std::runtime_error("cannot write sweep_summary.csv in " + base.output_dir);
    out << sweep_summary_csv(axis, entries);
  }
  return entries;
}

std::string sweep_summary_csv(SweepAxis axis, const std::vector<SweepEntry>& entries) {
  std::string out = to_string(axis) +
                    ",completed,failure_reason,steps_completed,total_iterations,mean_iterations,"
                    "total_projected_iters,total_chol_failures\n";
  char buf[64];
  for (const SweepEntry& e : entries) {
    const RunSummary& s = e.log.summary;
    std::snprintf(buf, sizeof buf, "%.17g", s.mean_iterations);
    out += e.value + ',' + (s.completed ? "true" : "false") + ',' + s.failure_reason + ',' +
           std::to_string(s.steps_completed) + ',' + std::to_string(s.total_iterations) + ',' + buf + ',' +
           std::to_string(s.total_projected_iters) + ',' + std::to_string(s.total_chol_failures) + '\n';
  }
  return out;
}

}  // namespace ipsolve
