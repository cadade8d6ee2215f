#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ipsolve/runlog.hpp"
#include "ipsolve/scenes.hpp"
#include "ipsolve/solvers.hpp"

namespace ipsolve {

/// Invalid configuration (unknown names, bad values). Maps to exit code 3.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string scene = "swinging-beam-desk";
  SolverVariant variant;
  LineSearchKind line_search = LineSearchKind::Robust;
  ConvergenceCriterion::Kind criterion = ConvergenceCriterion::Kind::AccelerationBalance;
  double tolerance = 1.0;
  MassInverse mass_inverse = MassInverse::Exact;
  ProjectionMode projection = ProjectionMode::PerQuadratureAnalytic;
  std::optional<BoundaryMode> boundary;  // scene default when empty
  int max_iterations = 1000;
  std::string output_dir;                // nothing is written when empty

  // Scene overrides.
  std::optional<std::array<int, 3>> subdivisions;
  std::optional<ElementKind> element;
  std::optional<double> duration;
  std::optional<MaterialKind> material;

  /// Catalog scene with the overrides applied. Throws ConfigError.
  Scene resolved_scene() const;
  SolverOptions solver_options() const;
};

// Name <-> enum mappings used by the CLI and the config file.
SolverVariant::Kind parse_solver(const std::string& s);
LineSearchKind parse_line_search(const std::string& s);
ConvergenceCriterion::Kind parse_criterion(const std::string& s);
ProjectionMode parse_projection(const std::string& s);
BoundaryMode parse_boundary(const std::string& s);
ElementKind parse_element(const std::string& s);
MaterialKind parse_material(const std::string& s);
MassInverse parse_mass_inverse(const std::string& s);
std::string to_string(SolverVariant::Kind k);
std::string to_string(LineSearchKind k);
std::string to_string(ConvergenceCriterion::Kind k);
std::string to_string(ProjectionMode m);
std::string to_string(BoundaryMode m);
std::string to_string(ElementKind k);
std::string to_string(MaterialKind k);
std::string to_string(MassInverse m);

nlohmann::json to_json(const RunConfig& config);
/// Missing keys keep the values already in `base`. Throws ConfigError.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

/// Steps the scene to its end time or the first solver failure. Writes the
/// log when output_dir is set.
RunLog run(const RunConfig& config);

enum class SweepAxis { Solver, Resolution, Tolerance, Projection, BoundaryMode };
SweepAxis parse_sweep_axis(const std::string& s);
std::string to_string(SweepAxis axis);

struct SweepEntry {
  std::string value;
  RunLog log;
  std::string error;  // config error for this value, empty otherwise
};

/// One run per value. Resolution values are "NXxNYxNZ". Each run writes
/// into output_dir/<axis>-<value>, and sweep_summary.csv collects the
/// summaries. A failing run does not stop the sweep.
std::vector<SweepEntry> sweep(const RunConfig& base, SweepAxis axis, const std::vector<std::string>& values);
std::string sweep_summary_csv(SweepAxis axis, const std::vector<SweepEntry>& entries);

}  // namespace ipsolve
