#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace ipsolve {

/// Column order of steps.csv. Downstream plotting depends on these names.
inline const std::vector<std::string> kStepColumns{
    "step",           "time_s",         "iterations", "alpha_min", "alpha_mean", "beta_final",
    "projected_iters", "chol_failures", "criterion_value", "energy", "wall_ms"};

/// One time step. Quantities that do not apply (alpha of a 0-iteration step,
/// beta outside Kinetic Newton) are NaN.
struct StepRow {
  int step = 0;
  double time_s = 0.0;
  int iterations = 0;
  double alpha_min = 0.0;
  double alpha_mean = 0.0;
  double beta_final = 0.0;
  int projected_iters = 0;
  int chol_failures = 0;
  double criterion_value = 0.0;
  double energy = 0.0;
  double wall_ms = 0.0;
};

struct RunSummary {
  int steps_planned = 0;
  int steps_completed = 0;
  long total_iterations = 0;
  double mean_iterations = 0.0;
  long total_projected_iters = 0;
  long total_chol_failures = 0;
  double total_wall_ms = 0.0;
  bool completed = false;
  std::string failure_reason = "none";
  int failed_step = -1;
  int failures = 0;
};

/// Per-run output: `header` echoes the configuration and mesh statistics.
struct RunLog {
  nlohmann::json header = nlohmann::json::object();
  std::vector<StepRow> rows;
  RunSummary summary;
};

/// Recomputes the totals from the rows, keeping the failure fields.
void refresh_summary(RunLog& log);

std::string steps_to_csv(const std::vector<StepRow>& rows);
/// Throws std::runtime_error naming the offending column on a schema
/// mismatch or unparsable cell.
std::vector<StepRow> steps_from_csv(const std::string& text);

nlohmann::json summary_to_json(const RunSummary& summary);
RunSummary summary_from_json(const nlohmann::json& j);

/// Writes steps.csv and run.json into `dir`, creating it if needed.
void write_run_log(const RunLog& log, const std::filesystem::path& dir);
RunLog read_run_log(const std::filesystem::path& dir);

}  // namespace ipsolve
