#include "ipsolve/runlog.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ipsolve {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& cell, const std::string& column) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (cell.empty() || end != begin + cell.size()) {
    throw std::runtime_error("steps.csv: column '" + column + "' has non-numeric value '" + cell + "'");
  }
  return v;
}

int parse_int(const std::string& cell, const std::string& column) {
  const double v = parse_double(cell, column);
  if (!std::isfinite(v) || v != std::floor(v)) {
    throw std::runtime_error("steps.csv: column '" + column + "' expects an integer, got '" + cell + "'");
  }
  return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

void refresh_summary(RunLog& log) {
  RunSummary& s = log.summary;
  s.steps_completed = static_cast<int>(log.rows.size()) - (s.failed_step >= 0 ? 1 : 0);
  s.total_iterations = 0;
  s.total_projected_iters = 0;
  s.total_chol_failures = 0;
  s.total_wall_ms = 0.0;
  for (const StepRow& r : log.rows) {
    s.total_iterations += r.iterations;
    s.total_projected_iters += r.projected_iters;
    s.total_chol_failures += r.chol_failures;
    s.total_wall_ms += r.wall_ms;
  }
  s.mean_iterations = log.rows.empty() ? 0.0 : static_cast<double>(s.total_iterations) / log.rows.size();
}

std::string steps_to_csv(const std::vector<StepRow>& rows) {
  std::string out;
  for (std::size_t i = 0; i < kStepColumns.size(); ++i) {
    out += (i ? "," : "") + kStepColumns[i];
  }
  out += '\n';
  for (const StepRow& r : rows) {
    out += std::to_string(r.step) + ',' + format_double(r.time_s) + ',' + std::to_string(r.iterations) + ',' +
           format_double(r.alpha_min) + ',' + format_double(r.alpha_mean) + ',' + format_double(r.beta_final) +
           ',' + std::to_string(r.projected_iters) + ',' + std::to_string(r.chol_failures) + ',' +
           format_double(r.criterion_value) + ',' + format_double(r.energy) + ',' + format_double(r.wall_ms) + '\n';
  }
  return out;
}

std::vector<StepRow> steps_from_csv(const std::string& text) {
  std::stringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("steps.csv: missing header");
  const auto header = split(line);
  for (std::size_t i = 0; i < kStepColumns.size(); ++i) {
    if (i >= header.size()) throw std::runtime_error("steps.csv: missing column '" + kStepColumns[i] + "'");
    if (header[i] != kStepColumns[i]) {
      throw std::runtime_error("steps.csv: expected column '" + kStepColumns[i] + "', found '" + header[i] + "'");
    }
  }
  if (header.size() > kStepColumns.size()) {
    throw std::runtime_error("steps.csv: unexpected column '" + header[kStepColumns.size()] + "'");
  }
  std::vector<StepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != kStepColumns.size()) {
      const std::string& col = kStepColumns[std::min(c.size(), kStepColumns.size() - 1)];
      throw std::runtime_error("steps.csv: row has " + std::to_string(c.size()) + " cells, column '" + col +
                               "' is misaligned");
    }
    StepRow r;
    r.step = parse_int(c[0], kStepColumns[0]);
    r.time_s = parse_double(c[1], kStepColumns[1]);
    r.iterations = parse_int(c[2], kStepColumns[2]);
    r.alpha_min = parse_double(c[3], kStepColumns[3]);
    r.alpha_mean = parse_double(c[4], kStepColumns[4]);
    r.beta_final = parse_double(c[5], kStepColumns[5]);
    r.projected_iters = parse_int(c[6], kStepColumns[6]);
    r.chol_failures = parse_int(c[7], kStepColumns[7]);
    r.criterion_value = parse_double(c[8], kStepColumns[8]);
    r.energy = parse_double(c[9], kStepColumns[9]);
    r.wall_ms = parse_double(c[10], kStepColumns[10]);
    rows.push_back(r);
  }
  return rows;
}

nlohmann::json summary_to_json(const RunSummary& s) {
  return {{"steps_planned", s.steps_planned},
          {"steps_completed", s.steps_completed},
          {"total_iterations", s.total_iterations},
          {"mean_iterations", s.mean_iterations},
          {"total_projected_iters", s.total_projected_iters},
          {"total_chol_failures", s.total_chol_failures},
          {"total_wall_ms", s.total_wall_ms},
          {"completed", s.completed},
          {"failure_reason", s.failure_reason},
          {"failed_step", s.failed_step},
          {"failures", s.failures}};
}

RunSummary summary_from_json(const nlohmann::json& j) {
  RunSummary s;
  s.steps_planned = j.at("steps_planned").get<int>();
  s.steps_completed = j.at("steps_completed").get<int>();
  s.total_iterations = j.at("total_iterations").get<long>();
  s.mean_iterations = j.at("mean_iterations").get<double>();
  s.total_projected_iters = j.at("total_projected_iters").get<long>();
  s.total_chol_failures = j.at("total_chol_failures").get<long>();
  s.total_wall_ms = j.at("total_wall_ms").get<double>();
  s.completed = j.at("completed").get<bool>();
  s.failure_reason = j.at("failure_reason").get<std::string>();
  s.failed_step = j.at("failed_step").get<int>();
  s.failures = j.at("failures").get<int>();
  return s;
}

void write_run_log(const RunLog& log, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "steps.csv");
    if (!csv) throw std::runtime_error("cannot write " + (dir / "steps.csv").string());
    csv << steps_to_csv(log.rows);
  }
  std::ofstream js(dir / "run.json");
  if (!js) throw std::runtime_error("cannot write " + (dir / "run.json").string());
  js << nlohmann::json{{"header", log.header}, {"summary", summary_to_json(log.summary)}}.dump(2) << '\n';
}

RunLog read_run_log(const std::filesystem::path& dir) {
  RunLog log;
  std::ifstream csv(dir / "steps.csv");
  if (!csv) throw std::runtime_error("cannot read " + (dir / "steps.csv").string());
  std::stringstream text;
  text << csv.rdbuf();
  log.rows = steps_from_csv(text.str());
  std::ifstream js(dir / "run.json");
  if (!js) throw std::runtime_error("cannot read " + (dir / "run.json").string());
  const nlohmann::json j = nlohmann::json::parse(js);
  log.header = j.at("header");
  log.summary = summary_from_json(j.at("summary"));
  return log;
}

}  // namespace ipsolve
