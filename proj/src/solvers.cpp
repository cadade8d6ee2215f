#include "ipsolve/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ipsolve {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Direction {
  Vector du;
  bool projected = false;
  bool fallback = false;
  int factorization_failures = 0;
  bool ok = true;
};

// Cholesky of the projected Hessian; the PN / fallback direction.
Direction projected_direction(const Objective& obj, const Vector& u, const Vector& g, ProjectionMode mode) {
  Direction d;
  d.projected = true;
  auto h = obj.hessian(u, mode);
  std::optional<SpdFactor> factor;
  if (h) factor = cholesky(*h);
  if (!factor) {
    d.factorization_failures = 1;
    d.ok = false;
    return d;
  }
  d.du = -factor->solve(g);
  return d;
}

// Exact Hessian. Cholesky is tried first so that PD systems are solved the
// same way as in the other variants.
std::optional<Vector> exact_newton_direction(const Objective& obj, const Vector& u, const Vector& g,
                                             int& factorization_failures) {
  auto h = obj.hessian(u, ProjectionMode::None);
  if (!h) return std::nullopt;
  if (auto factor = cholesky(*h)) return Vector(-factor->solve(g));
  ++factorization_failures;
  auto x = solve_indefinite(*h, g);
  if (!x) return std::nullopt;
  return Vector(-*x);
}

}  // namespace

void SolverVariant::validate() const {
  if (projected_steps < 1) throw std::invalid_argument("POD-Newton needs at least one projected step");
  if (!(shrink > 1.0)) throw std::invalid_argument("Kinetic Newton shrink factor must exceed 1");
  if (!(alpha_low > 0.0 && alpha_low < alpha_high && alpha_high <= 1.0)) {
    throw std::invalid_argument("Kinetic Newton needs 0 < alpha_low < alpha_high <= 1");
  }
}

std::string to_string(FailureReason reason) {
  switch (reason) {
    case FailureReason::None: return "none";
    case FailureReason::MaxIterations: return "max_iterations";
    case FailureReason::LineSearchFailure: return "line_search_failure";
    case FailureReason::DirectBcInversion: return "direct_bc_inversion";
    case FailureReason::FactorizationFailure: return "factorization_failure";
  }
  return "unknown";
}

int StepReport::projected_iterations() const {
  return static_cast<int>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.projected; }));
}

int StepReport::factorization_failures() const {
  int n = 0;
  for (const auto& r : records) n += r.factorization_failures;
  return n;
}

double StepReport::min_alpha() const {
  if (records.empty()) return kNaN;
  double m = records.front().alpha;
  for (const auto& r : records) m = std::min(m, r.alpha);
  return m;
}

double StepReport::mean_alpha() const {
  if (records.empty()) return kNaN;
  double s = 0.0;
  for (const auto& r : records) s += r.alpha;
  return s / static_cast<double>(records.size());
}

double StepReport::final_beta() const { return records.empty() ? 1.0 : records.back().beta; }

CriterionCheck check_convergence(const ConvergenceCriterion& c, const Objective& obj, const Vector& r,
                                 const Vector* direction) {
  if (!(c.tolerance > 0.0)) throw std::invalid_argument("convergence tolerance must be positive");
  CriterionCheck out;
  switch (c.kind) {
    case ConvergenceCriterion::Kind::ResidualNorm:
      out.value = r.norm();
      out.met = out.value <= c.tolerance;
      break;
    case ConvergenceCriterion::Kind::ScaledResidual: {
      const double scale = c.reference_force ? c.reference_force->norm() : obj.reference_force().norm();
      out.value = r.norm();
      out.met = out.value <= c.tolerance * scale;
      break;
    }
    case ConvergenceCriterion::Kind::StepLength:
      if (direction == nullptr) throw std::invalid_argument("step length criterion needs a direction");
      out.value = direction->size() == 0 ? 0.0 : direction->lpNorm<Eigen::Infinity>();
      out.met = out.value <= obj.time_step() * c.tolerance;
      break;
    case ConvergenceCriterion::Kind::AccelerationBalance: {
      const Vector a = obj.apply_mass_inverse(r, c.mass_inverse);
      out.value = a.size() == 0 ? 0.0 : a.lpNorm<Eigen::Infinity>();
      out.met = out.value <= c.tolerance;
      break;
    }
  }
  return out;
}

StepResult solve_step(const Objective& obj, const SolverOptions& opt) {
  using Kind = SolverVariant::Kind;
  opt.variant.validate();
  const bool step_criterion = opt.criterion.kind == ConvergenceCriterion::Kind::StepLength;

  StepResult result;
  StepReport& report = result.report;
  Vector u = obj.initial_guess();
  double energy = obj.energy(u);
  std::optional<Vector> g = std::isfinite(energy) ? obj.gradient(u) : std::nullopt;
  report.energy = energy;
  if (!g) {
    report.failure_reason = FailureReason::DirectBcInversion;
    report.initial_criterion_value = report.criterion_value = kNaN;
    result.u = u;
    return result;
  }
  if (!step_criterion) {
    const CriterionCheck c0 = check_convergence(opt.criterion, obj, *g);
    report.initial_criterion_value = report.criterion_value = c0.value;
    if (c0.met) {
      report.converged = true;
      result.u = u;
      return result;
    }
  } else {
    report.initial_criterion_value = report.criterion_value = kNaN;
  }

  bool project_psd = false;  // POD
  int countdown = 0;         // POD
  double beta = 1.0;         // KN

  while (true) {
    Direction dir;
    switch (opt.variant.kind) {
      case Kind::Newton: {
        int failures = 0;
        auto du = exact_newton_direction(obj, u, *g, failures);
        if (du) {
          const double slope = g->dot(*du);
          if (slope > 0.0) *du = -*du;
          if (slope != 0.0) {
            dir.du = std::move(*du);
            dir.factorization_failures = failures;
            break;
          }
        }
        dir = projected_direction(obj, u, *g, opt.projection);
        dir.fallback = true;
        dir.factorization_failures += failures;
        break;
      }
      case Kind::ProjectedNewton:
        dir = projected_direction(obj, u, *g, opt.projection);
        break;
      case Kind::PodNewton: {
        int failures = 0;
        if (!project_psd) {
          auto h = obj.hessian(u, ProjectionMode::None);
          std::optional<SpdFactor> factor;
          if (h) factor = cholesky(*h);
          if (factor) {
            dir.du = -factor->solve(*g);
            break;
          }
          failures = 1;
          countdown = opt.variant.projected_steps - 1;
          project_psd = true;
        }
        dir = projected_direction(obj, u, *g, opt.projection);
        dir.factorization_failures += failures;
        break;
      }
      case Kind::KineticNewton: {
        int failures = 0;
        for (int halvings = 0;; ++halvings) {
          auto h = obj.hessian(u, ProjectionMode::None, beta);
          std::optional<SpdFactor> factor;
          if (h) factor = cholesky(*h);
          if (factor) {
            dir.du = -factor->solve(*g);
            break;
          }
          ++failures;
          if (halvings >= kMaxHalvings) {
            dir.ok = false;
            break;
          }
          beta /= opt.variant.shrink;
        }
        dir.factorization_failures = failures;
        break;
      }
    }

    if (!dir.ok) {
      IterationRecord rec;
      rec.alpha = 0.0;
      rec.beta = beta;
      rec.projected = dir.projected;
      rec.factorization_failures = dir.factorization_failures;
      rec.criterion_value = report.criterion_value;
      rec.energy = energy;
      report.records.push_back(rec);
      report.failure_reason = FailureReason::FactorizationFailure;
      break;
    }

    if (step_criterion) {
      const CriterionCheck c = check_convergence(opt.criterion, obj, *g, &dir.du);
      report.criterion_value = c.value;
      if (std::isnan(report.initial_criterion_value)) report.initial_criterion_value = c.value;
      if (c.met) {
        report.converged = true;
        break;
      }
    }

    const double slope = g->dot(dir.du);
    const LineSearchOutcome ls = line_search(opt.line_search, obj, u, dir.du, energy, slope);
    IterationRecord rec;
    rec.beta = beta;
    rec.projected = dir.projected;
    rec.fallback = dir.fallback;
    rec.factorization_failures = dir.factorization_failures;
    rec.directional_derivative = slope;
    if (ls.failed) {
      rec.alpha = 0.0;
      rec.criterion_value = report.criterion_value;
      rec.energy = energy;
      report.records.push_back(rec);
      report.failure_reason = FailureReason::LineSearchFailure;
      break;
    }
    u += ls.alpha * dir.du;
    energy = ls.energy;
    g = obj.gradient(u);
    ++report.iterations;
    rec.alpha = ls.alpha;
    rec.approximate_acceptance = ls.used_approximate_condition;
    rec.approximate_decrease = ls.approximate_decrease;
    rec.error_estimate = ls.error_estimate;
    rec.energy = energy;
    report.energy = energy;

    bool met = false;
    if (!step_criterion) {
      const CriterionCheck c = check_convergence(opt.criterion, obj, *g);
      report.criterion_value = c.value;
      met = c.met;
    }
    rec.criterion_value = report.criterion_value;
    report.records.push_back(rec);

    if (opt.variant.kind == Kind::PodNewton) {
      project_psd = ls.alpha < 1.0 || countdown > 0;
      countdown = std::max(0, countdown - 1);
    } else if (opt.variant.kind == Kind::KineticNewton) {
      if (ls.alpha < opt.variant.alpha_low) {
        beta /= opt.variant.shrink;
      } else if (ls.alpha > opt.variant.alpha_high) {
        beta = std::min(1.0, opt.variant.shrink * beta);
      }
    }

    if (met) {
      report.converged = true;
      break;
    }
    if (report.iterations >= opt.max_iterations) {
      report.failure_reason = FailureReason::MaxIterations;
      break;
    }
  }
  result.u = std::move(u);
  return result;
}

NewtonErrorProbe newton_error_estimate_probe(const Objective& obj, const Vector& solution, const Vector& u) {
  const Vector e = solution - u;
  auto g = obj.gradient(u);
  if (!g) throw std::invalid_argument("newton_error_estimate_probe: state is inadmissible");
  int failures = 0;
  auto du = exact_newton_direction(obj, u, *g, failures);
  if (!du) throw std::runtime_error("newton_error_estimate_probe: singular Hessian");
  return {(*du - e).norm(), e.norm()};
}

}  // namespace ipsolve
