#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ipsolve/linesearch.hpp"
#include "ipsolve/potential.hpp"

namespace ipsolve {

struct SolverVariant {
  enum class Kind { Newton, ProjectedNewton, PodNewton, KineticNewton };
  Kind kind = Kind::Newton;
  int projected_steps = 4;  // POD: N
  double shrink = 2.0;      // KN
  double alpha_low = 0.3;   // KN
  double alpha_high = 0.9;  // KN

  static SolverVariant newton() { return {Kind::Newton}; }
  static SolverVariant projected_newton() { return {Kind::ProjectedNewton}; }
  static SolverVariant pod_newton(int n = 4) { return {Kind::PodNewton, n}; }
  static SolverVariant kinetic_newton() { return {Kind::KineticNewton}; }

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

struct ConvergenceCriterion {
  enum class Kind { ResidualNorm, ScaledResidual, StepLength, AccelerationBalance };
  Kind kind = Kind::AccelerationBalance;
  /// N for ResidualNorm, dimensionless for ScaledResidual, m/s for
  /// StepLength, m/s^2 for AccelerationBalance.
  double tolerance = 1.0;
  MassInverse mass_inverse = MassInverse::Exact;
  /// ScaledResidual reference; defaults to the objective's reference force.
  std::optional<Vector> reference_force;

  static ConvergenceCriterion residual_norm(double eps) { return {Kind::ResidualNorm, eps, {}, {}}; }
  static ConvergenceCriterion scaled_residual(double eps) { return {Kind::ScaledResidual, eps, {}, {}}; }
  static ConvergenceCriterion step_length(double eps) { return {Kind::StepLength, eps, {}, {}}; }
  static ConvergenceCriterion acceleration(double eps, MassInverse m = MassInverse::Exact) {
    return {Kind::AccelerationBalance, eps, m, {}};
  }
};

struct CriterionCheck {
  bool met = false;
  double value = 0.0;
};

/// Evaluates the criterion from the gradient r at the current iterate.
/// StepLength needs the unscaled direction and throws std::invalid_argument
/// without one.
CriterionCheck check_convergence(const ConvergenceCriterion& criterion, const Objective& objective,
                                 const Vector& residual, const Vector* direction = nullptr);

enum class FailureReason {
  None,
  MaxIterations,
  LineSearchFailure,
  DirectBcInversion,
  FactorizationFailure,  // projected system not positive definite
};
std::string to_string(FailureReason reason);

struct IterationRecord {
  double alpha = 0.0;
  double beta = 1.0;
  bool projected = false;
  int factorization_failures = 0;
  bool fallback = false;  // Newton fell back to a projected step
  bool approximate_acceptance = false;
  double approximate_decrease = 0.0;
  double error_estimate = 0.0;
  double directional_derivative = 0.0;
  double criterion_value = 0.0;
  double energy = 0.0;
};

struct StepReport {
  int iterations = 0;
  std::vector<IterationRecord> records;
  bool converged = false;
  FailureReason failure_reason = FailureReason::None;
  double initial_criterion_value = 0.0;
  double criterion_value = 0.0;
  double energy = 0.0;

  int projected_iterations() const;
  int factorization_failures() const;
  double min_alpha() const;
  double mean_alpha() const;
  double final_beta() const;
};

struct SolverOptions {
  SolverVariant variant;
  LineSearchKind line_search = LineSearchKind::Robust;
  ConvergenceCriterion criterion;
  ProjectionMode projection = ProjectionMode::PerQuadratureAnalytic;
  int max_iterations = 1000;
};

struct StepResult {
  Vector u;
  StepReport report;
};

/// Minimizes the objective starting from its initial guess. On failure the
/// last accepted iterate is returned with the reason set.
StepResult solve_step(const Objective& objective, const SolverOptions& options);

/// Newton step taken at u = u* - e, returned as (|du - e|, |e|).
struct NewtonErrorProbe {
  double remainder = 0.0;
  double error = 0.0;
};
NewtonErrorProbe newton_error_estimate_probe(const Objective& objective, const Vector& solution, const Vector& u);

}  // namespace ipsolve
