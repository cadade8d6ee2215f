#include "ipsolve/linesearch.hpp"

#include <cmath>
#include <limits>

#include "ipsolve/potential.hpp"

namespace ipsolve {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

LineSearchOutcome search(const EnergyOracle& energy, const SlopeOracle* slope, double energy0, double slope0,
                         double alpha_max) {
  LineSearchOutcome out;
  out.approximate_decrease = kNaN;
  out.error_estimate = kNaN;
  double alpha = alpha_max;
  for (int k = 0; k <= kMaxHalvings; ++k, alpha *= 0.5) {
    if (alpha < kMinStep) break;
    const double e = energy(alpha);
    ++out.evaluations;
    if (!std::isfinite(e)) continue;
    const double delta = e - energy0;
    const double bound = kArmijoC * alpha * slope0;
    if (delta <= bound) {
      out.alpha = alpha;
      out.energy = e;
      return out;
    }
    if (slope == nullptr || std::abs(delta) > 0.1 * std::abs(energy0)) continue;
    const auto s = (*slope)(alpha);
    ++out.gradient_evaluations;
    if (!s || !std::isfinite(*s)) continue;
    const ApproximateDecrease approx = approximate_decrease(alpha, slope0, *s);
    if (approx.delta + approx.error <= bound) {
      out.alpha = alpha;
      out.energy = e;
      out.used_approximate_condition = true;
      out.approximate_decrease = approx.delta;
      out.error_estimate = approx.error;
      return out;
    }
  }
  out.failed = true;
  out.alpha = 0.0;
  out.energy = energy0;
  return out;
}

}  // namespace

ApproximateDecrease approximate_decrease(double alpha, double slope_start, double slope_end) {
  return {0.5 * alpha * (slope_end + slope_start), 0.5 * alpha * std::abs(slope_end - slope_start)};
}

LineSearchOutcome standard_armijo(const EnergyOracle& energy, double energy0, double slope0, double alpha_max) {
  return search(energy, nullptr, energy0, slope0, alpha_max);
}

LineSearchOutcome robust_backtracking(const EnergyOracle& energy, const SlopeOracle& slope, double energy0,
                                      double slope0, double alpha_max) {
  return search(energy, &slope, energy0, slope0, alpha_max);
}

LineSearchOutcome line_search(LineSearchKind kind, const Objective& objective, const Vector& u, const Vector& du,
                              double energy0, double slope0, double alpha_max) {
  const EnergyOracle energy = [&](double alpha) { return objective.energy(u + alpha * du); };
  if (kind == LineSearchKind::StandardArmijo) return standard_armijo(energy, energy0, slope0, alpha_max);
  const SlopeOracle slope = [&](double alpha) -> std::optional<double> {
    auto g = objective.gradient(u + alpha * du);
    if (!g) return std::nullopt;
    return g->dot(du);
  };
  return robust_backtracking(energy, slope, energy0, slope0, alpha_max);
}

}  // namespace ipsolve
