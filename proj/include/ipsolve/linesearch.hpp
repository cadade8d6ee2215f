#pragma once

#include <functional>
#include <optional>

#include "ipsolve/types.hpp"

namespace ipsolve {

class Objective;

enum class LineSearchKind { StandardArmijo, Robust };

inline constexpr double kArmijoC = 1e-4;
inline constexpr double kMinStep = 1e-7;
inline constexpr int kMaxHalvings = 60;

struct LineSearchOutcome {
  double alpha = 0.0;
  int evaluations = 0;           // energy evaluations
  int gradient_evaluations = 0;
  bool used_approximate_condition = false;
  bool failed = false;
  double energy = 0.0;           // E(u + alpha du) when accepted
  // Approximate-branch quantities at the accepted step (NaN otherwise).
  double approximate_decrease = 0.0;
  double error_estimate = 0.0;
};

/// E(u + alpha du) as a function of alpha.
using EnergyOracle = std::function<double(double alpha)>;
/// du . grad E(u + alpha du); std::nullopt if the gradient is undefined.
using SlopeOracle = std::function<std::optional<double>(double alpha)>;

/// Taylor estimate of E(u + alpha du) - E(u) from the directional
/// derivatives at both ends, with the magnitude of the first omitted term.
struct ApproximateDecrease {
  double delta = 0.0;
  double error = 0.0;
};
ApproximateDecrease approximate_decrease(double alpha, double slope_start, double slope_end);

/// Backtracking with the Armijo condition, halving from alpha_max.
/// `energy0` = E(u), `slope0` = grad E(u) . du, which must be negative.
LineSearchOutcome standard_armijo(const EnergyOracle& energy, double energy0, double slope0, double alpha_max = 1.0);

/// Armijo first; if that fails and |dE| <= 0.1 |E(u)|, accept when
/// dE_approx + |eps_est| <= c alpha slope0.
LineSearchOutcome robust_backtracking(const EnergyOracle& energy, const SlopeOracle& slope, double energy0,
                                      double slope0, double alpha_max = 1.0);

/// Runs the chosen search on an objective along du from u.
LineSearchOutcome line_search(LineSearchKind kind, const Objective& objective, const Vector& u, const Vector& du,
                              double energy0, double slope0, double alpha_max = 1.0);

}  // namespace ipsolve
