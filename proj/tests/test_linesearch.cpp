#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ipsolve/linesearch.hpp"

using namespace ipsolve;

namespace {

// 1D energy along u + alpha du with its directional slope.
struct Line {
  std::function<double(double)> e;
  std::function<double(double)> de;
  double u;
  double du;
  EnergyOracle energy() const {
    return [*this](double a) { return e(u + a * du); };
  }
  SlopeOracle slope() const {
    return [*this](double a) -> std::optional<double> { return de(u + a * du) * du; };
  }
  double e0() const { return e(u); }
  double s0() const { return de(u) * du; }
};

Line square(double u, double du) { return {[](double x) { return x * x; }, [](double x) { return 2 * x; }, u, du}; }

}  // namespace

TEST(ApproximateDecrease, Formula) {
  const ApproximateDecrease a = approximate_decrease(0.5, -4.0, 1.0);
  EXPECT_DOUBLE_EQ(a.delta, 0.25 * (-3.0));
  EXPECT_DOUBLE_EQ(a.error, 0.25 * 5.0);
}

TEST(StandardArmijo, FullNewtonStepOnQuadratic) {
  const Line l = square(-1.0, 1.0);
  const LineSearchOutcome o = standard_armijo(l.energy(), l.e0(), l.s0());
  EXPECT_FALSE(o.failed);
  EXPECT_EQ(o.alpha, 1.0);
  EXPECT_EQ(o.evaluations, 1);
  EXPECT_EQ(o.energy, 0.0);
  // Twice the Newton step reaches x = 1 with dE = 0, which Armijo rejects.
  const Line twice = square(-1.0, 2.0);
  EXPECT_EQ(standard_armijo(twice.energy(), twice.e0(), twice.s0()).alpha, 0.5);
}

TEST(StandardArmijo, OvershootBacktracks) {
  // du = 4: alpha = 1 gives x = 3, alpha = 1/2 gives x = 1 with dE = 0 above the
  // Armijo bound, alpha = 1/4 lands on the minimizer.
  const Line two = square(-1.0, 4.0);
  EXPECT_EQ(standard_armijo(two.energy(), two.e0(), two.s0()).alpha, 0.25);
  // du = 8: x = 7, 3, 1, 0 for alpha = 1 .. 1/8.
  const Line four = square(-1.0, 8.0);
  const LineSearchOutcome o = standard_armijo(four.energy(), four.e0(), four.s0());
  EXPECT_FALSE(o.failed);
  EXPECT_EQ(o.alpha, 0.125);
  EXPECT_EQ(o.evaluations, 4);
}

TEST(StandardArmijo, InfiniteEnergyRejected) {
  const Line l = {[](double x) { return x > 0.2 ? std::numeric_limits<double>::infinity() : x * x; },
                  [](double x) { return 2 * x; }, -1.0, 2.0};
  const LineSearchOutcome o = standard_armijo(l.energy(), l.e0(), l.s0());
  EXPECT_FALSE(o.failed);
  EXPECT_LE(o.alpha, 0.5);
  EXPECT_EQ(o.alpha, 0.5);
}

TEST(StandardArmijo, FailsOnAscent) {
  const Line l = square(1.0, 2.0);
  const LineSearchOutcome o = standard_armijo(l.energy(), l.e0(), -1.0);
  EXPECT_TRUE(o.failed);
  EXPECT_EQ(o.alpha, 0.0);
  // 1, 1/2, ..., 2^-23 are >= 1e-7.
  EXPECT_EQ(o.evaluations, 24);
}

TEST(RobustBacktracking, MatchesArmijoOnWellScaledQuadratic) {
  for (double du : {2.0, 4.0, 8.0, 0.5}) {
    const Line l = square(-1.0, du);
    const LineSearchOutcome a = standard_armijo(l.energy(), l.e0(), l.s0());
    const LineSearchOutcome r = robust_backtracking(l.energy(), l.slope(), l.e0(), l.s0());
    EXPECT_EQ(a.alpha, r.alpha);
    EXPECT_FALSE(r.used_approximate_condition);
  }
}

TEST(RobustBacktracking, AcceptsUnderCancellation) {
  // E = C + q(x) with q = x^2/2 + x^4: at x0 = 0.01 the change in q is far below
  // the spacing of doubles near C. The Newton step slightly undershoots, so the
  // end slope stays negative and the approximate condition holds at alpha = 1.
  const double C = 1e16, x0 = 0.01;
  auto q = [](double x) { return 0.5 * x * x + x * x * x * x; };
  auto dq = [](double x) { return x + 4 * x * x * x; };
  const double du = -dq(x0) / (1 + 12 * x0 * x0);
  const Line l = {[&](double x) { return C + q(x); }, dq, x0, du};
  ASSERT_EQ(l.e(x0 + du) - l.e0(), 0.0);

  const LineSearchOutcome a = standard_armijo(l.energy(), l.e0(), l.s0());
  EXPECT_TRUE(a.failed);
  const LineSearchOutcome r = robust_backtracking(l.energy(), l.slope(), l.e0(), l.s0());
  EXPECT_FALSE(r.failed);
  EXPECT_EQ(r.alpha, 1.0);
  EXPECT_TRUE(r.used_approximate_condition);
  EXPECT_EQ(r.gradient_evaluations, 1);
  EXPECT_LT(r.approximate_decrease + r.error_estimate, 0.0);
}

TEST(RobustBacktracking, ExactQuadraticErrorEstimate) {
  // For E = x^2 the estimate equals alpha^2 |du^T H du| / 2 exactly and the
  // approximate decrease equals the true decrease.
  const double u = -1.0, du = 3.0;
  for (double alpha : {1.0, 0.5, 0.25}) {
    const ApproximateDecrease a = approximate_decrease(alpha, 2 * u * du, 2 * (u + alpha * du) * du);
    EXPECT_DOUBLE_EQ(a.error, 0.5 * alpha * alpha * 2 * du * du);
    EXPECT_NEAR(a.delta, (u + alpha * du) * (u + alpha * du) - u * u, 1e-14);
  }
}

TEST(RobustBacktracking, SkipsApproximateBranchForLargeChanges) {
  int slope_calls = 0;
  const Line l = square(-1.0, 8.0);
  const SlopeOracle counted = [&](double a) -> std::optional<double> {
    ++slope_calls;
    return l.slope()(a);
  };
  robust_backtracking(l.energy(), counted, l.e0(), l.s0());
  // dE at alpha = 1, 1/2 is 48 and 8, both above 0.1 |E0|; at 1/4 dE = 0.
  EXPECT_EQ(slope_calls, 1);
}

TEST(RobustBacktracking, NoGradientAtInfiniteEnergy) {
  int slope_calls = 0;
  const Line l = {[](double x) { return x > 0.2 ? std::numeric_limits<double>::infinity() : 1e16 + x * x; },
                  [](double x) { return 2 * x; }, -1.0, 2.0};
  const SlopeOracle counted = [&](double a) -> std::optional<double> {
    EXPECT_LE(l.u + a * l.du, 0.2);
    ++slope_calls;
    return l.slope()(a);
  };
  const LineSearchOutcome o = robust_backtracking(l.energy(), counted, l.e0(), l.s0());
  // alpha = 1/2 hits the minimizer, where dE rounds to 0 and the end slope is
  // 0, so the approximate bound is exactly 0 and the step is rejected.
  EXPECT_FALSE(o.failed);
  EXPECT_EQ(o.alpha, 0.25);
  EXPECT_EQ(slope_calls, 2);
}

TEST(RobustBacktracking, DecayRates) {
  // Smooth non-quadratic energy: |eps| ~ alpha^2 and |dE_approx| ~ alpha.
  auto e = [](double x) { return std::cosh(x) + 0.3 * x * x * x; };
  auto de = [](double x) { return std::sinh(x) + 0.9 * x * x; };
  const double u = 0.7, du = -1.3;
  double sx = 0, sy1 = 0, sy2 = 0, sxx = 0, sxy1 = 0, sxy2 = 0;
  int n = 0;
  for (int k = 1; k <= 20; ++k) {
    const double alpha = std::ldexp(1.0, -k);
    const ApproximateDecrease a = approximate_decrease(alpha, de(u) * du, de(u + alpha * du) * du);
    const double x = std::log(alpha), y1 = std::log(a.error), y2 = std::log(std::abs(a.delta));
    sx += x;
    sxx += x * x;
    sy1 += y1;
    sy2 += y2;
    sxy1 += x * y1;
    sxy2 += x * y2;
    ++n;
  }
  const double d = n * sxx - sx * sx;
  EXPECT_NEAR((n * sxy1 - sx * sy1) / d, 2.0, 0.05);
  EXPECT_NEAR((n * sxy2 - sx * sy2) / d, 1.0, 0.05);
}
