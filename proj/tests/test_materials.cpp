#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include "ipsolve/linalg.hpp"
#include "ipsolve/materials.hpp"

using namespace ipsolve;

namespace {

const MaterialParams kRubber = MaterialParams::make(4e5, 0.4, 1000.0);
const MaterialModel kNH{MaterialKind::NeoHookean, kRubber};
const MaterialModel kSNH{MaterialKind::StableNeoHookean, kRubber};

// Random F with det F in [0.3, 3].
Mat3 random_f(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  while (true) {
    Mat3 F = Mat3::Identity();
    for (int i = 0; i < 9; ++i) F.data()[i] += u(rng);
    const double J = F.determinant();
    if (J >= 0.3 && J <= 3.0) return F;
  }
}

Mat3 fd_pk1(const MaterialModel& m, const Mat3& F) {
  const double h = 1e-6 * F.norm();
  Mat3 P;
  for (int i = 0; i < 9; ++i) {
    Mat3 Fp = F, Fm = F;
    Fp.data()[i] += h;
    Fm.data()[i] -= h;
    P.data()[i] = (energy_density(m, Fp) - energy_density(m, Fm)) / (2 * h);
  }
  return P;
}

Mat9 fd_dpdf(const MaterialModel& m, const Mat3& F) {
  const double h = 1e-6 * F.norm();
  Mat9 H;
  for (int i = 0; i < 9; ++i) {
    Mat3 Fp = F, Fm = F;
    Fp.data()[i] += h;
    Fm.data()[i] -= h;
    H.col(i) = flatten(pk1(m, Fp) - pk1(m, Fm)) / (2 * h);
  }
  return H;
}

double min_eig(const Mat9& H) { return Eigen::SelfAdjointEigenSolver<Mat9>(H).eigenvalues().minCoeff(); }

}  // namespace

TEST(MaterialParams, LameConstants) {
  const MaterialParams p = MaterialParams::make(1e7, 0.25, 1000.0);
  EXPECT_DOUBLE_EQ(p.mu(), 4e6);
  EXPECT_DOUBLE_EQ(p.lambda(), 4e6);
  EXPECT_THROW(MaterialParams::make(0.0, 0.3, 1.0), std::invalid_argument);
  EXPECT_THROW(MaterialParams::make(1.0, 0.5, 1.0), std::invalid_argument);
  EXPECT_THROW(MaterialParams::make(1.0, 0.3, -1.0), std::invalid_argument);
}

TEST(Energy, RestStateAndRotation) {
  const Mat3 R = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  for (const auto& m : {kNH, kSNH}) {
    EXPECT_NEAR(energy_density(m, Mat3::Identity()), 0.0, 1e-9);
    EXPECT_LT(pk1(m, Mat3::Identity()).norm(), 1e-9);
    EXPECT_LT(pk1(m, R).norm(), 1e-8 * kRubber.mu());
    std::mt19937 rng(3);
    const Mat3 F = random_f(rng);
    EXPECT_NEAR(energy_density(m, R * F), energy_density(m, F), 1e-9 * std::abs(energy_density(m, F)));
  }
}

TEST(Energy, NeoHookeanBarrier) {
  const Mat3 nearly_flat = Eigen::Vector3d(1.0, 1.0, 1e-12).asDiagonal();
  EXPECT_GT(energy_density(kNH, nearly_flat), 1e6);
  const Mat3 inverted = -Mat3::Identity();
  EXPECT_TRUE(std::isinf(energy_density(kNH, inverted)));
  EXPECT_TRUE(pk1(kNH, inverted).hasNaN());
  EXPECT_TRUE(dpdf(kNH, inverted).hasNaN());
  EXPECT_FALSE(admissible(kNH, inverted));
}

TEST(Energy, StableNeoHookeanInversionSafe) {
  const Mat3 inverted = -Mat3::Identity();
  EXPECT_TRUE(std::isfinite(energy_density(kSNH, inverted)));
  EXPECT_TRUE(pk1(kSNH, inverted).allFinite());
  EXPECT_TRUE(dpdf(kSNH, inverted).allFinite());
}

TEST(Derivatives, ChainAgainstFiniteDifferences) {
  std::mt19937 rng(11);
  for (const auto& m : {kNH, kSNH}) {
    for (int trial = 0; trial < 100; ++trial) {
      const Mat3 F = random_f(rng);
      const Mat3 P = pk1(m, F);
      EXPECT_LT((P - fd_pk1(m, F)).norm(), 1e-5 * P.norm()) << "trial " << trial;
      const Mat9 H = dpdf(m, F);
      EXPECT_LT((H - fd_dpdf(m, F)).norm(), 1e-5 * H.norm()) << "trial " << trial;
      EXPECT_LT((H - H.transpose()).norm(), 1e-14 * H.norm());
    }
  }
}

TEST(Dpdf, RestIsPsdCompressionIsNot) {
  EXPECT_GE(min_eig(dpdf(kNH, Mat3::Identity())), -1e-9);
  const Mat3 squashed = Eigen::Vector3d(0.2, 1.0, 1.0).asDiagonal();
  EXPECT_LT(min_eig(dpdf(kNH, squashed)), 0.0);
}

TEST(Projection, AnalyticEigensystemReconstructsHessian) {
  std::mt19937 rng(5);
  for (const auto& m : {kNH, kSNH}) {
    for (int trial = 0; trial < 50; ++trial) {
      const Mat3 F = random_f(rng);
      const IsotropicEigensystem eig = analytic_eigensystem(m, F);
      const Mat9 H = dpdf(m, F);
      EXPECT_LT((eig.vectors.transpose() * eig.vectors - Mat9::Identity()).norm(), 1e-10);
      const Mat9 rebuilt = eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
      EXPECT_LT((rebuilt - H).norm(), 1e-9 * H.norm());
    }
  }
}

TEST(Projection, ClosedFormMatchesNumerical) {
  std::mt19937 rng(9);
  for (const auto& m : {kNH, kSNH}) {
    for (int trial = 0; trial < 100; ++trial) {
      const Mat3 F = random_f(rng);
      const Mat9 a = project_dpdf(m, F);
      const Mat9 n = project_dpdf_numerical(m, F);
      EXPECT_LT((a - n).norm(), 1e-8 * dpdf(m, F).norm());
    }
  }
}

TEST(Projection, PsdIdempotentAndDominating) {
  const Mat3 squashed = Eigen::Vector3d(0.2, 1.1, 0.9).asDiagonal();
  const Mat9 H = dpdf(kNH, squashed);
  const Mat9 P = project_dpdf(kNH, squashed);
  EXPECT_GE(min_eig(P), -1e-8 * H.norm());
  EXPECT_EQ((P - P.transpose()).norm(), 0.0);
  EXPECT_LT((project_to_psd(P) - P).norm(), 1e-10 * H.norm());
  Eigen::SelfAdjointEigenSolver<Mat9> eig(H);
  for (int i = 0; i < 9; ++i) {
    if (eig.eigenvalues()[i] >= 0.0) continue;
    const Vec9 v = eig.eigenvectors().col(i);
    EXPECT_GE(v.dot(P * v), v.dot(H * v));
  }
  // No-op at rest.
  EXPECT_LT((project_dpdf(kNH, Mat3::Identity()) - dpdf(kNH, Mat3::Identity())).norm(),
            1e-10 * dpdf(kNH, Mat3::Identity()).norm());
}

// The two models agree to second order at rest, so the relative energy gap
// grows linearly with |F - I|. A 5% gap is reached around |F - I| = 0.03.
TEST(StableNeoHookean, CloseToNeoHookeanAtMildStrain) {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double max_scale : {0.025, 0.2}) {
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 2000; ++trial) {
      Mat3 D;
      for (int i = 0; i < 9; ++i) D.data()[i] = u(rng);
      const double scale = max_scale * std::pow(std::uniform_real_distribution<double>(0.0, 1.0)(rng), 1.0 / 3.0);
      const Mat3 F = Mat3::Identity() + scale * D / D.norm();
      const double nh = energy_density(kNH, F);
      const double gap = std::abs(energy_density(kSNH, F) - nh) / nh;
      if (max_scale <= 0.025) EXPECT_LE(gap, 0.05) << "trial " << trial << " |F-I| = " << scale;
      worst_ratio = std::max(worst_ratio, gap / scale);
    }
    EXPECT_LE(worst_ratio, 2.0) << "max |F-I| " << max_scale;
  }
}
