#include "ipsolve/materials.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "ipsolve/linalg.hpp"

namespace ipsolve {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double stable_lambda(const MaterialParams& p) { return p.lambda() + p.mu(); }

Mat3 cofactor(const Mat3& F) {
  Mat3 c;
  c.col(0) = F.col(1).cross(F.col(2));
  c.col(1) = F.col(2).cross(F.col(0));
  c.col(2) = F.col(0).cross(F.col(1));
  return c;
}

Mat3 cross_matrix(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

// Second derivative of det F with respect to vec(F).
Mat9 determinant_hessian(const Mat3& F) {
  Mat9 h = Mat9::Zero();
  const Mat3 f0 = cross_matrix(F.col(0));
  const Mat3 f1 = cross_matrix(F.col(1));
  const Mat3 f2 = cross_matrix(F.col(2));
  h.block<3, 3>(0, 3) = -f2;
  h.block<3, 3>(0, 6) = f1;
  h.block<3, 3>(3, 0) = f2;
  h.block<3, 3>(3, 6) = -f0;
  h.block<3, 3>(6, 0) = -f1;
  h.block<3, 3>(6, 3) = f0;
  return h;
}

// Rotation-variant SVD: U and V are proper rotations, the last singular
// value carries the sign of det F.
void rotation_variant_svd(const Mat3& F, Mat3& U, Vec3& sigma, Mat3& V) {
  Eigen::JacobiSVD<Mat3> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
  U = svd.matrixU();
  V = svd.matrixV();
  sigma = svd.singularValues();
  if (U.determinant() < 0.0) {
    U.col(2) *= -1.0;
    sigma[2] *= -1.0;
  }
  if (V.determinant() < 0.0) {
    V.col(2) *= -1.0;
    sigma[2] *= -1.0;
  }
}

// Index pairs (i, j) of the twist/flip modes and the remaining index k.
constexpr std::array<std::array<int, 3>, 3> kPairs{{{0, 1, 2}, {0, 2, 1}, {1, 2, 0}}};

}  // namespace

MaterialParams MaterialParams::make(double youngs_modulus, double poisson_ratio, double density) {
  if (!(youngs_modulus > 0.0)) throw std::invalid_argument("Young's modulus must be positive");
  if (!(poisson_ratio >= 0.0 && poisson_ratio < 0.5)) {
    throw std::invalid_argument("Poisson ratio must lie in [0, 0.5)");
  }
  if (!(density > 0.0)) throw std::invalid_argument("density must be positive");
  return {youngs_modulus, poisson_ratio, density};
}

bool admissible(const MaterialModel& model, const Mat3& F) {
  if (!F.allFinite()) return false;
  return model.kind == MaterialKind::StableNeoHookean || F.determinant() > 0.0;
}

double energy_density(const MaterialModel& model, const Mat3& F) {
  if (!admissible(model, F)) return std::numeric_limits<double>::infinity();
  const double mu = model.params.mu();
  const double ic = F.squaredNorm();
  const double J = F.determinant();
  if (model.kind == MaterialKind::NeoHookean) {
    const double log_j = std::log(J);
    return 0.5 * mu * (ic - 3.0) - mu * log_j + 0.5 * model.params.lambda() * log_j * log_j;
  }
  const double lambda = stable_lambda(model.params);
  return 0.5 * mu * (ic - 3.0) - mu * (J - 1.0) + 0.5 * lambda * (J - 1.0) * (J - 1.0);
}

Mat3 pk1(const MaterialModel& model, const Mat3& F) {
  if (!admissible(model, F)) return Mat3::Constant(kNaN);
  const double mu = model.params.mu();
  if (model.kind == MaterialKind::NeoHookean) {
    const Mat3 f_inv_t = F.inverse().transpose();
    const double log_j = std::log(F.determinant());
    return mu * F + (model.params.lambda() * log_j - mu) * f_inv_t;
  }
  const double lambda = stable_lambda(model.params);
  const double J = F.determinant();
  return mu * F + (lambda * (J - 1.0) - mu) * cofactor(F);
}

Mat9 dpdf(const MaterialModel& model, const Mat3& F) {
  if (!admissible(model, F)) return Mat9::Constant(kNaN);
  const double mu = model.params.mu();
  if (model.kind == MaterialKind::NeoHookean) {
    const double lambda = model.params.lambda();
    const Mat3 g = F.inverse().transpose();
    const double log_j = std::log(F.determinant());
    const Vec9 gv = flatten(g);
    Mat9 h = mu * Mat9::Identity() + lambda * gv * gv.transpose();
    // d(F^-T)_ij / dF_kl = -(F^-T)_il (F^-T)_kj
    const double c = mu - lambda * log_j;
    for (int l = 0; l < 3; ++l) {
      for (int k = 0; k < 3; ++k) {
        for (int j = 0; j < 3; ++j) {
          for (int i = 0; i < 3; ++i) h(i + 3 * j, k + 3 * l) += c * g(i, l) * g(k, j);
        }
      }
    }
    return h;
  }
  const double lambda = stable_lambda(model.params);
  const double J = F.determinant();
  const Vec9 cv = flatten(cofactor(F));
  return mu * Mat9::Identity() + lambda * cv * cv.transpose() +
         (lambda * (J - 1.0) - mu) * determinant_hessian(F);
}

IsotropicEigensystem analytic_eigensystem(const MaterialModel& model, const Mat3& F) {
  Mat3 U;
  Mat3 V;
  Vec3 s;
  rotation_variant_svd(F, U, s, V);
  const double mu = model.params.mu();

  std::array<double, 3> twist{};
  std::array<double, 3> flip{};
  Mat3 scaling;
  if (model.kind == MaterialKind::NeoHookean) {
    const double lambda = model.params.lambda();
    const double log_j = std::log(s.prod());
    for (int p = 0; p < 3; ++p) {
      const auto [i, j, k] = kPairs[p];
      const double inv = 1.0 / (s[i] * s[j]);
      twist[p] = mu + (lambda * log_j - mu) * inv;
      flip[p] = mu + (mu - lambda * log_j) * inv;
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        scaling(i, j) = i == j ? mu + (mu - lambda * log_j + lambda) / (s[i] * s[i]) : lambda / (s[i] * s[j]);
      }
    }
  } else {
    const double lambda = stable_lambda(model.params);
    const double J = s.prod();
    const double t = lambda * (J - 1.0) - mu;
    const Vec3 others(s[1] * s[2], s[0] * s[2], s[0] * s[1]);
    for (int p = 0; p < 3; ++p) {
      const int k = kPairs[p][2];
      twist[p] = mu + t * s[k];
      flip[p] = mu - t * s[k];
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        scaling(i, j) = i == j ? mu + lambda * others[i] * others[i]
                               : lambda * others[i] * others[j] + t * s[3 - i - j];
      }
    }
  }

  IsotropicEigensystem result;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int p = 0; p < 3; ++p) {
    const auto [i, j, k] = kPairs[p];
    const Mat3 twist_mode = inv_sqrt2 * (U.col(i) * V.col(j).transpose() - U.col(j) * V.col(i).transpose());
    const Mat3 flip_mode = inv_sqrt2 * (U.col(i) * V.col(j).transpose() + U.col(j) * V.col(i).transpose());
    result.values[p] = twist[p];
    result.vectors.col(p) = flatten(twist_mode);
    result.values[3 + p] = flip[p];
    result.vectors.col(3 + p) = flatten(flip_mode);
  }
  Eigen::SelfAdjointEigenSolver<Mat3> scaling_eig(scaling);
  for (int m = 0; m < 3; ++m) {
    const Vec3 q = scaling_eig.eigenvectors().col(m);
    result.values[6 + m] = scaling_eig.eigenvalues()[m];
    result.vectors.col(6 + m) = flatten(U * q.asDiagonal() * V.transpose());
  }
  return result;
}

Mat9 project_dpdf(const MaterialModel& model, const Mat3& F) {
  if (!admissible(model, F)) return Mat9::Constant(kNaN);
  const IsotropicEigensystem eig = analytic_eigensystem(model, F);
  const Vec9 clamped = eig.values.cwiseMax(0.0);
  const Mat9 h = eig.vectors * clamped.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (h + h.transpose());
}

Mat9 project_dpdf_numerical(const MaterialModel& model, const Mat3& F) {
  if (!admissible(model, F)) return Mat9::Constant(kNaN);
  return project_to_psd(dpdf(model, F));
}

}  // namespace ipsolve
