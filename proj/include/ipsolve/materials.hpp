#pragma once

#include "ipsolve/types.hpp"

namespace ipsolve {

/// Isotropic elastic constants and mass density.
struct MaterialParams {
  double youngs_modulus = 0.0;  // Pa
  double poisson_ratio = 0.0;
  double density = 0.0;         // kg/m^3

  /// Throws std::invalid_argument unless E > 0, 0 <= nu < 0.5, rho > 0.
  static MaterialParams make(double youngs_modulus, double poisson_ratio, double density);

  double mu() const { return youngs_modulus / (2.0 * (1.0 + poisson_ratio)); }
  double lambda() const {
    return youngs_modulus * poisson_ratio / ((1.0 + poisson_ratio) * (1.0 - 2.0 * poisson_ratio));
  }
};

enum class MaterialKind { NeoHookean, StableNeoHookean };

/// Hyperelastic energy density psi(F).
///
/// NeoHookean:       mu/2 (|F|^2 - 3) - mu ln J + lambda/2 (ln J)^2
/// StableNeoHookean: mu/2 (|F|^2 - 3) - mu (J - 1) + lambda'/2 (J - 1)^2
///
/// The stable variant uses lambda' = lambda + mu, which gives both models the
/// same linearization at F = I. Neo-Hookean is only defined for J > 0: the
/// energy is +inf there and pk1 / dpdf return NaN-filled matrices.
struct MaterialModel {
  MaterialKind kind = MaterialKind::NeoHookean;
  MaterialParams params;
};

/// False when the energy is infinite at F.
bool admissible(const MaterialModel& model, const Mat3& F);

double energy_density(const MaterialModel& model, const Mat3& F);

/// First Piola-Kirchhoff stress dpsi/dF.
Mat3 pk1(const MaterialModel& model, const Mat3& F);

/// d vec(P) / d vec(F), column-major vec.
Mat9 dpdf(const MaterialModel& model, const Mat3& F);

/// dpdf with negative eigenvalues clamped to zero, via the closed-form
/// isotropic eigensystem (twist, flip and scaling modes of the SVD of F).
Mat9 project_dpdf(const MaterialModel& model, const Mat3& F);

/// Same projection through a numerical 9x9 eigendecomposition.
Mat9 project_dpdf_numerical(const MaterialModel& model, const Mat3& F);

/// Eigenvalues and orthonormal eigenvectors of dpdf obtained in closed form.
/// Columns of `vectors` are vec'd eigenmatrices.
struct IsotropicEigensystem {
  Vec9 values;
  Mat9 vectors;
};
IsotropicEigensystem analytic_eigensystem(const MaterialModel& model, const Mat3& F);

}  // namespace ipsolve
