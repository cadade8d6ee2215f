#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ipsolve/fem.hpp"
#include "ipsolve/geometry.hpp"
#include "ipsolve/linalg.hpp"
#include "ipsolve/materials.hpp"

namespace ipsolve {

enum class ProjectionMode { None, PerElementNumerical, PerQuadratureAnalytic };

/// Global DOF numbering (3 per vertex, x/y/z interleaved) and the fixed upper
/// triangular sparsity pattern shared by the mass and elastic Hessians.
class DofMap {
 public:
  explicit DofMap(const TetMesh& mesh);

  int num_dofs() const { return num_dofs_; }
  /// Pattern with all values zero.
  const SparseSymmetric& pattern() const { return pattern_; }

  /// Global DOF indices of element e in local order (3 per node).
  std::span<const int> element_dofs(std::size_t e) const {
    return {element_dofs_.data() + e * block_, static_cast<std::size_t>(block_)};
  }
  /// For every local pair (i, j) with i <= j, the position in the pattern
  /// values of the corresponding upper global entry, row-major over the
  /// local upper triangle.
  std::span<const int> scatter(std::size_t e) const {
    const std::size_t n = static_cast<std::size_t>(block_ * (block_ + 1) / 2);
    return {scatter_.data() + e * n, n};
  }

 private:
  int num_dofs_ = 0;
  int block_ = 0;
  SparseSymmetric pattern_;
  std::vector<int> element_dofs_;
  std::vector<int> scatter_;
};

/// Mesh, material, per-element kernels and DOF map bundled for repeated
/// assembly. Elements are visited in index order, so results are
/// bit-reproducible.
class Assembler {
 public:
  Assembler(TetMesh mesh, MaterialModel model);

  const TetMesh& mesh() const { return mesh_; }
  const MaterialModel& model() const { return model_; }
  const DofMap& dofs() const { return dofs_; }
  const ElementKernel& kernel(std::size_t e) const { return kernels_[e]; }
  int num_dofs() const { return dofs_.num_dofs(); }

  SparseSymmetric mass() const;

  /// Total elastic energy; +inf if any quadrature point is inadmissible.
  double energy(const Vector& u) const;
  /// std::nullopt when the energy is infinite at u.
  std::optional<Vector> gradient(const Vector& u) const;
  std::optional<SparseSymmetric> hessian(const Vector& u, ProjectionMode mode) const;

  /// Dense elastic Hessian block of one element, before scattering.
  Matrix element_hessian(std::size_t e, const Vector& u, ProjectionMode mode) const;

 private:
  Vector gather(std::size_t e, const Vector& u) const;
  void scatter_block(std::size_t e, const Matrix& block, std::span<double> values) const;

  TetMesh mesh_;
  MaterialModel model_;
  DofMap dofs_;
  std::vector<ElementKernel> kernels_;
};

SparseSymmetric assemble_mass(const TetMesh& mesh, double density);
std::optional<Vector> assemble_elastic_gradient(const TetMesh& mesh, const MaterialModel& model, const Vector& u);
std::optional<SparseSymmetric> assemble_elastic_hessian(const TetMesh& mesh, const MaterialModel& model,
                                                        const Vector& u, ProjectionMode mode);

}  // namespace ipsolve
