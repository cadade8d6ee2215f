#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "ipsolve/geometry.hpp"
#include "ipsolve/types.hpp"

namespace ipsolve {

/// Quadrature on the reference tetrahedron. Points are barycentric
/// coordinates; weights sum to the reference volume 1/6.
struct QuadratureRule {
  std::vector<Eigen::Vector4d> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return points.size(); }
};

/// 1-point centroid rule for P1, 4-point degree-2 rule for P2.
const QuadratureRule& quadrature_for(ElementKind kind);

/// Rest-configuration data of one element, precomputed once.
///
/// `b_operators[q]` is the 9 x 3n matrix with vec(F_q) = vec(I) + B_q u_e,
/// where u_e stacks the nodal displacements (x, y, z per node) and vec is
/// column-major.
struct ElementKernel {
  ElementKind kind = ElementKind::P1;
  int num_nodes = 4;
  double rest_volume = 0.0;
  std::vector<double> weights;                       // physical, sum = rest_volume
  std::vector<Eigen::MatrixX3d> shape_gradients;     // n x 3 per quadrature point
  std::vector<Eigen::Matrix<double, 9, Eigen::Dynamic>> b_operators;

  int num_dofs() const { return 3 * num_nodes; }
  std::size_t num_quadrature_points() const { return weights.size(); }
};

ElementKernel make_element_kernel(const TetMesh& mesh, std::size_t element);

/// Shape function values at a barycentric point, in local node order.
Eigen::VectorXd shape_values(ElementKind kind, const Eigen::Vector4d& barycentric);

Mat3 deformation_gradient(const ElementKernel& kernel, const Eigen::Ref<const Vector>& element_displacements,
                          std::size_t q);

/// Consistent mass matrix of one element (3n x 3n), integrated exactly.
Matrix element_mass(const ElementKernel& kernel, double density);

}  // namespace ipsolve
