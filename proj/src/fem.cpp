#include "ipsolve/fem.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include <Eigen/LU>

namespace ipsolve {

namespace {

QuadratureRule make_linear_rule() {
  QuadratureRule rule;
  rule.points.push_back(Eigen::Vector4d::Constant(0.25));
  rule.weights.push_back(1.0 / 6.0);
  rule.degree = 1;
  return rule;
}

QuadratureRule make_quadratic_rule() {
  const double a = (5.0 + 3.0 * std::sqrt(5.0)) / 20.0;
  const double b = (5.0 - std::sqrt(5.0)) / 20.0;
  QuadratureRule rule;
  for (int i = 0; i < 4; ++i) {
    Eigen::Vector4d p = Eigen::Vector4d::Constant(b);
    p[i] = a;
    rule.points.push_back(p);
    rule.weights.push_back(1.0 / 24.0);
  }
  rule.degree = 2;
  return rule;
}

// Monomial in barycentric coordinates: coefficient * prod lambda_i^exponent_i.
struct Monomial {
  double coefficient;
  std::array<int, 4> exponent;
};
using Polynomial = std::vector<Monomial>;

Polynomial shape_polynomial(ElementKind kind, int node) {
  auto unit = [](int i, int power) {
    std::array<int, 4> e{0, 0, 0, 0};
    e[i] = power;
    return e;
  };
  if (kind == ElementKind::P1) return {{1.0, unit(node, 1)}};
  if (node < 4) return {{2.0, unit(node, 2)}, {-1.0, unit(node, 1)}};
  const auto& edge = kTetEdges[node - 4];
  std::array<int, 4> e{0, 0, 0, 0};
  e[edge[0]] = 1;
  e[edge[1]] = 1;
  return {{4.0, e}};
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Integral of the product of two polynomials over a tetrahedron of the given
// volume: int prod lambda_i^a_i dV = 6 V prod(a_i!) / (sum a_i + 3)!.
double integrate_product(const Polynomial& p, const Polynomial& q, double volume) {
  double sum = 0.0;
  for (const auto& mp : p) {
    for (const auto& mq : q) {
      double numerator = 1.0;
      int total = 0;
      for (int i = 0; i < 4; ++i) {
        const int a = mp.exponent[i] + mq.exponent[i];
        numerator *= factorial(a);
        total += a;
      }
      sum += mp.coefficient * mq.coefficient * 6.0 * volume * numerator / factorial(total + 3);
    }
  }
  return sum;
}

}  // namespace

const QuadratureRule& quadrature_for(ElementKind kind) {
  static const QuadratureRule linear = make_linear_rule();
  static const QuadratureRule quadratic = make_quadratic_rule();
  return kind == ElementKind::P1 ? linear : quadratic;
}

Eigen::VectorXd shape_values(ElementKind kind, const Eigen::Vector4d& l) {
  if (kind == ElementKind::P1) return l;
  Eigen::VectorXd n(10);
  for (int a = 0; a < 4; ++a) n[a] = l[a] * (2.0 * l[a] - 1.0);
  for (int k = 0; k < 6; ++k) n[4 + k] = 4.0 * l[kTetEdges[k][0]] * l[kTetEdges[k][1]];
  return n;
}

ElementKernel make_element_kernel(const TetMesh& mesh, std::size_t element) {
  const auto nodes = mesh.element(element);
  ElementKernel kernel;
  kernel.kind = mesh.kind();
  kernel.num_nodes = mesh.nodes_per_element();
  kernel.rest_volume = mesh.signed_volume(element);

  Mat3 dm;
  for (int c = 0; c < 3; ++c) dm.col(c) = mesh.vertex(nodes[c + 1]) - mesh.vertex(nodes[0]);
  const Mat3 dm_inv = dm.inverse();
  // Rows are the constant gradients of the barycentric coordinates.
  Eigen::Matrix<double, 4, 3> grad_lambda;
  grad_lambda.bottomRows<3>() = dm_inv;
  grad_lambda.row(0) = -dm_inv.colwise().sum();

  const QuadratureRule& rule = quadrature_for(kernel.kind);
  const int n = kernel.num_nodes;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Eigen::Vector4d& l = rule.points[q];
    Eigen::MatrixX3d grad(n, 3);
    if (kernel.kind == ElementKind::P1) {
      grad = grad_lambda;
    } else {
      for (int a = 0; a < 4; ++a) grad.row(a) = (4.0 * l[a] - 1.0) * grad_lambda.row(a);
      for (int k = 0; k < 6; ++k) {
        const int i = kTetEdges[k][0];
        const int j = kTetEdges[k][1];
        grad.row(4 + k) = 4.0 * (l[i] * grad_lambda.row(j) + l[j] * grad_lambda.row(i));
      }
    }
    Eigen::Matrix<double, 9, Eigen::Dynamic> b = Eigen::Matrix<double, 9, Eigen::Dynamic>::Zero(9, 3 * n);
    for (int a = 0; a < n; ++a) {
      for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i) b(i + 3 * j, 3 * a + i) = grad(a, j);
      }
    }
    kernel.shape_gradients.push_back(std::move(grad));
    kernel.b_operators.push_back(std::move(b));
    kernel.weights.push_back(rule.weights[q] * 6.0 * kernel.rest_volume);
  }
  return kernel;
}

Mat3 deformation_gradient(const ElementKernel& kernel, const Eigen::Ref<const Vector>& element_displacements,
                          std::size_t q) {
  const Vec9 f = kernel.b_operators[q] * element_displacements;
  return Mat3::Identity() + unflatten(f);
}

Matrix element_mass(const ElementKernel& kernel, double density) {
  const int n = kernel.num_nodes;
  std::vector<Polynomial> shapes;
  for (int a = 0; a < n; ++a) shapes.push_back(shape_polynomial(kernel.kind, a));
  Matrix m = Matrix::Zero(3 * n, 3 * n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      const double value = density * integrate_product(shapes[a], shapes[b], kernel.rest_volume);
      for (int d = 0; d < 3; ++d) {
        m(3 * a + d, 3 * b + d) = value;
        m(3 * b + d, 3 * a + d) = value;
      }
    }
  }
  return m;
}

}  // namespace ipsolve
