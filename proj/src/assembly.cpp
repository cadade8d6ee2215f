#include "ipsolve/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace ipsolve {

DofMap::DofMap(const TetMesh& mesh)
    : num_dofs_(static_cast<int>(3 * mesh.num_vertices())), block_(3 * mesh.nodes_per_element()) {
  const std::size_t ne = mesh.num_elements();
  element_dofs_.reserve(ne * block_);
  for (std::size_t e = 0; e < ne; ++e) {
    for (int node : mesh.element(e)) {
      for (int d = 0; d < 3; ++d) element_dofs_.push_back(3 * node + d);
    }
  }

  // Column lists of the upper pattern: row r appears in column c if some
  // element couples them with r <= c.
  std::vector<std::vector<int>> columns(num_dofs_);
  for (std::size_t e = 0; e < ne; ++e) {
    const auto dofs = element_dofs(e);
    for (int a : dofs) {
      for (int b : dofs) {
        if (a <= b) columns[b].push_back(a);
      }
    }
  }
  std::vector<int> outer(num_dofs_ + 1, 0);
  std::vector<int> inner;
  for (int c = 0; c < num_dofs_; ++c) {
    auto& col = columns[c];
    std::sort(col.begin(), col.end());
    col.erase(std::unique(col.begin(), col.end()), col.end());
    inner.insert(inner.end(), col.begin(), col.end());
    outer[c + 1] = static_cast<int>(inner.size());
  }
  std::vector<double> zeros(inner.size(), 0.0);
  SparseSymmetric::Storage storage = Eigen::Map<const SparseSymmetric::Storage>(
      num_dofs_, num_dofs_, static_cast<Eigen::Index>(inner.size()), outer.data(), inner.data(), zeros.data());
  pattern_ = SparseSymmetric(std::move(storage));

  const std::size_t per = static_cast<std::size_t>(block_ * (block_ + 1) / 2);
  scatter_.reserve(ne * per);
  for (std::size_t e = 0; e < ne; ++e) {
    const auto dofs = element_dofs(e);
    for (int i = 0; i < block_; ++i) {
      for (int j = i; j < block_; ++j) {
        const int r = std::min(dofs[i], dofs[j]);
        const int c = std::max(dofs[i], dofs[j]);
        scatter_.push_back(pattern_.find(r, c));
      }
    }
  }
}

Assembler::Assembler(TetMesh mesh, MaterialModel model)
    : mesh_(std::move(mesh)), model_(model), dofs_(mesh_) {
  kernels_.reserve(mesh_.num_elements());
  for (std::size_t e = 0; e < mesh_.num_elements(); ++e) kernels_.push_back(make_element_kernel(mesh_, e));
}

Vector Assembler::gather(std::size_t e, const Vector& u) const {
  const auto dofs = dofs_.element_dofs(e);
  Vector ue(dofs.size());
  for (std::size_t i = 0; i < dofs.size(); ++i) ue[i] = u[dofs[i]];
  return ue;
}

void Assembler::scatter_block(std::size_t e, const Matrix& block, std::span<double> values) const {
  const auto positions = dofs_.scatter(e);
  const int n = static_cast<int>(block.rows());
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) values[positions[k++]] += block(i, j);
  }
}

SparseSymmetric Assembler::mass() const {
  SparseSymmetric m = dofs_.pattern();
  auto values = m.values();
  for (std::size_t e = 0; e < kernels_.size(); ++e) {
    scatter_block(e, element_mass(kernels_[e], model_.params.density), values);
  }
  return m;
}

double Assembler::energy(const Vector& u) const {
  if (u.size() != num_dofs()) throw std::invalid_argument("Assembler::energy: dimension mismatch");
  double total = 0.0;
  for (std::size_t e = 0; e < kernels_.size(); ++e) {
    const ElementKernel& k = kernels_[e];
    const Vector ue = gather(e, u);
    for (std::size_t q = 0; q < k.num_quadrature_points(); ++q) {
      const Mat3 F = deformation_gradient(k, ue, q);
      if (!admissible(model_, F)) return std::numeric_limits<double>::infinity();
      total += k.weights[q] * energy_density(model_, F);
    }
  }
  return total;
}

std::optional<Vector> Assembler::gradient(const Vector& u) const {
  if (u.size() != num_dofs()) throw std::invalid_argument("Assembler::gradient: dimension mismatch");
  Vector g = Vector::Zero(num_dofs());
  for (std::size_t e = 0; e < kernels_.size(); ++e) {
    const ElementKernel& k = kernels_[e];
    const Vector ue = gather(e, u);
    Vector ge = Vector::Zero(ue.size());
    for (std::size_t q = 0; q < k.num_quadrature_points(); ++q) {
      const Mat3 F = deformation_gradient(k, ue, q);
      if (!admissible(model_, F)) return std::nullopt;
      ge.noalias() += k.weights[q] * (k.b_operators[q].transpose() * flatten(pk1(model_, F)));
    }
    const auto dofs = dofs_.element_dofs(e);
    for (std::size_t i = 0; i < dofs.size(); ++i) g[dofs[i]] += ge[i];
  }
  return g;
}

Matrix Assembler::element_hessian(std::size_t e, const Vector& u, ProjectionMode mode) const {
  const ElementKernel& k = kernels_[e];
  const Vector ue = gather(e, u);
  Matrix h = Matrix::Zero(ue.size(), ue.size());
  for (std::size_t q = 0; q < k.num_quadrature_points(); ++q) {
    const Mat3 F = deformation_gradient(k, ue, q);
    const Mat9 d = mode == ProjectionMode::PerQuadratureAnalytic ? project_dpdf(model_, F) : dpdf(model_, F);
    const auto& b = k.b_operators[q];
    h.noalias() += k.weights[q] * (b.transpose() * d * b);
  }
  if (mode == ProjectionMode::PerElementNumerical) h = project_to_psd(h);
  return h;
}

std::optional<SparseSymmetric> Assembler::hessian(const Vector& u, ProjectionMode mode) const {
  if (u.size() != num_dofs()) throw std::invalid_argument("Assembler::hessian: dimension mismatch");
  SparseSymmetric h = dofs_.pattern();
  auto values = h.values();
  for (std::size_t e = 0; e < kernels_.size(); ++e) {
    const ElementKernel& k = kernels_[e];
    const Vector ue = gather(e, u);
    for (std::size_t q = 0; q < k.num_quadrature_points(); ++q) {
      if (!admissible(model_, deformation_gradient(k, ue, q))) return std::nullopt;
    }
    scatter_block(e, element_hessian(e, u, mode), values);
  }
  return h;
}

SparseSymmetric assemble_mass(const TetMesh& mesh, double density) {
  MaterialModel model;
  model.params.density = density;
  return Assembler(mesh, model).mass();
}

std::optional<Vector> assemble_elastic_gradient(const TetMesh& mesh, const MaterialModel& model, const Vector& u) {
  return Assembler(mesh, model).gradient(u);
}

std::optional<SparseSymmetric> assemble_elastic_hessian(const TetMesh& mesh, const MaterialModel& model,
                                                        const Vector& u, ProjectionMode mode) {
  return Assembler(mesh, model).hessian(u, mode);
}

}  // namespace ipsolve
