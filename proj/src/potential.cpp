#include "ipsolve/potential.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace ipsolve {

IncrementalPotential::IncrementalPotential(TetMesh mesh, MaterialModel model, BoundarySpec boundary, double dt,
                                           const Vec3& gravity, double damping)
    : assembler_(std::move(mesh), model),
      boundary_(std::move(boundary)),
      dt_(dt),
      gravity_(gravity),
      damping_(damping) {
  if (!(dt_ > 0.0)) throw std::invalid_argument("IncrementalPotential: time step must be positive");
  if (damping_ < 0.0) throw std::invalid_argument("IncrementalPotential: damping must be non-negative");
  if (boundary_.mode == BoundaryMode::Penalty && !(boundary_.penalty > 0.0) && !boundary_.constrained.empty()) {
    throw std::invalid_argument("IncrementalPotential: penalty mode needs sigma > 0");
  }
  const int n = assembler_.num_dofs();
  for (int v : boundary_.constrained.indices()) {
    if (v < 0 || v >= n / 3) throw std::invalid_argument("IncrementalPotential: constrained vertex out of range");
  }

  mass_ = assembler_.mass();
  mass_diagonal_ = mass_.diagonal();
  Vector g(n);
  for (int i = 0; i < n; ++i) g[i] = gravity_[i % 3];
  f_ext_ = mass_.multiply(g);
  u_prev_ = Vector::Zero(n);
  v_prev_ = Vector::Zero(n);
  u_tilde_ = Vector::Zero(n);

  for (int v : boundary_.constrained.indices()) {
    for (int d = 0; d < 3; ++d) constrained_dofs_.push_back(3 * v + d);
  }
  std::vector<int> reduced_index(n, -1);
  for (int i = 0, c = 0; i < n; ++i) {
    const bool pinned = boundary_.mode == BoundaryMode::Direct &&
                        c < static_cast<int>(constrained_dofs_.size()) && constrained_dofs_[c] == i;
    if (pinned) {
      ++c;
      continue;
    }
    reduced_index[i] = static_cast<int>(free_dofs_.size());
    free_dofs_.push_back(i);
  }
  for (int i : constrained_dofs_) constrained_diag_.push_back(mass_.find(i, i));

  // Free-free block; the reduced numbering is monotone so the upper triangle
  // and column order carry over.
  const auto& full = assembler_.dofs().pattern().upper();
  const int nf = num_unknowns();
  std::vector<int> outer(nf + 1, 0);
  std::vector<int> inner;
  for (int c = 0; c < n; ++c) {
    const int rc = reduced_index[c];
    if (rc < 0) continue;
    for (int k = full.outerIndexPtr()[c]; k < full.outerIndexPtr()[c + 1]; ++k) {
      const int rr = reduced_index[full.innerIndexPtr()[k]];
      if (rr < 0) continue;
      inner.push_back(rr);
      reduced_source_.push_back(k);
    }
    outer[rc + 1] = static_cast<int>(inner.size());
  }
  std::vector<double> zeros(inner.size(), 0.0);
  reduced_pattern_ = SparseSymmetric(Eigen::Map<const SparseSymmetric::Storage>(
      nf, nf, static_cast<Eigen::Index>(inner.size()), outer.data(), inner.data(), zeros.data()));

  SparseSymmetric reduced_mass = reduced_pattern_;
  auto values = reduced_mass.values();
  const auto source = mass_.values();
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = source[reduced_source_[k]];
  mass_factor_ = cholesky(reduced_mass);
  if (!mass_factor_) throw std::runtime_error("IncrementalPotential: mass matrix is not positive definite");

  update_targets();
}

void IncrementalPotential::update_targets() {
  target_ = Vector::Zero(num_dofs());
  if (!boundary_.target) return;
  const double t = time_ + dt_;
  for (int v : boundary_.constrained.indices()) {
    target_.segment<3>(3 * v) = boundary_.target(assembler_.mesh().vertex(v), t);
  }
}

Vector IncrementalPotential::expand(const Vector& u) const {
  if (u.size() != num_unknowns()) throw std::invalid_argument("IncrementalPotential: dimension mismatch");
  if (boundary_.mode == BoundaryMode::Penalty) return u;
  Vector x = target_;
  for (std::size_t i = 0; i < free_dofs_.size(); ++i) x[free_dofs_[i]] = u[i];
  return x;
}

Vector IncrementalPotential::restrict(const Vector& full) const {
  if (boundary_.mode == BoundaryMode::Penalty) return full;
  Vector u(num_unknowns());
  for (std::size_t i = 0; i < free_dofs_.size(); ++i) u[i] = full[free_dofs_[i]];
  return u;
}

Vector IncrementalPotential::initial_guess() const { return restrict(u_prev_); }

double IncrementalPotential::energy(const Vector& u) const {
  const Vector x = expand(u);
  const double elastic = assembler_.energy(x);
  if (!std::isfinite(elastic)) return std::numeric_limits<double>::infinity();
  const Vector d = x - u_tilde_;
  const Vector s = x - u_prev_;
  double e = mass_.quadratic_form(d) / (2.0 * dt_ * dt_) + elastic;
  if (damping_ > 0.0) e += damping_ / (2.0 * dt_) * mass_.quadratic_form(s);
  e -= s.dot(f_ext_);
  if (boundary_.mode == BoundaryMode::Penalty) {
    double pen = 0.0;
    for (int i : constrained_dofs_) {
      const double r = x[i] - target_[i];
      pen += mass_diagonal_[i] * r * r;
    }
    e += 0.5 * boundary_.penalty * pen;
  }
  return e;
}

Vector IncrementalPotential::full_gradient(const Vector& x, const Vector& elastic) const {
  Vector g = mass_.multiply(x - u_tilde_) / (dt_ * dt_) + elastic - f_ext_;
  if (damping_ > 0.0) g += damping_ / dt_ * mass_.multiply(x - u_prev_);
  if (boundary_.mode == BoundaryMode::Penalty) {
    for (int i : constrained_dofs_) g[i] += boundary_.penalty * mass_diagonal_[i] * (x[i] - target_[i]);
  }
  return g;
}

std::optional<Vector> IncrementalPotential::gradient(const Vector& u) const {
  const Vector x = expand(u);
  auto elastic = assembler_.gradient(x);
  if (!elastic) return std::nullopt;
  return restrict(full_gradient(x, *elastic));
}

std::optional<SparseSymmetric> IncrementalPotential::hessian(const Vector& u, ProjectionMode mode,
                                                             double beta) const {
  if (!(beta > 0.0)) throw std::invalid_argument("IncrementalPotential::hessian: beta must be positive");
  const Vector x = expand(u);
  auto h = assembler_.hessian(x, mode);
  if (!h) return std::nullopt;
  const double bdt = beta * dt_;
  const double mass_scale = 1.0 / (bdt * bdt) + damping_ / dt_;
  auto values = h->values();
  const auto m = mass_.values();
  for (std::size_t k = 0; k < values.size(); ++k) values[k] += mass_scale * m[k];
  if (boundary_.mode == BoundaryMode::Penalty) {
    for (std::size_t c = 0; c < constrained_dofs_.size(); ++c) {
      values[constrained_diag_[c]] += boundary_.penalty * mass_diagonal_[constrained_dofs_[c]];
    }
    return h;
  }
  SparseSymmetric reduced = reduced_pattern_;
  auto out = reduced.values();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = values[reduced_source_[k]];
  return reduced;
}

Vector IncrementalPotential::apply_mass_inverse(const Vector& r, MassInverse kind) const {
  if (kind == MassInverse::Exact) return mass_factor_->solve(r);
  const Vector diag = restrict(mass_diagonal_);
  return r.cwiseQuotient(diag);
}

std::optional<Vector> IncrementalPotential::acceleration_residual(const Vector& u, MassInverse kind) const {
  auto r = gradient(u);
  if (!r) return std::nullopt;
  return apply_mass_inverse(*r, kind);
}

void IncrementalPotential::advance(const Vector& u) {
  const Vector x = expand(u);
  v_prev_ = (x - u_prev_) / dt_;
  u_prev_ = x;
  u_tilde_ = u_prev_ + dt_ * v_prev_;
  time_ += dt_;
  update_targets();
}

}  // namespace ipsolve
