#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ipsolve/assembly.hpp"

namespace ipsolve {

enum class BoundaryMode { Direct, Penalty };
enum class MassInverse { Exact, DiagonalApprox };

/// Prescribed displacement of a constrained vertex given its rest position
/// and the simulation time.
using Trajectory = std::function<Vec3(const Vec3& rest, double t)>;

struct BoundarySpec {
  BoundaryMode mode = BoundaryMode::Direct;
  VertexSet constrained;
  Trajectory target;     // empty means a static clamp (zero displacement)
  double penalty = 0.0;  // sigma in 1/s^2, Penalty mode only
};

/// Minimization problem seen by the solvers for one time step. Unknowns may
/// be a subset of the mesh DOFs (Direct boundary mode).
class Objective {
 public:
  virtual ~Objective() = default;

  virtual int num_unknowns() const = 0;
  virtual double time_step() const = 0;
  /// Warm start u^0.
  virtual Vector initial_guess() const = 0;

  /// +inf when the state is inadmissible.
  virtual double energy(const Vector& u) const = 0;
  virtual std::optional<Vector> gradient(const Vector& u) const = 0;
  /// Hessian with the inertia block scaled as M / (beta dt)^2. Projection
  /// only touches the elastic part.
  virtual std::optional<SparseSymmetric> hessian(const Vector& u, ProjectionMode mode,
                                                 double beta = 1.0) const = 0;

  /// M^-1 r in the space of unknowns.
  virtual Vector apply_mass_inverse(const Vector& r, MassInverse kind) const = 0;
  /// Reference force for the scaled residual criterion.
  virtual Vector reference_force() const = 0;
};

/// Backward Euler incremental potential
///
///   E(u) = |u - u~|_M^2 / (2 dt^2) + E_elastic(u) + alpha_d / (2 dt) |u - u^n|_M^2
///          - (u - u^n).f_ext + sigma/2 sum_C M_ii (u_i - u_C,i)^2
///
/// with u~ = u^n + dt v^n and f_ext = M g. The penalty sum is present only in
/// Penalty mode; in Direct mode constrained DOFs are pinned to u_C(t + dt)
/// and removed from the unknowns.
class IncrementalPotential final : public Objective {
 public:
  IncrementalPotential(TetMesh mesh, MaterialModel model, BoundarySpec boundary, double dt, const Vec3& gravity,
                       double damping = 0.0);

  int num_unknowns() const override { return static_cast<int>(free_dofs_.size()); }
  double time_step() const override { return dt_; }
  Vector initial_guess() const override;

  double energy(const Vector& u) const override;
  std::optional<Vector> gradient(const Vector& u) const override;
  std::optional<SparseSymmetric> hessian(const Vector& u, ProjectionMode mode, double beta = 1.0) const override;
  Vector apply_mass_inverse(const Vector& r, MassInverse kind) const override;
  Vector reference_force() const override { return restrict(f_ext_); }

  /// M^-1 gradient(u); zero-size optional semantics follow gradient.
  std::optional<Vector> acceleration_residual(const Vector& u, MassInverse kind) const;

  /// Accepts u as the state at t + dt and moves to the next step.
  void advance(const Vector& u);

  const Assembler& assembler() const { return assembler_; }
  const BoundarySpec& boundary() const { return boundary_; }
  const SparseSymmetric& mass() const { return mass_; }
  double time() const { return time_; }
  double damping() const { return damping_; }
  const Vec3& gravity() const { return gravity_; }
  int num_dofs() const { return assembler_.num_dofs(); }

  /// Full-DOF state at the start of the step.
  const Vector& displacement() const { return u_prev_; }
  const Vector& velocity() const { return v_prev_; }
  const Vector& inertia_target() const { return u_tilde_; }
  const Vector& external_force() const { return f_ext_; }
  /// Boundary target values u_C(t + dt) for every constrained DOF, full layout
  /// (zero elsewhere).
  const Vector& boundary_target() const { return target_; }

  /// Full-DOF vector from unknowns; constrained DOFs take their targets in
  /// Direct mode.
  Vector expand(const Vector& u) const;
  Vector restrict(const Vector& full) const;
  const std::vector<int>& free_dofs() const { return free_dofs_; }
  const std::vector<int>& constrained_dofs() const { return constrained_dofs_; }

 private:
  void update_targets();
  Vector full_gradient(const Vector& x, const Vector& elastic) const;

  Assembler assembler_;
  BoundarySpec boundary_;
  double dt_;
  Vec3 gravity_;
  double damping_;
  double time_ = 0.0;

  SparseSymmetric mass_;
  Vector mass_diagonal_;
  Vector f_ext_;
  Vector u_prev_;
  Vector v_prev_;
  Vector u_tilde_;
  Vector target_;

  std::vector<int> free_dofs_;
  std::vector<int> constrained_dofs_;
  std::vector<int> constrained_diag_;  // positions of constrained diagonals in the full pattern
  // Free-free block of the full pattern: reduced storage and source positions.
  SparseSymmetric reduced_pattern_;
  std::vector<int> reduced_source_;
  std::optional<SpdFactor> mass_factor_;
};

}  // namespace ipsolve
