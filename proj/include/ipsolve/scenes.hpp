#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ipsolve/potential.hpp"

namespace ipsolve {

enum class TrajectoryKind { StaticClamp, TwistStretch, Compression };

/// A benchmark scene: box mesh recipe, material, time stepping and boundary
/// motion. The beam axis is x; gravity acts along -y.
struct Scene {
  std::string name;
  std::string description;
  Vec3 extent{1.0, 1.0, 1.0};
  std::array<int, 3> subdivisions{1, 1, 1};
  ElementKind element = ElementKind::P1;
  MaterialKind material_kind = MaterialKind::NeoHookean;
  MaterialParams material;
  double dt = 0.01;
  double duration = 1.0;
  Vec3 gravity{0.0, -9.81, 0.0};
  double damping = 0.0;
  TrajectoryKind trajectory = TrajectoryKind::StaticClamp;
  BoundaryMode boundary = BoundaryMode::Direct;
  double penalty = 0.0;

  /// ceil(T / dt), with a small slack against round-off.
  int num_steps() const;
};

/// Full-scale scenes and their "-desk" variants.
std::vector<Scene> scene_catalog();
/// Throws std::invalid_argument for unknown names.
Scene find_scene(const std::string& name);

TetMesh build_mesh(const Scene& scene);
/// Constrained vertices and their prescribed motion for the scene.
BoundarySpec build_boundary(const Scene& scene, const TetMesh& mesh, BoundaryMode mode);
IncrementalPotential build_potential(const Scene& scene, std::optional<BoundaryMode> mode = std::nullopt);

}  // namespace ipsolve
