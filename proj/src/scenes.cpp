#include "ipsolve/scenes.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Geometry>

namespace ipsolve {

namespace {

constexpr double kTwistRate = 2.0 * std::numbers::pi / 3.0;  // rad/s
constexpr double kStretchRate = 0.25;                         // m/s
constexpr double kCompression = 0.85;                         // height fraction at T
constexpr double kCompressionSkew = 0.3;                      // top face non-uniformity

Scene swinging_beam() {
  Scene s;
  s.name = "swinging-beam";
  s.description = "beam clamped at x = 0 swinging under gravity";
  s.extent = {2.0, 1.0, 1.0};
  s.subdivisions = {60, 30, 30};
  s.material = MaterialParams::make(4e5, 0.40, 1000.0);
  s.dt = 0.0167;
  s.duration = 6.0;
  s.trajectory = TrajectoryKind::StaticClamp;
  s.boundary = BoundaryMode::Direct;
  return s;
}

Scene twisting_beam(double dt) {
  Scene s;
  s.name = dt > 0.1 ? "twisting-beam-large-dt" : "twisting-beam";
  s.description = "beam clamped at x = 0, far end twisted about the axis and pulled outward";
  s.extent = {2.0, 0.5, 0.5};
  s.subdivisions = {64, 16, 16};
  s.material = MaterialParams::make(1e7, 0.49, 1000.0);
  s.dt = dt;
  s.duration = 3.0;
  s.trajectory = TrajectoryKind::TwistStretch;
  s.boundary = BoundaryMode::Penalty;
  s.penalty = 1e8;
  return s;
}

Scene compressing_box() {
  Scene s;
  s.name = "compressing-box";
  s.description = "box with all faces constrained, squashed toward the static bottom face";
  s.extent = {1.0, 1.0, 1.0};
  s.subdivisions = {30, 30, 30};
  s.material = MaterialParams::make(1e5, 0.40, 1000.0);
  s.dt = 0.01;
  s.duration = 6.0;
  s.trajectory = TrajectoryKind::Compression;
  s.boundary = BoundaryMode::Penalty;
  s.penalty = 1e10;
  return s;
}

Scene desk(Scene s, const std::array<int, 3>& subdivisions, double duration) {
  s.name += "-desk";
  s.subdivisions = subdivisions;
  s.duration = duration;
  return s;
}

}  // namespace

int Scene::num_steps() const { return static_cast<int>(std::ceil(duration / dt - 1e-9)); }

std::vector<Scene> scene_catalog() {
  const Scene beam = swinging_beam();
  const Scene twist = twisting_beam(1.0 / 30.0);
  const Scene twist_large = twisting_beam(1.0 / 3.0);
  const Scene box = compressing_box();
  return {beam,
          desk(beam, {8, 4, 4}, 2.0),
          twist,
          desk(twist, {64, 8, 8}, 1.0),
          twist_large,
          desk(twist_large, {16, 4, 4}, 3.0),
          box,
          desk(box, {6, 6, 6}, 6.0)};
}

Scene find_scene(const std::string& name) {
  for (const Scene& s : scene_catalog()) {
    if (s.name == name) return s;
  }
  throw std::invalid_argument("unknown scene '" + name + "'");
}

TetMesh build_mesh(const Scene& scene) {
  return generate_box_mesh(scene.extent, scene.subdivisions, scene.element);
}

BoundarySpec build_boundary(const Scene& scene, const TetMesh& mesh, BoundaryMode mode) {
  const Vec3 ext = scene.extent;
  const double tol = 1e-9 * ext.maxCoeff();
  const double inf = 1e300;
  BoundarySpec spec;
  spec.mode = mode;
  spec.penalty = scene.penalty;

  const VertexSet left = select_in_box(mesh, Vec3(-tol, -inf, -inf), Vec3(tol, inf, inf));
  switch (scene.trajectory) {
    case TrajectoryKind::StaticClamp:
      spec.constrained = left;
      break;
    case TrajectoryKind::TwistStretch: {
      const VertexSet right = select_in_box(mesh, Vec3(ext.x() - tol, -inf, -inf), Vec3(ext.x() + tol, inf, inf));
      spec.constrained = left.united_with(right);
      const double length = ext.x();
      const Vec3 center(0.0, 0.5 * ext.y(), 0.5 * ext.z());
      spec.target = [length, center, tol](const Vec3& x, double t) -> Vec3 {
        if (x.x() < length - tol) return Vec3::Zero();
        const Eigen::AngleAxisd rotation(kTwistRate * t, Vec3::UnitX());
        const Vec3 moved = center + rotation * (x - center) + Vec3(kStretchRate * t, 0.0, 0.0);
        return moved - x;
      };
      break;
    }
    case TrajectoryKind::Compression: {
      // Every surface vertex; the bottom face y = 0 stays put.
      std::vector<int> surface;
      for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        const Vec3& x = mesh.vertex(v);
        bool on_surface = false;
        for (int d = 0; d < 3; ++d) {
          on_surface = on_surface || std::abs(x[d]) <= tol || std::abs(x[d] - ext[d]) <= tol;
        }
        if (on_surface) surface.push_back(static_cast<int>(v));
      }
      spec.constrained = VertexSet(std::move(surface));
      const double width = ext.x();
      const double duration = scene.duration;
      spec.target = [width, duration](const Vec3& x, double t) -> Vec3 {
        // Eased in and out: zero boundary velocity at t = 0 and t = T.
        const double s = 0.5 * (1.0 - std::cos(std::numbers::pi * std::min(t / duration, 1.0)));
        const double profile = 1.0 - kCompressionSkew * x.x() / width;
        return Vec3(0.0, -kCompression * s * profile * x.y(), 0.0);
      };
      break;
    }
  }
  return spec;
}

IncrementalPotential build_potential(const Scene& scene, std::optional<BoundaryMode> mode) {
  TetMesh mesh = build_mesh(scene);
  BoundarySpec boundary = build_boundary(scene, mesh, mode.value_or(scene.boundary));
  if (boundary.mode == BoundaryMode::Penalty && !(boundary.penalty > 0.0)) boundary.penalty = 1e8;
  return IncrementalPotential(std::move(mesh), MaterialModel{scene.material_kind, scene.material}, std::move(boundary),
                              scene.dt, scene.gravity, scene.damping);
}

}  // namespace ipsolve
