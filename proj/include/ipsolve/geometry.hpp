#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "ipsolve/types.hpp"

namespace ipsolve {

enum class ElementKind { P1, P2 };

/// 4 for linear tetrahedra, 10 for quadratic ones.
constexpr int nodes_per_element(ElementKind kind) { return kind == ElementKind::P1 ? 4 : 10; }

/// Local edge numbering of a quadratic tetrahedron. Node 4 + k sits on the
/// midpoint of corners kTetEdges[k][0] and kTetEdges[k][1].
inline constexpr std::array<std::array<int, 2>, 6> kTetEdges{
    {{0, 1}, {1, 2}, {0, 2}, {0, 3}, {1, 3}, {2, 3}}};

/// Tetrahedral mesh in its rest configuration.
///
/// Connectivity is stored flat with a stride of nodes_per_element(kind). The
/// first four nodes of every element are its corners, ordered so that the
/// signed rest volume is positive. Construction validates these invariants
/// and throws std::invalid_argument when they do not hold.
class TetMesh {
 public:
  TetMesh(std::vector<Vec3> vertices, std::vector<int> connectivity, ElementKind kind);

  ElementKind kind() const { return kind_; }
  int nodes_per_element() const { return ipsolve::nodes_per_element(kind_); }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_elements() const { return connectivity_.size() / nodes_per_element(); }

  const Vec3& vertex(std::size_t i) const { return vertices_[i]; }
  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<int>& connectivity() const { return connectivity_; }

  std::span<const int> element(std::size_t e) const {
    const auto n = static_cast<std::size_t>(nodes_per_element());
    return {connectivity_.data() + e * n, n};
  }

  /// Signed volume of the corner tetrahedron of element e.
  double signed_volume(std::size_t e) const;
  double total_volume() const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<int> connectivity_;
  ElementKind kind_;
};

/// Sorted set of unique vertex indices.
class VertexSet {
 public:
  VertexSet() = default;
  /// Sorts and deduplicates.
  explicit VertexSet(std::vector<int> indices);

  const std::vector<int>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool contains(int v) const;

  VertexSet united_with(const VertexSet& other) const;

 private:
  std::vector<int> indices_;
};

/// Regular grid of extent[0] x extent[1] x extent[2] meters with the lower
/// corner at the origin. Every grid cell is split into six tetrahedra sharing
/// the cell diagonal (Kuhn split). P2 meshes are obtained by edge-midpoint
/// insertion into the P1 mesh.
TetMesh generate_box_mesh(const Vec3& extent, const std::array<int, 3>& subdivisions,
                          ElementKind kind);

/// Inserts a node at every edge midpoint. Edge nodes are numbered after the
/// existing vertices, in order of first appearance while scanning elements.
TetMesh elevate_to_quadratic(const TetMesh& linear);

/// Disjoint union; vertices of `b` are shifted by `offset` and renumbered
/// after those of `a`.
TetMesh merge_meshes(const TetMesh& a, const TetMesh& b, const Vec3& offset);

/// Vertices whose rest position lies in the closed box [lo, hi].
VertexSet select_in_box(const TetMesh& mesh, const Vec3& lo, const Vec3& hi);

}  // namespace ipsolve
