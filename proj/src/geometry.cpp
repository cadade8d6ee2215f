#include "ipsolve/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Geometry>

namespace ipsolve {

namespace {

double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

}  // namespace

TetMesh::TetMesh(std::vector<Vec3> vertices, std::vector<int> connectivity, ElementKind kind)
    : vertices_(std::move(vertices)), connectivity_(std::move(connectivity)), kind_(kind) {
  const auto n = static_cast<std::size_t>(nodes_per_element());
  if (connectivity_.size() % n != 0) {
    throw std::invalid_argument("TetMesh: connectivity length is not a multiple of the element size");
  }
  const auto nv = static_cast<int>(vertices_.size());
  for (int idx : connectivity_) {
    if (idx < 0 || idx >= nv) throw std::invalid_argument("TetMesh: node index out of range");
  }
  for (std::size_t e = 0; e < num_elements(); ++e) {
    if (!(signed_volume(e) > 0.0)) {
      throw std::invalid_argument("TetMesh: element " + std::to_string(e) +
                                  " has non-positive rest volume");
    }
    if (kind_ == ElementKind::P2) {
      const auto nodes = element(e);
      const double scale = std::cbrt(signed_volume(e));
      for (std::size_t k = 0; k < kTetEdges.size(); ++k) {
        const Vec3 mid = 0.5 * (vertices_[nodes[kTetEdges[k][0]]] + vertices_[nodes[kTetEdges[k][1]]]);
        if ((vertices_[nodes[4 + k]] - mid).norm() > 1e-10 * scale) {
          throw std::invalid_argument("TetMesh: edge node is not at the rest edge midpoint");
        }
      }
    }
  }
}

double TetMesh::signed_volume(std::size_t e) const {
  const auto nodes = element(e);
  return tet_volume(vertices_[nodes[0]], vertices_[nodes[1]], vertices_[nodes[2]], vertices_[nodes[3]]);
}

double TetMesh::total_volume() const {
  double sum = 0.0;
  for (std::size_t e = 0; e < num_elements(); ++e) sum += signed_volume(e);
  return sum;
}

VertexSet::VertexSet(std::vector<int> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
}

bool VertexSet::contains(int v) const {
  return std::binary_search(indices_.begin(), indices_.end(), v);
}

VertexSet VertexSet::united_with(const VertexSet& other) const {
  std::vector<int> merged = indices_;
  merged.insert(merged.end(), other.indices_.begin(), other.indices_.end());
  return VertexSet(std::move(merged));
}

TetMesh generate_box_mesh(const Vec3& extent, const std::array<int, 3>& subdivisions,
                          ElementKind kind) {
  for (int d = 0; d < 3; ++d) {
    if (!(extent[d] > 0.0)) throw std::invalid_argument("generate_box_mesh: extents must be positive");
    if (subdivisions[d] < 1) throw std::invalid_argument("generate_box_mesh: subdivisions must be >= 1");
  }
  const auto [nx, ny, nz] = subdivisions;
  auto vertex_index = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };

  std::vector<Vec3> vertices;
  vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1) * (nz + 1)));
  for (int k = 0; k <= nz; ++k) {
    for (int j = 0; j <= ny; ++j) {
      for (int i = 0; i <= nx; ++i) {
        vertices.emplace_back(extent[0] * i / nx, extent[1] * j / ny, extent[2] * k / nz);
      }
    }
  }

  // The six Kuhn simplices of the unit cube walk from corner 000 to 111 along
  // the axes in every possible order.
  static constexpr std::array<std::array<int, 3>, 6> kAxisOrders{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

  std::vector<int> connectivity;
  connectivity.reserve(static_cast<std::size_t>(24 * nx * ny * nz));
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        for (const auto& order : kAxisOrders) {
          std::array<int, 3> corner{i, j, k};
          std::array<int, 4> tet{};
          tet[0] = vertex_index(corner[0], corner[1], corner[2]);
          for (int s = 0; s < 3; ++s) {
            corner[order[s]] += 1;
            tet[s + 1] = vertex_index(corner[0], corner[1], corner[2]);
          }
          if (tet_volume(vertices[tet[0]], vertices[tet[1]], vertices[tet[2]], vertices[tet[3]]) < 0.0) {
            std::swap(tet[1], tet[2]);
          }
          connectivity.insert(connectivity.end(), tet.begin(), tet.end());
        }
      }
    }
  }

  TetMesh linear(std::move(vertices), std::move(connectivity), ElementKind::P1);
  return kind == ElementKind::P1 ? linear : elevate_to_quadratic(linear);
}

TetMesh elevate_to_quadratic(const TetMesh& linear) {
  if (linear.kind() != ElementKind::P1) {
    throw std::invalid_argument("elevate_to_quadratic: input must be a linear mesh");
  }
  std::vector<Vec3> vertices = linear.vertices();
  std::map<std::pair<int, int>, int> edge_nodes;
  std::vector<int> connectivity;
  connectivity.reserve(linear.num_elements() * 10);
  for (std::size_t e = 0; e < linear.num_elements(); ++e) {
    const auto corners = linear.element(e);
    connectivity.insert(connectivity.end(), corners.begin(), corners.end());
    for (const auto& edge : kTetEdges) {
      const int a = corners[edge[0]];
      const int b = corners[edge[1]];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = edge_nodes.try_emplace(key, static_cast<int>(vertices.size()));
      if (inserted) vertices.push_back(0.5 * (vertices[a] + vertices[b]));
      connectivity.push_back(it->second);
    }
  }
  return TetMesh(std::move(vertices), std::move(connectivity), ElementKind::P2);
}

TetMesh merge_meshes(const TetMesh& a, const TetMesh& b, const Vec3& offset) {
  if (a.kind() != b.kind()) throw std::invalid_argument("merge_meshes: element kinds differ");
  std::vector<Vec3> vertices = a.vertices();
  for (const auto& v : b.vertices()) vertices.push_back(v + offset);
  std::vector<int> connectivity = a.connectivity();
  const auto shift = static_cast<int>(a.num_vertices());
  for (int idx : b.connectivity()) connectivity.push_back(idx + shift);
  return TetMesh(std::move(vertices), std::move(connectivity), a.kind());
}

VertexSet select_in_box(const TetMesh& mesh, const Vec3& lo, const Vec3& hi) {
  std::vector<int> selected;
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    const Vec3& x = mesh.vertex(i);
    if ((x.array() >= lo.array()).all() && (x.array() <= hi.array()).all()) {
      selected.push_back(static_cast<int>(i));
    }
  }
  return VertexSet(std::move(selected));
}

}  // namespace ipsolve
