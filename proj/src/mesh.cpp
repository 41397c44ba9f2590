#include "segden/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

namespace segden {

void TriMesh::validate() const {
  const int nv = num_vertices();
  for (int f = 0; f < num_faces(); ++f) {
    const Face& t = faces[f];
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= nv) {
        throw Error(ErrorCode::DegenerateFace,
                    "face " + std::to_string(f) + " references vertex " + std::to_string(t[k]) +
                        " (vertex count " + std::to_string(nv) + ")");
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw Error(ErrorCode::DegenerateFace, "face " + std::to_string(f) + " repeats a vertex");
    }
  }
}

TopologyCache build_topology(const TriMesh& mesh) {
  mesh.validate();
  TopologyCache topo;
  const int nf = mesh.num_faces();
  const int nv = mesh.num_vertices();

  std::unordered_map<std::uint64_t, int> edge_ids;
  edge_ids.reserve(static_cast<std::size_t>(nf) * 2);
  topo.face_edges.resize(nf);
  topo.vertex_faces.assign(nv, {});

  for (int f = 0; f < nf; ++f) {
    const Face& t = mesh.faces[f];
    for (int k = 0; k < 3; ++k) {
      int a = t[k];
      int b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
      auto [it, inserted] = edge_ids.try_emplace(key, topo.num_edges());
      if (inserted) {
        topo.edges.push_back({a, b});
        topo.edge_faces.emplace_back();
      }
      const int e = it->second;
      auto& incident = topo.edge_faces[e];
      if (incident.size() == 2) {
        throw Error(ErrorCode::NonManifoldEdge, "edge (" + std::to_string(a) + "," + std::to_string(b) +
                                                    ") has more than two incident faces");
      }
      incident.push_back(f);
      topo.face_edges[f][k] = e;
      topo.vertex_faces[t[k]].push_back(f);
    }
  }

  topo.face_adjacent.assign(nf, {});
  for (int f = 0; f < nf; ++f) {
    for (int e : topo.face_edges[f]) {
      for (int g : topo.edge_faces[e]) {
        if (g != f) topo.face_adjacent[f].push_back(g);
      }
    }
    std::sort(topo.face_adjacent[f].begin(), topo.face_adjacent[f].end());
  }

  double total = 0.0;
  for (const Edge& e : topo.edges) total += (mesh.vertices[e.v0] - mesh.vertices[e.v1]).norm();
  topo.mean_edge_length = topo.edges.empty() ? 0.0 : total / static_cast<double>(topo.edges.size());
  return topo;
}

FaceGeometry face_geometry(const TriMesh& mesh) {
  const int nf = mesh.num_faces();
  FaceGeometry g;
  g.normals.resize(nf);
  g.centroids.resize(nf);
  g.areas.resize(nf);
  for (int f = 0; f < nf; ++f) {
    const Vec3& a = mesh.vertices[mesh.faces[f][0]];
    const Vec3& b = mesh.vertices[mesh.faces[f][1]];
    const Vec3& c = mesh.vertices[mesh.faces[f][2]];
    const Vec3 cross = (b - a).cross(c - a);
    const double len = cross.norm();
    if (!(len > 0.0) || !std::isfinite(len)) {
      throw Error(ErrorCode::ZeroAreaFace, "face " + std::to_string(f));
    }
    g.normals[f] = cross / len;
    g.centroids[f] = (a + b + c) / 3.0;
    g.areas[f] = 0.5 * len;
  }
  return g;
}

namespace {

int third_vertex(const Face& f, int a, int b) {
  for (int v : f) {
    if (v != a && v != b) return v;
  }
  return -1;
}

}  // namespace

Flap flap_of_edge(const TriMesh& mesh, const TopologyCache& topo, int edge) {
  const auto& incident = topo.edge_faces.at(edge);
  if (incident.size() != 2) {
    throw Error(ErrorCode::BoundaryEdge, "edge " + std::to_string(edge));
  }
  const Edge& e = topo.edges[edge];
  Flap flap;
  flap.face_a = incident[0];
  flap.face_b = incident[1];
  flap.v1 = e.v0;
  flap.v3 = e.v1;
  flap.v2 = third_vertex(mesh.faces[flap.face_a], e.v0, e.v1);
  flap.v4 = third_vertex(mesh.faces[flap.face_b], e.v0, e.v1);
  flap.p1 = mesh.vertices[flap.v1];
  flap.p2 = mesh.vertices[flap.v2];
  flap.p3 = mesh.vertices[flap.v3];
  flap.p4 = mesh.vertices[flap.v4];
  return flap;
}

std::vector<int> face_ring(const TopologyCache& topo, int face, int depth) {
  std::vector<int> ring;
  if (depth < 1) return ring;
  std::vector<int> frontier{face};
  std::vector<int> next;
  if (depth <= 3) {
    // Small rings: a sorted visited list beats a face-count sized bitmap.
    std::vector<int> visited{face};
    for (int d = 0; d < depth && !frontier.empty(); ++d) {
      next.clear();
      for (int f : frontier) {
        for (int g : topo.face_adjacent[f]) {
          auto it = std::lower_bound(visited.begin(), visited.end(), g);
          if (it != visited.end() && *it == g) continue;
          visited.insert(it, g);
          next.push_back(g);
          ring.push_back(g);
        }
      }
      std::swap(frontier, next);
    }
  } else {
    std::vector<char> visited(topo.face_adjacent.size(), 0);
    visited[face] = 1;
    for (int d = 0; d < depth && !frontier.empty(); ++d) {
      next.clear();
      for (int f : frontier) {
        for (int g : topo.face_adjacent[f]) {
          if (visited[g]) continue;
          visited[g] = 1;
          next.push_back(g);
          ring.push_back(g);
        }
      }
      std::swap(frontier, next);
    }
  }
  std::sort(ring.begin(), ring.end());
  return ring;
}

CentroidIndex::CentroidIndex(std::vector<Vec3> centroids, double cell_size)
    : centroids_(std::move(centroids)), cell_size_(cell_size > 0.0 ? cell_size : 1.0) {
  origin_ = Vec3::Zero();
  if (!centroids_.empty()) {
    origin_ = centroids_.front();
    Vec3 hi = origin_;
    for (const Vec3& c : centroids_) {
      origin_ = origin_.cwiseMin(c);
      hi = hi.cwiseMax(c);
    }
    // Keep cell coordinates inside the 21-bit key fields.
    cell_size_ = std::max(cell_size_, (hi - origin_).maxCoeff() / 1.0e6);
  }
  cells_.reserve(centroids_.size());
  for (int f = 0; f < static_cast<int>(centroids_.size()); ++f) {
    cells_.emplace_back(cell_key(cell_of(centroids_[f])), f);
  }
  std::sort(cells_.begin(), cells_.end());
}

Eigen::Vector3i CentroidIndex::cell_of(const Vec3& p) const {
  const Vec3 rel = (p - origin_) / cell_size_;
  return Eigen::Vector3i(static_cast<int>(std::floor(rel.x())), static_cast<int>(std::floor(rel.y())),
                         static_cast<int>(std::floor(rel.z())));
}

std::int64_t CentroidIndex::cell_key(const Eigen::Vector3i& c) const {
  return (static_cast<std::int64_t>(c.x()) << 42) | (static_cast<std::int64_t>(c.y()) << 21) |
         static_cast<std::int64_t>(c.z());
}

std::vector<int> CentroidIndex::within(int face, double radius) const {
  std::vector<int> out;
  const int nf = static_cast<int>(centroids_.size());
  if (!(radius > 0.0)) return out;
  const Vec3& q = centroids_[face];
  const double r2 = radius * radius;

  const double span = radius / cell_size_;
  const double cells_scanned = std::pow(2.0 * span + 1.0, 3.0);
  if (!std::isfinite(span) || cells_scanned > static_cast<double>(nf)) {
    for (int g = 0; g < nf; ++g) {
      if (g != face && (centroids_[g] - q).squaredNorm() <= r2) out.push_back(g);
    }
    return out;
  }

  const Eigen::Vector3i lo = cell_of(q - Vec3::Constant(radius)).cwiseMax(0);
  const Eigen::Vector3i hi = cell_of(q + Vec3::Constant(radius));
  for (int x = lo.x(); x <= hi.x(); ++x) {
    for (int y = lo.y(); y <= hi.y(); ++y) {
      // z cells of one (x,y) column are contiguous keys.
      const auto first = std::lower_bound(cells_.begin(), cells_.end(),
                                          std::make_pair(cell_key({x, y, lo.z()}), -1));
      const auto last = std::lower_bound(cells_.begin(), cells_.end(),
                                         std::make_pair(cell_key({x, y, hi.z() + 1}), -1));
      for (auto it = first; it != last; ++it) {
        const int g = it->second;
        if (g != face && (centroids_[g] - q).squaredNorm() <= r2) out.push_back(g);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> geometric_neighborhood(const TriMesh& mesh, const TopologyCache& topo, int face,
                                        double radius_multiplier) {
  std::vector<Vec3> centroids(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& t = mesh.faces[f];
    centroids[f] = (mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]) / 3.0;
  }
  const CentroidIndex index(std::move(centroids), topo.mean_edge_length);
  return index.within(face, radius_multiplier * topo.mean_edge_length);
}

std::vector<Vec3> vertex_normals(const TriMesh& mesh) {
  std::vector<Vec3> normals(mesh.num_vertices(), Vec3::Zero());
  for (const Face& t : mesh.faces) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3 weighted = (mesh.vertices[t[1]] - a).cross(mesh.vertices[t[2]] - a);
    for (int v : t) normals[v] += weighted;
  }
  for (Vec3& n : normals) {
    const double len = n.norm();
    if (len > 0.0) n /= len;
  }
  return normals;
}

double bounding_box_diagonal(const TriMesh& mesh) {
  if (mesh.vertices.empty()) return 0.0;
  Vec3 lo = mesh.vertices.front();
  Vec3 hi = lo;
  for (const Vec3& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (hi - lo).norm();
}

}  // namespace segden
