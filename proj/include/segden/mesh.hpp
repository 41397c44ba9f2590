#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "segden/error.hpp"

namespace segden {

using Vec3 = Eigen::Vector3d;
using Face = std::array<int, 3>;

// Indexed triangle mesh. Faces are counter-clockwise when seen from outside.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_faces() const { return static_cast<int>(faces.size()); }
  bool empty() const { return faces.empty(); }

  // Throws DegenerateFace for out-of-range or repeated indices.
  void validate() const;
};

struct Edge {
  int v0;  // v0 < v1
  int v1;
};

// Adjacency derived from a TriMesh. Immutable after build_topology().
struct TopologyCache {
  std::vector<Edge> edges;
  std::vector<std::vector<int>> edge_faces;    // ascending face ids, size 1 or 2
  std::vector<std::array<int, 3>> face_edges;  // edge of (f[0],f[1]), (f[1],f[2]), (f[2],f[0])
  std::vector<std::vector<int>> face_adjacent; // ascending, size <= 3
  std::vector<std::vector<int>> vertex_faces;  // ascending
  double mean_edge_length = 0.0;

  int num_edges() const { return static_cast<int>(edges.size()); }
  bool is_boundary(int edge) const { return edge_faces[edge].size() == 1; }
};

struct FaceGeometry {
  std::vector<Vec3> normals;
  std::vector<Vec3> centroids;
  std::vector<double> areas;
};

// The two triangles sharing an interior edge. p1,p3 lie on the edge,
// {p1,p2,p3} is face_a and {p1,p3,p4} is face_b.
struct Flap {
  Vec3 p1, p2, p3, p4;
  int v1 = -1, v2 = -1, v3 = -1, v4 = -1;  // vertex ids of p1..p4
  int face_a = -1;
  int face_b = -1;
};

TopologyCache build_topology(const TriMesh& mesh);

FaceGeometry face_geometry(const TriMesh& mesh);

// face_a is the smaller incident face id, p1 is the smaller edge vertex id.
Flap flap_of_edge(const TriMesh& mesh, const TopologyCache& topo, int edge);

// Faces within `depth` edge-adjacency steps of `face`, excluding `face`.
// Sorted ascending.
std::vector<int> face_ring(const TopologyCache& topo, int face, int depth);

// Spatial hash over face centroids. Answers "faces whose centroid lies within
// radius of the query centroid" in expected O(output).
class CentroidIndex {
 public:
  CentroidIndex(std::vector<Vec3> centroids, double cell_size);

  // Sorted ascending, excluding `face`. radius may be +inf.
  std::vector<int> within(int face, double radius) const;
  const std::vector<Vec3>& centroids() const { return centroids_; }

 private:
  std::int64_t cell_key(const Eigen::Vector3i& c) const;
  Eigen::Vector3i cell_of(const Vec3& p) const;

  std::vector<Vec3> centroids_;
  double cell_size_;
  Vec3 origin_;
  // Sorted (key, face) pairs; cells are contiguous runs.
  std::vector<std::pair<std::int64_t, int>> cells_;
};

// Faces whose centroid lies within radius_multiplier * mean_edge_length of
// the centroid of `face`, excluding `face`. Builds an index per call; use
// CentroidIndex directly for repeated queries.
std::vector<int> geometric_neighborhood(const TriMesh& mesh, const TopologyCache& topo, int face,
                                        double radius_multiplier);

// Area-weighted vertex normals; isolated vertices get a zero vector.
std::vector<Vec3> vertex_normals(const TriMesh& mesh);

double bounding_box_diagonal(const TriMesh& mesh);

}  // namespace segden
