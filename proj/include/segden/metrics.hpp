#pragma once

#include <vector>

#include <Eigen/Geometry>

#include "segden/mesh.hpp"

namespace segden {

struct MetricsReport {
  double msae = 0.0;  // radians^2
  double ev = 0.0;    // squared distance / squared truth bounding-box diagonal
  std::vector<double> face_angle_errors;  // radians, optional
};

// Mean over faces of the squared angle between corresponding face normals.
// A zero-area result face counts as a right-angle error.
// Throws ConnectivityMismatch unless both meshes share the face list.
double msae(const TriMesh& result, const TriMesh& truth, std::vector<double>* face_angles = nullptr);

// Mean over result vertices of the squared distance to the truth surface,
// divided by the squared diagonal of the truth bounding box.
double ev(const TriMesh& result, const TriMesh& truth);

MetricsReport evaluate(const TriMesh& result, const TriMesh& truth, bool keep_face_errors = false);

// Closest point on triangle (a, b, c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Axis-aligned bounding-volume hierarchy over the triangles of a mesh.
class TriangleBvh {
 public:
  explicit TriangleBvh(const TriMesh& mesh);

  // Squared distance from p to the nearest triangle. Throws EmptyMesh for a
  // mesh without faces.
  double squared_distance(const Vec3& p) const;

 private:
  struct Node {
    Eigen::AlignedBox3d box;
    int left = -1;   // child nodes, or -1 for a leaf
    int right = -1;
    int first = 0;   // leaf range in order_
    int count = 0;
  };

  int build(int first, int count);

  const TriMesh& mesh_;
  std::vector<Node> nodes_;
  std::vector<int> order_;
  std::vector<Eigen::AlignedBox3d> tri_boxes_;
  std::vector<Vec3> tri_centers_;
};

}  // namespace segden
