#include "segden/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

namespace segden {

namespace {

void require_same_connectivity(const TriMesh& result, const TriMesh& truth) {
  if (result.num_faces() != truth.num_faces() || result.num_vertices() != truth.num_vertices() ||
      result.faces != truth.faces) {
    throw Error(ErrorCode::ConnectivityMismatch,
                "result has " + std::to_string(result.num_vertices()) + " vertices / " +
                    std::to_string(result.num_faces()) + " faces, truth has " +
                    std::to_string(truth.num_vertices()) + " / " + std::to_string(truth.num_faces()));
  }
}

Vec3 raw_normal(const TriMesh& m, int f) {
  const Face& t = m.faces[f];
  const Vec3 n = (m.vertices[t[1]] - m.vertices[t[0]]).cross(m.vertices[t[2]] - m.vertices[t[0]]);
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

}  // namespace

double msae(const TriMesh& result, const TriMesh& truth, std::vector<double>* face_angles) {
  require_same_connectivity(result, truth);
  const int nf = truth.num_faces();
  if (nf == 0) return 0.0;
  if (face_angles) face_angles->assign(nf, 0.0);
  double total = 0.0;
  for (int f = 0; f < nf; ++f) {
    const Vec3 a = raw_normal(result, f);
    const Vec3 b = raw_normal(truth, f);
    const double angle = a.isZero(0.0) || b.isZero(0.0) ? std::numbers::pi / 2.0 : std::atan2(a.cross(b).norm(), a.dot(b));
    if (face_angles) (*face_angles)[f] = angle;
    total += angle * angle;
  }
  return total / nf;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Voronoi-region walk over vertices, edges and the face interior.
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  }

  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

TriangleBvh::TriangleBvh(const TriMesh& mesh) : mesh_(mesh) {
  const int nf = mesh.num_faces();
  order_.resize(nf);
  tri_boxes_.resize(nf);
  tri_centers_.resize(nf);
  for (int f = 0; f < nf; ++f) {
    order_[f] = f;
    Eigen::AlignedBox3d box;
    for (int v : mesh.faces[f]) box.extend(mesh.vertices[v]);
    tri_boxes_[f] = box;
    tri_centers_[f] = box.center();
  }
  if (nf > 0) {
    nodes_.reserve(2 * nf);
    build(0, nf);
  }
}

int TriangleBvh::build(int first, int count) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Eigen::AlignedBox3d box;
  Eigen::AlignedBox3d center_box;
  for (int k = first; k < first + count; ++k) {
    box.extend(tri_boxes_[order_[k]]);
    center_box.extend(tri_centers_[order_[k]]);
  }
  nodes_[id].box = box;
  constexpr int kLeafSize = 4;
  if (count <= kLeafSize) {
    nodes_[id].first = first;
    nodes_[id].count = count;
    return id;
  }
  int axis = 0;
  center_box.sizes().maxCoeff(&axis);
  const int mid = first + count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                   [&](int a, int b) { return tri_centers_[a][axis] < tri_centers_[b][axis]; });
  const int left = build(first, mid - first);
  const int right = build(mid, first + count - mid);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double TriangleBvh::squared_distance(const Vec3& p) const {
  if (nodes_.empty()) throw Error(ErrorCode::EmptyMesh, "distance query against a mesh without faces");
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (node.box.squaredExteriorDistance(p) > best) continue;
    if (node.left < 0) {
      for (int k = node.first; k < node.first + node.count; ++k) {
        const Face& t = mesh_.faces[order_[k]];
        const Vec3 q = closest_point_on_triangle(p, mesh_.vertices[t[0]], mesh_.vertices[t[1]], mesh_.vertices[t[2]]);
        best = std::min(best, (q - p).squaredNorm());
      }
      continue;
    }
    // Visit the nearer child first.
    const double dl = nodes_[node.left].box.squaredExteriorDistance(p);
    const double dr = nodes_[node.right].box.squaredExteriorDistance(p);
    if (dl < dr) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  return best;
}

double ev(const TriMesh& result, const TriMesh& truth) {
  if (truth.empty()) throw Error(ErrorCode::EmptyMesh, "ground truth has no faces");
  if (result.vertices.empty()) return 0.0;
  const TriangleBvh bvh(truth);
  const double diag = bounding_box_diagonal(truth);
  const double scale = diag > 0.0 ? diag * diag : 1.0;
  double total = 0.0;
  for (const Vec3& v : result.vertices) total += bvh.squared_distance(v);
  return total / static_cast<double>(result.num_vertices()) / scale;
}

MetricsReport evaluate(const TriMesh& result, const TriMesh& truth, bool keep_face_errors) {
  MetricsReport report;
  report.msae = msae(result, truth, keep_face_errors ? &report.face_angle_errors : nullptr);
  report.ev = ev(result, truth);
  return report;
}

}  // namespace segden
