#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Geometry>

#include "segden/mesh.hpp"

namespace segden::testing {

// Fresh per-test scratch directory under the current working directory.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::current_path() / "scratch" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  return q.normalized().toRotationMatrix();
}

inline TriMesh transformed(const TriMesh& mesh, const Eigen::Matrix3d& r, const Vec3& t) {
  TriMesh out = mesh;
  for (Vec3& v : out.vertices) v = r * v + t;
  return out;
}

inline double max_vertex_deviation(const TriMesh& a, const TriMesh& b) {
  double worst = 0.0;
  for (int i = 0; i < a.num_vertices(); ++i) worst = std::max(worst, (a.vertices[i] - b.vertices[i]).norm());
  return worst;
}

// Unit-square plane (z = 0) with interior vertices jittered inside the plane.
inline TriMesh jittered_plane(const TriMesh& plane, double amount, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amount, amount);
  TriMesh out = plane;
  for (Vec3& v : out.vertices) {
    const bool interior = v.x() > 1e-9 && v.x() < 1.0 - 1e-9 && v.y() > 1e-9 && v.y() < 1.0 - 1e-9;
    if (interior) {
      v.x() += u(rng);
      v.y() += u(rng);
    }
  }
  return out;
}

}  // namespace segden::testing
