#include "segden/fixtures.hpp"

#include <cmath>
#include <map>
#include <string>
#include <utility>

namespace segden {

TriMesh make_cube(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "cube subdivision must be >= 1");
  TriMesh mesh;
  const int side = n + 1;
  std::vector<int> lattice(static_cast<std::size_t>(side) * side * side, -1);
  auto vertex = [&](const Eigen::Vector3i& c) {
    int& id = lattice[(static_cast<std::size_t>(c.x()) * side + c.y()) * side + c.z()];
    if (id < 0) {
      id = mesh.num_vertices();
      mesh.vertices.push_back(c.cast<double>() / n - Vec3::Constant(0.5));
    }
    return id;
  };

  for (int axis = 0; axis < 3; ++axis) {
    for (int positive = 0; positive < 2; ++positive) {
      int u = (axis + 1) % 3;
      int v = (axis + 2) % 3;
      if (!positive) std::swap(u, v);  // keeps e_u x e_v pointing outward
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          auto corner = [&](int di, int dj) {
            Eigen::Vector3i c;
            c[axis] = positive ? n : 0;
            c[u] = i + di;
            c[v] = j + dj;
            return vertex(c);
          };
          const int q00 = corner(0, 0), q10 = corner(1, 0), q11 = corner(1, 1), q01 = corner(0, 1);
          mesh.faces.push_back({q00, q10, q11});
          mesh.faces.push_back({q00, q11, q01});
        }
      }
    }
  }
  return mesh;
}

namespace {

TriMesh base_icosahedron() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  TriMesh m;
  m.vertices = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
                {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (Vec3& p : m.vertices) p.normalize();
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
             {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  return m;
}

TriMesh midpoint_split(const TriMesh& in, bool project) {
  TriMesh out;
  out.vertices = in.vertices;
  std::map<std::pair<int, int>, int> midpoints;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto [it, inserted] = midpoints.try_emplace(key, out.num_vertices());
    if (inserted) {
      Vec3 p = 0.5 * (out.vertices[a] + out.vertices[b]);
      if (project) p.normalize();
      out.vertices.push_back(p);
    }
    return it->second;
  };
  out.faces.reserve(in.faces.size() * 4);
  for (const Face& f : in.faces) {
    const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
    out.faces.push_back({f[0], ab, ca});
    out.faces.push_back({ab, f[1], bc});
    out.faces.push_back({ca, bc, f[2]});
    out.faces.push_back({ab, bc, ca});
  }
  return out;
}

TriMesh subdivided_icosahedron(int levels, bool project) {
  if (levels < 0 || levels > 8) throw Error(ErrorCode::InvalidArgument, "icosahedron levels must be in [0, 8]");
  TriMesh m = base_icosahedron();
  for (int k = 0; k < levels; ++k) m = midpoint_split(m, project);
  return m;
}

}  // namespace

TriMesh make_icosahedron(int levels) { return subdivided_icosahedron(levels, false); }

TriMesh make_sphere(int levels) { return subdivided_icosahedron(levels, true); }

TriMesh make_plane(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "plane subdivision must be >= 1");
  TriMesh m;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) m.vertices.emplace_back(double(i) / n, double(j) / n, 0.0);
  }
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return m;
}

TriMesh make_fixture(std::string_view shape, int subdiv) {
  if (shape == "cube") return make_cube(subdiv);
  if (shape == "icosahedron") return make_icosahedron(subdiv);
  if (shape == "sphere") return make_sphere(subdiv);
  if (shape == "plane") return make_plane(subdiv);
  throw Error(ErrorCode::InvalidArgument, "unknown fixture shape '" + std::string(shape) + "'");
}

}  // namespace segden
