#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <set>

#include "doctest.h"
#include "segden/fixtures.hpp"
#include "segden/mesh.hpp"
#include "support.hpp"

using namespace segden;

namespace {

// Plain BFS over face adjacency, written independently of face_ring.
std::vector<int> bfs_ring(const TopologyCache& topo, int seed, int depth) {
  std::vector<int> dist(topo.face_adjacent.size(), -1);
  std::queue<int> q;
  dist[seed] = 0;
  q.push(seed);
  std::vector<int> out;
  while (!q.empty()) {
    const int f = q.front();
    q.pop();
    if (dist[f] == depth) continue;
    for (int g : topo.face_adjacent[f]) {
      if (dist[g] >= 0) continue;
      dist[g] = dist[f] + 1;
      out.push_back(g);
      q.push(g);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

TriMesh tetrahedron() {
  TriMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  m.faces = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  return m;
}

}  // namespace

TEST_CASE("unit cube topology") {
  TriMesh cube = make_cube(1);
  const TopologyCache topo = build_topology(cube);
  CHECK(cube.num_vertices() == 8);
  CHECK(cube.num_faces() == 12);
  CHECK(topo.num_edges() == 18);
  CHECK(topo.mean_edge_length == doctest::Approx(1.1380711874576983).epsilon(1e-14));
  for (int e = 0; e < topo.num_edges(); ++e) {
    CHECK(topo.edges[e].v0 < topo.edges[e].v1);
    CHECK(topo.edge_faces[e].size() == 2);
  }
  for (const auto& adj : topo.face_adjacent) CHECK(adj.size() == 3);
}

TEST_CASE("euler characteristic of closed fixtures") {
  for (const TriMesh& m : {make_cube(5), make_icosahedron(2), make_sphere(2)}) {
    const TopologyCache topo = build_topology(m);
    CHECK(m.num_vertices() - topo.num_edges() + m.num_faces() == 2);
  }
}

TEST_CASE("face_edges line up with face corners") {
  const TriMesh m = make_icosahedron(1);
  const TopologyCache topo = build_topology(m);
  for (int f = 0; f < m.num_faces(); ++f) {
    for (int k = 0; k < 3; ++k) {
      const Edge& e = topo.edges[topo.face_edges[f][k]];
      const int a = m.faces[f][k], b = m.faces[f][(k + 1) % 3];
      CHECK(e.v0 == std::min(a, b));
      CHECK(e.v1 == std::max(a, b));
    }
  }
}

TEST_CASE("non-manifold edge is rejected") {
  TriMesh m = tetrahedron();
  m.vertices.emplace_back(1, 1, 1);
  m.faces.push_back({0, 1, 4});
  CHECK_THROWS_AS(build_topology(m), Error);
  try {
    build_topology(m);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonManifoldEdge);
  }
}

TEST_CASE("validate rejects bad indices") {
  TriMesh m = tetrahedron();
  m.faces.push_back({0, 0, 1});
  try {
    m.validate();
    FAIL("expected DegenerateFace");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateFace);
  }
  m.faces.back() = {0, 1, 9};
  CHECK_THROWS_AS(m.validate(), Error);
}

TEST_CASE("zero-area face is rejected by face_geometry") {
  TriMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
  m.faces = {{0, 1, 2}};
  try {
    face_geometry(m);
    FAIL("expected ZeroAreaFace");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroAreaFace);
  }
}

TEST_CASE("face geometry of a right triangle") {
  TriMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(0, 2, 0)};
  m.faces = {{0, 1, 2}};
  const FaceGeometry g = face_geometry(m);
  CHECK(g.areas[0] == doctest::Approx(2.0));
  CHECK((g.normals[0] - Vec3(0, 0, 1)).norm() < 1e-15);
  CHECK((g.centroids[0] - Vec3(2.0 / 3, 2.0 / 3, 0)).norm() < 1e-15);
}

TEST_CASE("fixture normals point outward") {
  for (const TriMesh& m : {make_cube(3), make_icosahedron(0), make_icosahedron(2), make_sphere(1)}) {
    const FaceGeometry g = face_geometry(m);
    for (int f = 0; f < m.num_faces(); ++f) CHECK(g.normals[f].dot(g.centroids[f]) > 0.0);
  }
}

TEST_CASE("flap layout") {
  const TriMesh m = make_cube(2);
  const TopologyCache topo = build_topology(m);
  for (int e = 0; e < topo.num_edges(); ++e) {
    const Flap flap = flap_of_edge(m, topo, e);
    CHECK(flap.v1 == topo.edges[e].v0);
    CHECK(flap.v3 == topo.edges[e].v1);
    CHECK(flap.face_a < flap.face_b);
    std::set<int> a(m.faces[flap.face_a].begin(), m.faces[flap.face_a].end());
    std::set<int> b(m.faces[flap.face_b].begin(), m.faces[flap.face_b].end());
    CHECK(a == std::set<int>{flap.v1, flap.v2, flap.v3});
    CHECK(b == std::set<int>{flap.v1, flap.v3, flap.v4});
    CHECK(flap.p2 == m.vertices[flap.v2]);
  }
}

TEST_CASE("boundary edge has no flap") {
  const TriMesh m = make_plane(2);
  const TopologyCache topo = build_topology(m);
  int boundary = 0;
  for (int e = 0; e < topo.num_edges(); ++e) {
    if (!topo.is_boundary(e)) continue;
    ++boundary;
    try {
      flap_of_edge(m, topo, e);
      FAIL("expected BoundaryEdge");
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::BoundaryEdge);
    }
  }
  CHECK(boundary == 8);
}

TEST_CASE("face_ring matches breadth-first search") {
  const TriMesh m = make_cube(6);
  const TopologyCache topo = build_topology(m);
  for (int depth = 0; depth <= 5; ++depth) {
    for (int f = 0; f < m.num_faces(); f += 7) CHECK(face_ring(topo, f, depth) == bfs_ring(topo, f, depth));
  }
}

TEST_CASE("face_ring grows monotonically with depth") {
  const TriMesh m = make_sphere(2);
  const TopologyCache topo = build_topology(m);
  for (int f = 0; f < m.num_faces(); f += 13) {
    std::vector<int> prev;
    for (int depth = 1; depth <= 6; ++depth) {
      const std::vector<int> ring = face_ring(topo, f, depth);
      CHECK(std::includes(ring.begin(), ring.end(), prev.begin(), prev.end()));
      CHECK(ring.size() >= prev.size());
      CHECK(!std::binary_search(ring.begin(), ring.end(), f));
      prev = ring;
    }
  }
}

TEST_CASE("geometric neighborhood equals brute force") {
  const TriMesh m = make_sphere(3);
  const TopologyCache topo = build_topology(m);
  const FaceGeometry g = face_geometry(m);
  for (double r : {0.0, 0.5, 1.0, 2.0, 3.5, 40.0}) {
    const double radius = r * topo.mean_edge_length;
    const CentroidIndex index(g.centroids, topo.mean_edge_length);
    for (int f = 0; f < m.num_faces(); f += 17) {
      std::vector<int> brute;
      for (int h = 0; h < m.num_faces(); ++h) {
        if (h != f && (g.centroids[h] - g.centroids[f]).norm() <= radius) brute.push_back(h);
      }
      CHECK(index.within(f, radius) == brute);
      if (f % 51 == 0) CHECK(geometric_neighborhood(m, topo, f, r) == brute);
    }
  }
  const CentroidIndex index(g.centroids, topo.mean_edge_length);
  CHECK(index.within(0, std::numeric_limits<double>::infinity()).size() == std::size_t(m.num_faces() - 1));
}

TEST_CASE("topology is equivariant under vertex relabeling") {
  const TriMesh m = make_icosahedron(2);
  std::vector<int> perm(m.num_vertices());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(3);
  std::shuffle(perm.begin(), perm.end(), rng);
  TriMesh p;
  p.vertices.resize(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) p.vertices[perm[v]] = m.vertices[v];
  for (const Face& f : m.faces) p.faces.push_back({perm[f[0]], perm[f[1]], perm[f[2]]});

  const TopologyCache a = build_topology(m);
  const TopologyCache b = build_topology(p);
  CHECK(a.num_edges() == b.num_edges());
  CHECK(a.mean_edge_length == doctest::Approx(b.mean_edge_length).epsilon(1e-14));
  CHECK(a.face_adjacent == b.face_adjacent);
  for (int f = 0; f < m.num_faces(); f += 11) CHECK(face_ring(a, f, 3) == face_ring(b, f, 3));
}

TEST_CASE("vertex normals and bounding box") {
  const TriMesh m = make_sphere(3);
  const auto normals = vertex_normals(m);
  for (int v = 0; v < m.num_vertices(); ++v) {
    CHECK(normals[v].norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(normals[v].dot(m.vertices[v].normalized()) > 0.99);
  }
  CHECK(bounding_box_diagonal(make_cube(2)) == doctest::Approx(std::sqrt(3.0)));

  TriMesh lonely = make_cube(1);
  lonely.vertices.emplace_back(5, 5, 5);
  CHECK(vertex_normals(lonely).back().norm() == 0.0);
}
