#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "segden/edge_operator.hpp"
#include "segden/fixtures.hpp"
#include "segden/noise.hpp"
#include "segden/prefilter.hpp"
#include "support.hpp"

using namespace segden;

TEST_CASE("edge weight at a right-angle crease") {
  const TriMesh cube = make_cube(1);
  const TopologyCache topo = build_topology(cube);
  const FaceGeometry g = face_geometry(cube);
  const auto w = edge_weights(topo, g, 0.35);
  int crease = 0, flat = 0;
  for (int e = 0; e < topo.num_edges(); ++e) {
    const auto& ef = topo.edge_faces[e];
    if (g.normals[ef[0]].dot(g.normals[ef[1]]) > 0.5) {
      ++flat;
      CHECK(w[e] == doctest::Approx(1.0));
    } else {
      ++crease;
      CHECK(w[e] == doctest::Approx(0.00028493048887656838).epsilon(1e-12));
    }
  }
  CHECK(crease == 12);
  CHECK(flat == 6);
}

TEST_CASE("boundary edges carry no weight") {
  const TriMesh plane = make_plane(2);
  const TopologyCache topo = build_topology(plane);
  const auto w = edge_weights(topo, face_geometry(plane), 0.35);
  for (int e = 0; e < topo.num_edges(); ++e) CHECK(w[e] == (topo.is_boundary(e) ? 0.0 : 1.0));
}

TEST_CASE("regularizer of the generic flap") {
  Flap f;
  f.p1 = Vec3(0.1, -0.2, 0.05);
  f.p2 = Vec3(0.7, 0.9, 0.2);
  f.p3 = Vec3(1.3, 0.1, -0.1);
  f.p4 = Vec3(0.4, -1.1, 0.6);
  CHECK((regularizer(f) - Vec3(0.15, 0.05, -0.425)).norm() < 1e-15);
}

TEST_CASE("zero weights give the identity") {
  const TriMesh noisy = add_noise(make_cube(6), {0.4, NoiseMode::AlongNormal, 2});
  PrefilterParams p;
  p.alpha = 0.0;
  p.beta = 0.0;
  CHECK(testing::max_vertex_deviation(prefilter(noisy, p), noisy) == 0.0);
}

TEST_CASE("frozen energy decreases and residual meets the target") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const TriMesh noisy = add_noise(make_icosahedron(2), {0.3, NoiseMode::AlongNormal, seed});
    PrefilterParams p;
    p.alpha = 1.0;
    p.beta = 0.5;
    const TopologyCache topo = build_topology(noisy);
    const PrefilterSystem system = assemble_prefilter(noisy, topo, p);
    const PrefilterResult r = prefilter_solve(noisy, p);
    CHECK(system.energy(r.mesh.vertices, noisy.vertices) <= system.energy(noisy.vertices, noisy.vertices));
    CHECK(r.relative_residual <= p.solver_tol);
    CHECK(system.relative_residual(r.mesh.vertices, noisy.vertices) <= p.solver_tol);
    CHECK(r.iterations > 0);
  }
}

TEST_CASE("system matrix is symmetric and shifted by the identity") {
  const TriMesh noisy = add_noise(make_cube(3), {0.3, NoiseMode::AlongNormal, 5});
  const PrefilterSystem system = assemble_prefilter(noisy, build_topology(noisy), PrefilterParams{});
  const Eigen::MatrixXd m(system.matrix);
  CHECK((m - m.transpose()).norm() < 1e-14);
  // M - I is positive semi-definite.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  CHECK(eig.eigenvalues().minCoeff() >= 1.0 - 1e-12);
}

TEST_CASE("energy matches the explicit sum of squares") {
  const TriMesh noisy = add_noise(make_cube(2), {0.3, NoiseMode::AlongNormal, 8});
  PrefilterParams p;
  p.alpha = 0.7;
  p.beta = 0.2;
  const TopologyCache topo = build_topology(noisy);
  const FaceGeometry g = face_geometry(noisy);
  const PrefilterSystem system = assemble_prefilter(noisy, topo, p);
  const auto w = edge_weights(topo, g, p.sigma_w);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 0.05);
  std::vector<Vec3> q = noisy.vertices;
  for (Vec3& v : q) v += Vec3(n(rng), n(rng), n(rng));
  TriMesh moved = noisy;
  moved.vertices = q;

  // Coefficients stay frozen at the reference geometry.
  double expect = 0.0;
  for (int v = 0; v < noisy.num_vertices(); ++v) expect += (q[v] - noisy.vertices[v]).squaredNorm();
  for (int e = 0; e < topo.num_edges(); ++e) {
    const Flap ref = flap_of_edge(noisy, topo, e);
    const auto c = edge_operator_coefficients(ref).c;
    const Vec3 d = c[0] * q[ref.v1] + c[1] * q[ref.v2] + c[2] * q[ref.v3] + c[3] * q[ref.v4];
    const Flap now = flap_of_edge(moved, topo, e);
    expect += p.alpha * w[e] * d.squaredNorm() + p.beta * w[e] * regularizer(now).squaredNorm();
  }
  CHECK(system.energy(q, noisy.vertices) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("prefilter commutes with rigid motion") {
  std::mt19937_64 rng(12);
  const TriMesh noisy = add_noise(make_cube(5), {0.5, NoiseMode::AlongNormal, 3});
  const Eigen::Matrix3d r = testing::random_rotation(rng);
  const Vec3 t(0.4, -2.0, 1.5);
  PrefilterParams p;
  p.alpha = 2.0;
  p.beta = 1.0;
  p.solver_tol = 1e-12;
  const TriMesh a = testing::transformed(prefilter(noisy, p), r, t);
  const TriMesh b = prefilter(testing::transformed(noisy, r, t), p);
  CHECK(testing::max_vertex_deviation(a, b) < 1e-8);
}

TEST_CASE("clean flat regions are fixed points") {
  const TriMesh plane = make_plane(6);
  PrefilterParams p;
  p.alpha = 5.0;
  p.beta = 0.0;
  p.solver_tol = 1e-12;
  CHECK(testing::max_vertex_deviation(prefilter(plane, p), plane) < 1e-10);
}

TEST_CASE("prefiltering lowers edge-operator norms on flat regions") {
  const TriMesh clean = make_cube(10);
  const TriMesh noisy = add_noise(clean, {0.3, NoiseMode::AlongNormal, 21});
  PrefilterParams p;
  p.alpha = 10.0;
  p.beta = 10.0;
  p.refreeze_iterations = 5;
  const TriMesh smooth = prefilter(noisy, p);
  const TopologyCache topo = build_topology(clean);
  const auto clean_field = edge_operator_field(clean, topo);
  const auto before = edge_operator_field(noisy, topo);
  const auto after = edge_operator_field(smooth, topo);
  double sum_before = 0.0, sum_after = 0.0;
  for (int e = 0; e < topo.num_edges(); ++e) {
    if (clean_field.norms[e] > 1e-9) continue;
    sum_before += before.norms[e];
    sum_after += after.norms[e];
  }
  CHECK(sum_after < 0.25 * sum_before);
}

TEST_CASE("parameter validation") {
  PrefilterParams p;
  p.alpha = -1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = PrefilterParams{};
  p.sigma_w = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = PrefilterParams{};
  p.refreeze_iterations = -1;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("a starved solver reports divergence") {
  const TriMesh noisy = add_noise(make_cube(8), {0.5, NoiseMode::AlongNormal, 1});
  PrefilterParams p;
  p.alpha = 50.0;
  p.beta = 50.0;
  p.solver_max_iter = 1;
  p.solver_tol = 1e-14;
  try {
    prefilter_solve(noisy, p);
    FAIL("expected SolverDiverged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SolverDiverged);
  }
}
