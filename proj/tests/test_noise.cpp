#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "segden/fixtures.hpp"
#include "segden/mesh_io.hpp"
#include "segden/noise.hpp"
#include "support.hpp"

using namespace segden;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("gaussian draws have unit variance") {
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = gaussian(42, i, 0);
    sum += g;
    sq += g * g;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::sqrt(sq / n - mean * mean) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(gaussian(42, 5, 1) == gaussian(42, 5, 1));
  CHECK(gaussian(42, 5, 1) != gaussian(43, 5, 1));
  CHECK(gaussian(42, 5, 1) != gaussian(42, 5, 2));
}

TEST_CASE("along-normal noise has the requested spread") {
  const TriMesh clean = make_cube(41);
  const TopologyCache topo = build_topology(clean);
  const TriMesh noisy = add_noise(clean, {0.2, NoiseMode::AlongNormal, 9});
  const auto normals = vertex_normals(clean);
  double sq = 0.0, tangential = 0.0;
  for (int v = 0; v < clean.num_vertices(); ++v) {
    const Vec3 d = noisy.vertices[v] - clean.vertices[v];
    const double h = d.dot(normals[v]);
    sq += h * h;
    tangential = std::max(tangential, (d - h * normals[v]).norm());
  }
  const double sigma = 0.2 * topo.mean_edge_length;
  CHECK(std::sqrt(sq / clean.num_vertices()) == doctest::Approx(sigma).epsilon(0.05));
  CHECK(tangential < 1e-12);
}

TEST_CASE("isotropic noise has the requested per-axis spread") {
  const TriMesh clean = make_cube(41);
  const double sigma = 0.3 * build_topology(clean).mean_edge_length;
  const TriMesh noisy = add_noise(clean, {0.3, NoiseMode::Isotropic, 4});
  for (int axis = 0; axis < 3; ++axis) {
    double sq = 0.0;
    for (int v = 0; v < clean.num_vertices(); ++v) {
      const double d = noisy.vertices[v][axis] - clean.vertices[v][axis];
      sq += d * d;
    }
    CHECK(std::sqrt(sq / clean.num_vertices()) == doctest::Approx(sigma).epsilon(0.05));
  }
}

TEST_CASE("noise is seeded and leaves connectivity alone") {
  const TriMesh clean = make_icosahedron(3);
  const TriMesh a = add_noise(clean, {0.4, NoiseMode::AlongNormal, 5});
  const TriMesh b = add_noise(clean, {0.4, NoiseMode::AlongNormal, 5});
  const TriMesh c = add_noise(clean, {0.4, NoiseMode::AlongNormal, 6});
  CHECK(a.faces == clean.faces);
  CHECK(a.vertices == b.vertices);
  CHECK(a.vertices != c.vertices);

  const auto dir = testing::scratch_dir("noise_files");
  write_obj(a, dir / "a.obj");
  write_obj(b, dir / "b.obj");
  CHECK(slurp(dir / "a.obj") == slurp(dir / "b.obj"));
}

TEST_CASE("zero sigma returns the input") {
  const TriMesh clean = make_cube(3);
  CHECK(add_noise(clean, {0.0, NoiseMode::AlongNormal, 1}).vertices == clean.vertices);
}

TEST_CASE("noise argument errors") {
  auto code_of = [](const TriMesh& m, double sigma) {
    try {
      add_noise(m, {sigma, NoiseMode::AlongNormal, 1});
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  CHECK(code_of(TriMesh{}, 0.1) == ErrorCode::EmptyMesh);
  CHECK(code_of(make_cube(1), -0.1) == ErrorCode::InvalidArgument);
}
