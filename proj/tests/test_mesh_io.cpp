#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "doctest.h"
#include "segden/fixtures.hpp"
#include "segden/mesh_io.hpp"
#include "segden/noise.hpp"
#include "support.hpp"

using namespace segden;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

ErrorCode read_error(const fs::path& path) {
  try {
    read_obj(path);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("read_obj did not throw");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("obj round trip is exact") {
  const fs::path dir = testing::scratch_dir("obj_round_trip");
  const TriMesh noisy = add_noise(make_icosahedron(2), {0.3, NoiseMode::Isotropic, 11});
  write_obj(noisy, dir / "m.obj");
  const TriMesh back = read_obj(dir / "m.obj");
  REQUIRE(back.num_vertices() == noisy.num_vertices());
  CHECK(back.faces == noisy.faces);
  for (int v = 0; v < noisy.num_vertices(); ++v) CHECK(back.vertices[v] == noisy.vertices[v]);
}

TEST_CASE("obj reader accepts the common variants") {
  const fs::path dir = testing::scratch_dir("obj_variants");
  write_text(dir / "m.obj",
             "# comment\n"
             "o thing\n"
             "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\n"
             "vn 0 0 1\nvt 0 0\n"
             "f 1/1/1 3/1/1 2/1/1\n"
             "f 1//1 2//1 4//1\n"
             "f -4 -1 -2\n"
             "f 2 3 4\n");
  const TriMesh m = read_obj(dir / "m.obj");
  CHECK(m.num_vertices() == 4);
  REQUIRE(m.num_faces() == 4);
  CHECK(m.faces[0] == Face{0, 2, 1});
  CHECK(m.faces[1] == Face{0, 1, 3});
  CHECK(m.faces[2] == Face{0, 3, 2});
}

TEST_CASE("obj reader errors") {
  const fs::path dir = testing::scratch_dir("obj_errors");
  CHECK(read_error(dir / "missing.obj") == ErrorCode::IoError);

  write_text(dir / "quad.obj", "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
  CHECK(read_error(dir / "quad.obj") == ErrorCode::NonTriangleFace);

  write_text(dir / "bad_number.obj", "v 0 zero 0\n");
  CHECK(read_error(dir / "bad_number.obj") == ErrorCode::ParseError);

  write_text(dir / "bad_index.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 7\n");
  CHECK(read_error(dir / "bad_index.obj") == ErrorCode::ParseError);

  try {
    read_obj(dir / "bad_number.obj");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("bad_number.obj:1") != std::string::npos);
  }
}

TEST_CASE("label colors are distinct") {
  std::map<Rgb, int> seen;
  for (int k = 0; k < 256; ++k) CHECK(seen.emplace(label_color(k), k).second);
  CHECK(label_color(0) == Rgb{255, 0, 0});
}

TEST_CASE("colored ply carries one color per label") {
  const fs::path dir = testing::scratch_dir("ply");
  const TriMesh cube = make_cube(2);
  std::vector<int> labels(cube.num_faces());
  for (int f = 0; f < cube.num_faces(); ++f) labels[f] = f / 8;
  write_ply_colored(cube, labels, dir / "c.ply");

  std::ifstream in(dir / "c.ply");
  std::string line;
  int vertices = 0, faces = 0;
  while (std::getline(in, line) && line != "end_header") {
    std::istringstream ls(line);
    std::string a, b;
    int n = 0;
    ls >> a >> b >> n;
    if (a == "element" && b == "vertex") vertices = n;
    if (a == "element" && b == "face") faces = n;
  }
  CHECK(vertices == cube.num_vertices());
  CHECK(faces == cube.num_faces());
  for (int v = 0; v < vertices; ++v) std::getline(in, line);
  std::map<std::tuple<int, int, int>, int> colors;
  for (int f = 0; f < faces; ++f) {
    int n, a, b, c, r, g, bl;
    in >> n >> a >> b >> c >> r >> g >> bl;
    CHECK(n == 3);
    CHECK(Face{a, b, c} == cube.faces[f]);
    const Rgb expect = label_color(labels[f]);
    CHECK(Rgb{std::uint8_t(r), std::uint8_t(g), std::uint8_t(bl)} == expect);
    ++colors[{r, g, bl}];
  }
  CHECK(colors.size() == 6);
  for (const auto& [color, count] : colors) CHECK(count == 8);
}

TEST_CASE("ply label length mismatch") {
  const fs::path dir = testing::scratch_dir("ply_mismatch");
  const TriMesh cube = make_cube(1);
  std::vector<int> labels(5, 0);
  try {
    write_ply_colored(cube, labels, dir / "c.ply");
    FAIL("expected LabelLengthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LabelLengthMismatch);
  }
}

TEST_CASE("labels round trip") {
  const fs::path dir = testing::scratch_dir("labels");
  const std::vector<int> labels{0, 0, 3, 1, 2, 2, 7};
  write_labels(labels, dir / "l.txt");
  CHECK(read_labels(dir / "l.txt") == labels);
}
