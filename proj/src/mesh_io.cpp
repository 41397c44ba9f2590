#include "segden/mesh_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace segden {

namespace {

std::string where(const std::filesystem::path& path, int line) {
  return path.string() + ":" + std::to_string(line);
}

// Parses the vertex index of an OBJ face token ("7", "7/1", "7//3", "-1/2/3").
bool parse_face_index(std::string_view token, int vertex_count, int& out) {
  const auto slash = token.find('/');
  const std::string_view head = token.substr(0, slash);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), value);
  if (ec != std::errc() || ptr != head.data() + head.size() || value == 0) return false;
  out = value > 0 ? value - 1 : vertex_count + value;
  return true;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace

TriMesh read_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());

  TriMesh mesh;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ss >> p.x() >> p.y() >> p.z())) {
        throw Error(ErrorCode::ParseError, where(path, line_no) + ": malformed vertex '" + line + "'");
      }
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string token;
      while (ss >> token) {
        int v = 0;
        if (!parse_face_index(token, mesh.num_vertices(), v)) {
          throw Error(ErrorCode::ParseError, where(path, line_no) + ": malformed face index '" + token + "'");
        }
        idx.push_back(v);
      }
      if (idx.size() != 3) {
        throw Error(ErrorCode::NonTriangleFace,
                    where(path, line_no) + ": face with " + std::to_string(idx.size()) + " vertices");
      }
      mesh.faces.push_back({idx[0], idx[1], idx[2]});
    }
  }
  if (in.bad()) throw Error(ErrorCode::IoError, "read failed for " + path.string());

  for (int f = 0; f < mesh.num_faces(); ++f) {
    for (int v : mesh.faces[f]) {
      if (v < 0 || v >= mesh.num_vertices()) {
        throw Error(ErrorCode::ParseError, path.string() + ": face " + std::to_string(f + 1) +
                                               " references missing vertex " + std::to_string(v + 1));
      }
    }
  }
  return mesh;
}

void write_obj(const TriMesh& mesh, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out.precision(17);
  for (const Vec3& p : mesh.vertices) out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const Face& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  check_written(out, path);
}

Rgb label_color(int label) {
  double hue = static_cast<double>(label) * 0.618034;
  hue -= std::floor(hue);
  const double h6 = hue * 6.0;
  const int sector = static_cast<int>(h6) % 6;
  const double frac = h6 - std::floor(h6);
  // s = v = 1, so p = 0.
  const double q = 1.0 - frac;
  const double t = frac;
  double r = 0, g = 0, b = 0;
  switch (sector) {
    case 0: r = 1; g = t; b = 0; break;
    case 1: r = q; g = 1; b = 0; break;
    case 2: r = 0; g = 1; b = t; break;
    case 3: r = 0; g = q; b = 1; break;
    case 4: r = t; g = 0; b = 1; break;
    default: r = 1; g = 0; b = q; break;
  }
  auto to_byte = [](double c) { return static_cast<std::uint8_t>(std::lround(c * 255.0)); };
  return {to_byte(r), to_byte(g), to_byte(b)};
}

void write_ply_colored(const TriMesh& mesh, std::span<const int> labels, const std::filesystem::path& path) {
  if (static_cast<int>(labels.size()) != mesh.num_faces()) {
    throw Error(ErrorCode::LabelLengthMismatch, std::to_string(labels.size()) + " labels for " +
                                                    std::to_string(mesh.num_faces()) + " faces");
  }
  auto out = open_for_write(path);
  out << "ply\n"
      << "format ascii 1.0\n"
      << "element vertex " << mesh.num_vertices() << '\n'
      << "property float x\nproperty float y\nproperty float z\n"
      << "element face " << mesh.num_faces() << '\n'
      << "property list uchar int vertex_indices\n"
      << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
      << "end_header\n";
  out.precision(9);
  for (const Vec3& p : mesh.vertices) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& t = mesh.faces[f];
    const Rgb c = label_color(labels[f]);
    out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << int(c[0]) << ' ' << int(c[1]) << ' '
        << int(c[2]) << '\n';
  }
  check_written(out, path);
}

void write_labels(std::span<const int> labels, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  for (int l : labels) out << l << '\n';
  check_written(out, path);
}

std::vector<int> read_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<int> labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    int value = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
    if (ec != std::errc() || ptr != line.data() + line.size() || value < 0) {
      throw Error(ErrorCode::ParseError, where(path, line_no) + ": bad label '" + line + "'");
    }
    labels.push_back(value);
  }
  return labels;
}

}  // namespace segden
