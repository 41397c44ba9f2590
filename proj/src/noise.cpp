#include "segden/noise.hpp"

#include <cmath>
#include <numbers>

namespace segden {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in (0, 1], 53 bits.
double unit_open_closed(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

double gaussian(std::uint64_t seed, std::uint64_t index, std::uint32_t draw) {
  const std::uint64_t key = splitmix64(splitmix64(seed) ^ index) + draw;
  const double u1 = unit_open_closed(splitmix64(key * 2));
  const double u2 = unit_open_closed(splitmix64(key * 2 + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

TriMesh add_noise(const TriMesh& mesh, const NoiseSpec& spec) {
  if (mesh.empty()) throw Error(ErrorCode::EmptyMesh, "cannot add noise to an empty mesh");
  if (!(spec.sigma_factor >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma_factor must be >= 0");

  TriMesh out = mesh;
  if (spec.sigma_factor == 0.0) return out;

  const TopologyCache topo = build_topology(mesh);
  const double sigma = spec.sigma_factor * topo.mean_edge_length;

  if (spec.mode == NoiseMode::AlongNormal) {
    const std::vector<Vec3> normals = vertex_normals(mesh);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      out.vertices[v] += sigma * gaussian(spec.seed, v, 0) * normals[v];
    }
  } else {
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      for (int k = 0; k < 3; ++k) out.vertices[v][k] += sigma * gaussian(spec.seed, v, k);
    }
  }
  return out;
}

}  // namespace segden
