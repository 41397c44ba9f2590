#pragma once

#include <cstdint>

#include "segden/mesh.hpp"

namespace segden {

enum class NoiseMode { AlongNormal, Isotropic };

struct NoiseSpec {
  double sigma_factor = 0.0;  // multiple of the mean edge length
  NoiseMode mode = NoiseMode::AlongNormal;
  std::uint64_t seed = 0;
};

// Zero-mean Gaussian corruption with std sigma_factor * mean_edge_length.
//
// Random numbers come from SplitMix64 keyed by (seed, vertex index, draw), so
// a vertex's noise never depends on iteration order or thread count. Normal
// variates use the Box-Muller transform.
TriMesh add_noise(const TriMesh& mesh, const NoiseSpec& spec);

// Counter-based standard normal draw; exposed for tests.
double gaussian(std::uint64_t seed, std::uint64_t index, std::uint32_t draw);

}  // namespace segden
