#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "segden/mesh.hpp"

namespace segden {

// OBJ subset: `v x y z` and triangular `f i j k` with 1-based indices
// (negative indices count back from the last vertex; `/vt/vn` suffixes are
// ignored). Every other line is skipped.
TriMesh read_obj(const std::filesystem::path& path);

// Coordinates are written with 17 significant digits so that a round trip is
// exact.
void write_obj(const TriMesh& mesh, const std::filesystem::path& path);

using Rgb = std::array<std::uint8_t, 3>;

// Golden-ratio hue stepping at full saturation and value.
Rgb label_color(int label);

// ASCII PLY with per-face red/green/blue derived from the labels.
void write_ply_colored(const TriMesh& mesh, std::span<const int> labels, const std::filesystem::path& path);

// Label dump: one integer per line, line i is the label of face i.
void write_labels(std::span<const int> labels, const std::filesystem::path& path);
std::vector<int> read_labels(const std::filesystem::path& path);

}  // namespace segden
