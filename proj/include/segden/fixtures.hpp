#pragma once

#include <string_view>

#include "segden/mesh.hpp"

namespace segden {

// Closed unit cube centered at the origin, each side an n x n grid of
// two-triangle cells: 12 n^2 faces.
TriMesh make_cube(int n);

// Icosahedron with unit circumradius, midpoint-split `levels` times without
// projection, so its 20 sides stay planar: 20 * 4^levels faces.
TriMesh make_icosahedron(int levels);

// Same subdivision projected onto the unit sphere after every split.
TriMesh make_sphere(int levels);

// Unit square in the z = 0 plane, an n x n grid: 2 n^2 faces.
TriMesh make_plane(int n);

// "cube" | "icosahedron" | "sphere" | "plane". Throws InvalidArgument for
// unknown shapes or out-of-range subdivision.
TriMesh make_fixture(std::string_view shape, int subdiv);

}  // namespace segden
