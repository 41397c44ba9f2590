#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "segden/mesh.hpp"

namespace segden {

// Per-vertex weights of the differential edge operator: D(e) = sum_k c[k] * p_{k+1}.
// The weights sum to zero, so D(e) is translation invariant, and D(e)
// vanishes whenever the two flap triangles are coplanar.
struct EdgeOperatorCoefficients {
  std::array<double, 4> c{};
};

// Throws DegenerateFlap when either triangle area is below min_area. A
// non-positive min_area means 1e-12 * |p3 - p1|^2.
EdgeOperatorCoefficients edge_operator_coefficients(const Flap& flap, double min_area = 0.0);

Vec3 edge_operator(const Flap& flap, double min_area = 0.0);

struct EdgeOperatorField {
  std::vector<Vec3> values;    // zero on boundary edges
  std::vector<double> norms;   // +inf on boundary edges
};

// Degenerate flaps are reported with their edge id.
EdgeOperatorField edge_operator_field(const TriMesh& mesh, const TopologyCache& topo);

// CSV with header `edge_id,v0,v1,norm`, one row per edge.
void write_edge_norms_csv(const TopologyCache& topo, const EdgeOperatorField& field,
                          const std::filesystem::path& path);

}  // namespace segden
