#include "segden/edge_operator.hpp"

#include <fstream>
#include <limits>
#include <string>

namespace segden {

EdgeOperatorCoefficients edge_operator_coefficients(const Flap& flap, double min_area) {
  const Vec3& p1 = flap.p1;
  const Vec3& p2 = flap.p2;
  const Vec3& p3 = flap.p3;
  const Vec3& p4 = flap.p4;

  const Vec3 edge = p3 - p1;
  const double edge_sq = edge.squaredNorm();
  if (min_area <= 0.0) min_area = 1e-12 * edge_sq;

  const double area_123 = 0.5 * (p2 - p1).cross(p3 - p1).norm();
  const double area_134 = 0.5 * (p3 - p1).cross(p4 - p1).norm();
  if (!(area_123 >= min_area) || !(area_134 >= min_area) || !(edge_sq > 0.0)) {
    throw Error(ErrorCode::DegenerateFlap, "flap areas " + std::to_string(area_123) + ", " +
                                              std::to_string(area_134) + " below " + std::to_string(min_area));
  }

  const double area_sum = area_123 + area_134;
  const double denom = edge_sq * area_sum;

  EdgeOperatorCoefficients k;
  k.c[0] = (area_123 * (p4 - p3).dot(p3 - p1) + area_134 * (p1 - p3).dot(p3 - p2)) / denom;
  k.c[1] = area_134 / area_sum;
  k.c[2] = (area_123 * (p3 - p1).dot(p1 - p4) + area_134 * (p2 - p1).dot(p1 - p3)) / denom;
  k.c[3] = area_123 / area_sum;
  return k;
}

Vec3 edge_operator(const Flap& flap, double min_area) {
  const auto k = edge_operator_coefficients(flap, min_area);
  return k.c[0] * flap.p1 + k.c[1] * flap.p2 + k.c[2] * flap.p3 + k.c[3] * flap.p4;
}

EdgeOperatorField edge_operator_field(const TriMesh& mesh, const TopologyCache& topo) {
  const int ne = topo.num_edges();
  const double min_area = 1e-12 * topo.mean_edge_length * topo.mean_edge_length;
  EdgeOperatorField field;
  field.values.assign(ne, Vec3::Zero());
  field.norms.assign(ne, std::numeric_limits<double>::infinity());
  for (int e = 0; e < ne; ++e) {
    if (topo.is_boundary(e)) continue;
    try {
      field.values[e] = edge_operator(flap_of_edge(mesh, topo, e), min_area);
    } catch (const Error& err) {
      throw Error(ErrorCode::DegenerateFlap, "edge " + std::to_string(e) + ": " + err.what());
    }
    field.norms[e] = field.values[e].norm();
  }
  return field;
}

void write_edge_norms_csv(const TopologyCache& topo, const EdgeOperatorField& field,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "edge_id,v0,v1,norm\n";
  for (int e = 0; e < topo.num_edges(); ++e) {
    out << e << ',' << topo.edges[e].v0 << ',' << topo.edges[e].v1 << ',' << field.norms[e] << '\n';
  }
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace segden
