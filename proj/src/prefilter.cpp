#include "segden/prefilter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/IterativeLinearSolvers>

#include "segden/edge_operator.hpp"

namespace segden {

void PrefilterParams::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha and beta must be >= 0");
  if (!(sigma_w > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma_w must be > 0");
  if (!(solver_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "solver_tol must be > 0");
  if (refreeze_iterations < 0) throw Error(ErrorCode::InvalidArgument, "refreeze_iterations must be >= 0");
}

std::vector<double> edge_weights(const TopologyCache& topo, const FaceGeometry& geometry, double sigma_w) {
  std::vector<double> w(topo.num_edges(), 0.0);
  const double denom = 2.0 * sigma_w * sigma_w;
  for (int e = 0; e < topo.num_edges(); ++e) {
    if (topo.is_boundary(e)) continue;
    const auto& f = topo.edge_faces[e];
    w[e] = std::exp(-(geometry.normals[f[0]] - geometry.normals[f[1]]).squaredNorm() / denom);
  }
  return w;
}

Vec3 regularizer(const Flap& flap) { return 0.5 * (flap.p1 + flap.p3) - 0.5 * (flap.p2 + flap.p4); }

namespace {

Vec3 apply_row(const FlapRow& row, const std::vector<Vec3>& q) {
  Vec3 s = Vec3::Zero();
  for (int k = 0; k < 4; ++k) s += row.coeff[k] * q[row.vertex[k]];
  return s;
}

Eigen::MatrixX3d to_matrix(const std::vector<Vec3>& points) {
  Eigen::MatrixX3d m(points.size(), 3);
  for (std::size_t i = 0; i < points.size(); ++i) m.row(i) = points[i].transpose();
  return m;
}

}  // namespace

double PrefilterSystem::energy(const std::vector<Vec3>& positions, const std::vector<Vec3>& data) const {
  double e = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i) e += (positions[i] - data[i]).squaredNorm();
  for (const FlapRow& row : operator_rows) e += alpha * row.weight * apply_row(row, positions).squaredNorm();
  for (const FlapRow& row : regularizer_rows) e += beta * row.weight * apply_row(row, positions).squaredNorm();
  return e;
}

double PrefilterSystem::relative_residual(const std::vector<Vec3>& positions, const std::vector<Vec3>& data) const {
  const Eigen::MatrixX3d q = to_matrix(positions);
  const Eigen::MatrixX3d p = to_matrix(data);
  const double scale = p.norm();
  const double r = (matrix * q - p).norm();
  return scale > 0.0 ? r / scale : r;
}

PrefilterSystem assemble_prefilter(const TriMesh& reference, const TopologyCache& topo,
                                   const PrefilterParams& params) {
  PrefilterSystem sys;
  sys.alpha = params.alpha;
  sys.beta = params.beta;
  const FaceGeometry geometry = face_geometry(reference);
  const std::vector<double> w = edge_weights(topo, geometry, params.sigma_w);
  const double min_area = 1e-12 * topo.mean_edge_length * topo.mean_edge_length;

  for (int e = 0; e < topo.num_edges(); ++e) {
    if (topo.is_boundary(e)) continue;
    const Flap flap = flap_of_edge(reference, topo, e);
    const std::array<int, 4> verts{flap.v1, flap.v2, flap.v3, flap.v4};
    EdgeOperatorCoefficients k;
    try {
      k = edge_operator_coefficients(flap, min_area);
    } catch (const Error& err) {
      throw Error(ErrorCode::DegenerateFlap, "edge " + std::to_string(e) + ": " + err.what());
    }
    sys.operator_rows.push_back({verts, k.c, w[e]});
    sys.regularizer_rows.push_back({verts, {0.5, -0.5, 0.5, -0.5}, w[e]});
  }

  const int nv = reference.num_vertices();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(nv + 32 * sys.operator_rows.size());
  for (int i = 0; i < nv; ++i) triplets.emplace_back(i, i, 1.0);
  auto add_rows = [&](const std::vector<FlapRow>& rows, double scale) {
    if (scale == 0.0) return;
    for (const FlapRow& row : rows) {
      const double s = scale * row.weight;
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          triplets.emplace_back(row.vertex[a], row.vertex[b], s * row.coeff[a] * row.coeff[b]);
        }
      }
    }
  };
  add_rows(sys.operator_rows, params.alpha);
  add_rows(sys.regularizer_rows, params.beta);
  sys.matrix.resize(nv, nv);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

PrefilterResult prefilter_solve(const TriMesh& mesh, const PrefilterParams& params) {
  params.validate();
  const TopologyCache topo = build_topology(mesh);
  const int nv = mesh.num_vertices();
  const int max_iter = params.solver_max_iter > 0
                           ? params.solver_max_iter
                           : std::max(1, static_cast<int>(std::ceil(10.0 * std::sqrt(static_cast<double>(nv)))));

  PrefilterResult result;
  result.mesh = mesh;
  if (params.alpha == 0.0 && params.beta == 0.0) return result;

  const Eigen::MatrixX3d data = to_matrix(mesh.vertices);
  for (int round = 0; round <= params.refreeze_iterations; ++round) {
    const PrefilterSystem sys = assemble_prefilter(result.mesh, topo, params);

    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(params.solver_tol);
    cg.setMaxIterations(max_iter);
    cg.compute(sys.matrix);

    const Eigen::MatrixX3d guess = to_matrix(result.mesh.vertices);
    result.iterations = 0;
    for (int axis = 0; axis < 3; ++axis) {
      const Eigen::VectorXd x = cg.solveWithGuess(data.col(axis), guess.col(axis));
      result.iterations = std::max(result.iterations, static_cast<int>(cg.iterations()));
      for (int v = 0; v < nv; ++v) result.mesh.vertices[v][axis] = x[v];
    }
    result.relative_residual = sys.relative_residual(result.mesh.vertices, mesh.vertices);
    if (!(result.relative_residual <= params.solver_tol)) {
      throw Error(ErrorCode::SolverDiverged, "relative residual " + std::to_string(result.relative_residual) +
                                                 " after " + std::to_string(result.iterations) + " iterations");
    }
  }
  return result;
}

}  // namespace segden
