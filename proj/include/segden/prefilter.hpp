#pragma once

#include <array>
#include <vector>

#include <Eigen/SparseCore>

#include "segden/mesh.hpp"

namespace segden {

struct PrefilterParams {
  double alpha = 0.1;        // weight of the edge-operator term
  double beta = 0.1;         // weight of the regularizer term
  double sigma_w = 0.35;     // edge weight bandwidth on |n_a - n_b|
  double solver_tol = 1e-8;  // relative residual target
  int solver_max_iter = 0;   // <= 0 means 10 * sqrt(vertex count)
  int refreeze_iterations = 0;

  void validate() const;
};

// w(e) = exp(-|n_a - n_b|^2 / (2 sigma_w^2)) on interior edges, 0 on boundary
// edges (which take no part in either energy term).
std::vector<double> edge_weights(const TopologyCache& topo, const FaceGeometry& geometry, double sigma_w);

// R(e) = (p1 + p3)/2 - (p2 + p4)/2.
Vec3 regularizer(const Flap& flap);

// One linear row acting on four vertices, shared by x, y and z.
struct FlapRow {
  std::array<int, 4> vertex{};
  std::array<double, 4> coeff{};
  double weight = 0.0;
};

// The quadratic with every coefficient frozen from a reference geometry:
//   E(q) = |q - p|^2 + alpha sum_e w |D_e q|^2 + beta sum_e w |R_e q|^2
// minimized by (I + alpha A^T W A + beta B^T W B) q = p.
struct PrefilterSystem {
  std::vector<FlapRow> operator_rows;
  std::vector<FlapRow> regularizer_rows;
  double alpha = 0.0;
  double beta = 0.0;
  Eigen::SparseMatrix<double> matrix;

  double energy(const std::vector<Vec3>& positions, const std::vector<Vec3>& data) const;
  // |M q - p|_F / |p|_F
  double relative_residual(const std::vector<Vec3>& positions, const std::vector<Vec3>& data) const;
};

PrefilterSystem assemble_prefilter(const TriMesh& reference, const TopologyCache& topo,
                                   const PrefilterParams& params);

struct PrefilterResult {
  TriMesh mesh;
  double relative_residual = 0.0;
  int iterations = 0;  // CG iterations of the last solve, max over x/y/z
};

// Throws SolverDiverged when the residual target is missed.
PrefilterResult prefilter_solve(const TriMesh& mesh, const PrefilterParams& params);

inline TriMesh prefilter(const TriMesh& mesh, const PrefilterParams& params) {
  return prefilter_solve(mesh, params).mesh;
}

}  // namespace segden
