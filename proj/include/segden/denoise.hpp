#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "segden/mesh.hpp"
#include "segden/prefilter.hpp"
#include "segden/segment.hpp"

namespace segden {

// Parameter records. The leading fields follow the published tuple order
// (see parse_denoise_params); ring_depth is the edge-ring depth used for
// topological neighborhoods and is not part of the tuple.
struct UnfParams {
  double threshold = 0.5;  // T, dot-product threshold in [-1, 1]
  int n_iter = 20;
  int v_iter = 10;
  int ring_depth = 2;
};

struct BnfParams {
  double sigma_r = 0.35;  // range kernel std on |n_i - n_j|
  int n_iter = 20;
  int v_iter = 10;
  int ring_depth = 2;
};

struct GnfParams {
  double radius = 2.0;        // multiple of the mean edge length
  double sigma_s_mult = 1.0;  // multiple of the mean adjacent-centroid distance
  double sigma_r = 0.35;
  int n_iter = 20;
  int v_iter = 10;
  int ring_depth = 1;  // guidance patch: face j plus this edge ring
};

struct L1Params {
  double angle_max_deg = 90.0;  // neighbors beyond this angle are rejected
  int n_iter = 20;
  int v_iter = 10;
  int ring_depth = 2;
};

using DenoiseParams = std::variant<UnfParams, BnfParams, GnfParams, L1Params>;

// Tuple orders: unf (T, n_iter, v_iter); bnf (sigma_r, n_iter, v_iter);
// gnf (r, sigma_s_mult, sigma_r, n_iter, v_iter); l1 (angle_max_deg, n_iter, v_iter).
// Throws InvalidArgument on unknown methods, wrong arity or invalid values.
DenoiseParams parse_denoise_params(std::string_view method, std::span<const double> tuple);
DenoiseParams parse_denoise_params(std::string_view method, std::string_view comma_tuple);

std::string method_name(const DenoiseParams& params);
std::string format_params(const DenoiseParams& params);
void validate(const DenoiseParams& params);

using NormalField = std::vector<Vec3>;

struct EdgeRing {
  int depth = 1;
};

struct GeometricBall {
  const CentroidIndex* index = nullptr;
  double radius = 0.0;  // absolute, model units
};

using NeighborScheme = std::variant<EdgeRing, GeometricBall>;

// Base neighborhood of `face` (excluding it), restricted to faces sharing its
// cluster when labels are given. Sorted ascending.
std::vector<int> neighbors(int face, const TopologyCache& topo, const ClusterLabels* labels,
                           const NeighborScheme& scheme);

// Mean distance between centroids of edge-adjacent faces.
double mean_adjacent_centroid_distance(const TopologyCache& topo, const FaceGeometry& geometry);

NormalField filter_unf(const TriMesh& mesh, const TopologyCache& topo, const FaceGeometry& geometry,
                       const ClusterLabels* labels, const UnfParams& params);
NormalField filter_bnf(const TriMesh& mesh, const TopologyCache& topo, const FaceGeometry& geometry,
                       const ClusterLabels* labels, const BnfParams& params);
NormalField filter_gnf(const TriMesh& mesh, const TopologyCache& topo, const FaceGeometry& geometry,
                       const ClusterLabels* labels, const GnfParams& params);
NormalField filter_l1median(const TriMesh& mesh, const TopologyCache& topo, const FaceGeometry& geometry,
                            const ClusterLabels* labels, const L1Params& params);

// Weighted geometric median by Weiszfeld iteration (at most max_iter steps,
// stopping once a step moves less than tol; distances are floored at 1e-12).
Vec3 weighted_geometric_median(std::span<const Vec3> points, std::span<const double> weights, int max_iter = 20,
                               double tol = 1e-8);

// GNF guidance patches: face j plus its edge ring of the given depth,
// limited to j's cluster when labels are given. A face takes its guidance from the most
// consistent patch that contains it and is centered inside its neighborhood.
std::vector<std::vector<int>> guidance_patches(const TopologyCache& topo, const ClusterLabels* labels,
                                              int depth = 1);

// Jacobi iterations of x_i += 1/|F(i)| sum_k n_k (n_k . (c_k - x_i)).
// Vertices without incident faces are left in place with a warning.
TriMesh vertex_update(const TriMesh& mesh, const TopologyCache& topo, const NormalField& normals, int v_iter);

NormalField filter_normals(const TriMesh& mesh, const TopologyCache& topo, const FaceGeometry& geometry,
                           const ClusterLabels* labels, const DenoiseParams& params);

// Normal filtering followed by vertex update; `labels` (optional) restricts
// every neighborhood to the face's own cluster.
TriMesh denoise(const TriMesh& mesh, const DenoiseParams& params, const ClusterLabels* labels = nullptr);

struct PipelineOptions {
  std::optional<SegmentParams> segmentation;  // cluster-constrained when set
  std::optional<PrefilterParams> prefilter;   // only feeds the segmentation
};

struct PipelineResult {
  TriMesh mesh;
  std::optional<ClusterLabels> labels;
};

// Segment (optionally on a pre-filtered copy), then denoise the original
// noisy positions with the labels.
PipelineResult run_pipeline(const TriMesh& noisy, const DenoiseParams& params, const PipelineOptions& options);

}  // namespace segden
