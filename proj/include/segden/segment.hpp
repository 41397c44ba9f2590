#pragma once

#include <optional>
#include <span>
#include <vector>

#include "segden/edge_operator.hpp"
#include "segden/mesh.hpp"
#include "segden/prefilter.hpp"

namespace segden {

enum class SegmentMetric {
  EdgeOperator,  // |D(e)| < d_thr
  NormalAngle,   // angle(n_a, n_b) < d_thr degrees; baseline for comparison
  None,          // one cluster
};

struct SegmentParams {
  double d_thr = 0.0;
  int min_cluster_size = 50;
  bool refine = true;
  int ring_depth = 2;
  int refine_passes = 1;
  SegmentMetric metric = SegmentMetric::EdgeOperator;

  void validate() const;
};

// Per-face cluster ids, contiguous from 0 and numbered by first appearance
// in face order.
struct ClusterLabels {
  std::vector<int> label;
  int cluster_count = 0;
  std::vector<int> cluster_sizes;

  // Renumbers arbitrary non-negative ids by first appearance.
  static ClusterLabels from_ids(std::span<const int> ids);
  static ClusterLabels single(int face_count);
};

// Connected components of the graph whose edges pass the threshold. Seeds are
// taken in ascending face order; boundary edges never pass.
ClusterLabels region_grow(const TopologyCache& topo, const EdgeOperatorField& field, double d_thr);

// Same growth rule over dihedral angles in degrees.
ClusterLabels region_grow_normal_angle(const TopologyCache& topo, const FaceGeometry& geometry,
                                       double max_angle_deg);

// Faces of clusters smaller than min_cluster_size take the large-cluster
// label maximizing the summed normal cosine over their face ring. All faces
// read the same pre-pass snapshot. A face without any large label in reach
// widens its ring; if nothing is reachable it joins the globally largest
// cluster (the all-small case collapses to one cluster). Reassigned faces
// that end up disconnected from their cluster are re-attached to an
// adjacent connected cluster so that clusters stay edge-connected.
ClusterLabels refine(const TopologyCache& topo, const FaceGeometry& geometry, const ClusterLabels& labels,
                     const SegmentParams& params);

// Region growing (and refinement when enabled) on `mesh`, or on its
// pre-filtered copy when `prefilter_params` is given. Labels index faces,
// which pre-filtering never changes, so they apply to `mesh` directly.
ClusterLabels segment(const TriMesh& mesh, const SegmentParams& params,
                      const std::optional<PrefilterParams>& prefilter_params = std::nullopt);

// True when every label's face set is edge-connected.
bool clusters_connected(const TopologyCache& topo, const ClusterLabels& labels);

}  // namespace segden
