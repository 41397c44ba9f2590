#include "segden/segment.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <queue>

namespace segden {

void SegmentParams::validate() const {
  if (!(d_thr >= 0.0)) throw Error(ErrorCode::InvalidArgument, "d_thr must be >= 0");
  if (min_cluster_size < 1) throw Error(ErrorCode::InvalidArgument, "min_cluster_size must be >= 1");
  if (ring_depth < 1) throw Error(ErrorCode::InvalidArgument, "ring_depth must be >= 1");
  if (refine_passes < 1) throw Error(ErrorCode::InvalidArgument, "refine_passes must be >= 1");
}

ClusterLabels ClusterLabels::from_ids(std::span<const int> ids) {
  ClusterLabels out;
  out.label.resize(ids.size());
  std::vector<int> remap;
  for (std::size_t f = 0; f < ids.size(); ++f) {
    const int id = ids[f];
    if (id >= static_cast<int>(remap.size())) remap.resize(id + 1, -1);
    if (remap[id] < 0) {
      remap[id] = out.cluster_count++;
      out.cluster_sizes.push_back(0);
    }
    out.label[f] = remap[id];
    ++out.cluster_sizes[remap[id]];
  }
  return out;
}

ClusterLabels ClusterLabels::single(int face_count) {
  ClusterLabels out;
  out.label.assign(face_count, 0);
  out.cluster_count = face_count > 0 ? 1 : 0;
  if (face_count > 0) out.cluster_sizes = {face_count};
  return out;
}

namespace {

ClusterLabels grow(const TopologyCache& topo, const std::function<bool(int)>& edge_passes) {
  const int nf = static_cast<int>(topo.face_edges.size());
  std::vector<int> ids(nf, -1);
  int next_id = 0;
  std::queue<int> queue;
  for (int seed = 0; seed < nf; ++seed) {
    if (ids[seed] >= 0) continue;
    ids[seed] = next_id;
    queue.push(seed);
    while (!queue.empty()) {
      const int f = queue.front();
      queue.pop();
      for (int e : topo.face_edges[f]) {
        if (topo.is_boundary(e) || !edge_passes(e)) continue;
        for (int g : topo.edge_faces[e]) {
          if (ids[g] < 0) {
            ids[g] = next_id;
            queue.push(g);
          }
        }
      }
    }
    ++next_id;
  }
  return ClusterLabels::from_ids(ids);
}

}  // namespace

ClusterLabels region_grow(const TopologyCache& topo, const EdgeOperatorField& field, double d_thr) {
  return grow(topo, [&](int e) { return field.norms[e] < d_thr; });
}

ClusterLabels region_grow_normal_angle(const TopologyCache& topo, const FaceGeometry& geometry,
                                       double max_angle_deg) {
  const double max_angle = max_angle_deg * std::numbers::pi / 180.0;
  return grow(topo, [&](int e) {
    const auto& f = topo.edge_faces[e];
    const double c = std::clamp(geometry.normals[f[0]].dot(geometry.normals[f[1]]), -1.0, 1.0);
    return std::acos(c) < max_angle;
  });
}

namespace {

// Argmax over labels of summed cosines; ties go to the smaller label.
// Returns -1 when no candidate contributes.
int best_label(int face, std::span<const int> candidates, std::span<const int> snapshot,
               const std::vector<char>& eligible, const FaceGeometry& geometry, std::vector<double>& score,
               std::vector<int>& touched) {
  touched.clear();
  for (int j : candidates) {
    const int k = snapshot[j];
    if (!eligible[k]) continue;
    if (std::find(touched.begin(), touched.end(), k) == touched.end()) touched.push_back(k);
    score[k] += geometry.normals[face].dot(geometry.normals[j]);
  }
  int best = -1;
  double best_score = 0.0;
  for (int k : touched) {
    if (best < 0 || score[k] > best_score || (score[k] == best_score && k < best)) {
      best = k;
      best_score = score[k];
    }
  }
  for (int k : touched) score[k] = 0.0;
  return best;
}

// Faces reachable through same-label edges from a face of an anchor cluster.
std::vector<char> anchored_faces(const TopologyCache& topo, std::span<const int> labels,
                                 const std::vector<char>& is_anchor_face) {
  const int nf = static_cast<int>(labels.size());
  std::vector<char> anchored(nf, 0);
  std::queue<int> queue;
  for (int f = 0; f < nf; ++f) {
    if (is_anchor_face[f]) {
      anchored[f] = 1;
      queue.push(f);
    }
  }
  while (!queue.empty()) {
    const int f = queue.front();
    queue.pop();
    for (int g : topo.face_adjacent[f]) {
      if (!anchored[g] && labels[g] == labels[f]) {
        anchored[g] = 1;
        queue.push(g);
      }
    }
  }
  return anchored;
}

ClusterLabels refine_once(const TopologyCache& topo, const FaceGeometry& geometry, const ClusterLabels& labels,
                          const SegmentParams& params) {
  const int nf = static_cast<int>(labels.label.size());
  std::vector<char> large(labels.cluster_count, 0);
  bool any_small = false;
  bool any_large = false;
  for (int k = 0; k < labels.cluster_count; ++k) {
    large[k] = labels.cluster_sizes[k] >= params.min_cluster_size;
    any_small |= !large[k];
    any_large |= static_cast<bool>(large[k]);
  }
  if (!any_small) return labels;

  const int largest = static_cast<int>(
      std::max_element(labels.cluster_sizes.begin(), labels.cluster_sizes.end()) - labels.cluster_sizes.begin());
  if (!any_large) return ClusterLabels::single(nf);

  const std::vector<int>& snapshot = labels.label;
  std::vector<int> next = snapshot;
  std::vector<double> score(labels.cluster_count, 0.0);
  std::vector<int> touched;

  for (int f = 0; f < nf; ++f) {
    if (large[snapshot[f]]) continue;
    int chosen = -1;
    std::size_t previous_size = 0;
    for (int depth = params.ring_depth;; ++depth) {
      const std::vector<int> ring = face_ring(topo, f, depth);
      chosen = best_label(f, ring, snapshot, large, geometry, score, touched);
      if (chosen >= 0 || ring.size() == previous_size) break;
      previous_size = ring.size();
    }
    next[f] = chosen >= 0 ? chosen : largest;
  }

  // Reattach reassigned faces that are cut off from the body of their new
  // cluster. Each round labels the cut-off faces bordering anchored ones.
  std::vector<char> anchor(nf, 0);
  for (int f = 0; f < nf; ++f) anchor[f] = large[snapshot[f]];
  std::vector<char> all_labels(labels.cluster_count, 1);
  for (;;) {
    const std::vector<char> anchored = anchored_faces(topo, next, anchor);
    std::vector<int> updated = next;
    bool progress = false;
    bool pending = false;
    for (int f = 0; f < nf; ++f) {
      if (anchored[f]) continue;
      pending = true;
      std::vector<int> anchored_neighbors;
      for (int g : topo.face_adjacent[f]) {
        if (anchored[g]) anchored_neighbors.push_back(g);
      }
      const int k = best_label(f, anchored_neighbors, next, all_labels, geometry, score, touched);
      if (k < 0) continue;
      updated[f] = k;
      anchor[f] = 1;
      progress = true;
    }
    next = std::move(updated);
    if (!pending || !progress) break;
  }
  return ClusterLabels::from_ids(next);
}

}  // namespace

ClusterLabels refine(const TopologyCache& topo, const FaceGeometry& geometry, const ClusterLabels& labels,
                     const SegmentParams& params) {
  params.validate();
  ClusterLabels current = labels;
  for (int pass = 0; pass < params.refine_passes; ++pass) current = refine_once(topo, geometry, current, params);
  return current;
}

ClusterLabels segment(const TriMesh& mesh, const SegmentParams& params,
                      const std::optional<PrefilterParams>& prefilter_params) {
  params.validate();
  const TriMesh source = prefilter_params ? prefilter(mesh, *prefilter_params) : mesh;
  const TopologyCache topo = build_topology(source);

  ClusterLabels labels;
  switch (params.metric) {
    case SegmentMetric::EdgeOperator:
      labels = region_grow(topo, edge_operator_field(source, topo), params.d_thr);
      break;
    case SegmentMetric::NormalAngle:
      labels = region_grow_normal_angle(topo, face_geometry(source), params.d_thr);
      break;
    case SegmentMetric::None:
      return ClusterLabels::single(source.num_faces());
  }
  if (params.refine) labels = refine(topo, face_geometry(source), labels, params);
  return labels;
}

bool clusters_connected(const TopologyCache& topo, const ClusterLabels& labels) {
  const int nf = static_cast<int>(labels.label.size());
  std::vector<char> seen(nf, 0);
  std::vector<char> label_seen(labels.cluster_count, 0);
  std::queue<int> queue;
  for (int f = 0; f < nf; ++f) {
    if (seen[f]) continue;
    const int k = labels.label[f];
    if (label_seen[k]) return false;
    label_seen[k] = 1;
    seen[f] = 1;
    queue.push(f);
    while (!queue.empty()) {
      const int a = queue.front();
      queue.pop();
      for (int b : topo.face_adjacent[a]) {
        if (!seen[b] && labels.label[b] == k) {
          seen[b] = 1;
          queue.push(b);
        }
      }
    }
  }
  return true;
}

}  // namespace segden
