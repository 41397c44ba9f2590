#include "segden/denoise.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

namespace segden {

namespace {

int as_iterations(double value, const char* name) {
  if (!(value >= 1.0) || value != std::floor(value) || value > 1e9) {
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be a positive integer");
  }
  return static_cast<int>(value);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

// Keeps `fallback` when the accumulated direction vanishes.
Vec3 normalized_or(const Vec3& v, const Vec3& fallback) {
  const double len = v.norm();
  return len > 0.0 && std::isfinite(len) ? Vec3(v / len) : fallback;
}

// N(i) u {i}, ascending.
std::vector<int> with_self(std::vector<int> list, int face) {
  list.insert(std::lower_bound(list.begin(), list.end(), face), face);
  return list;
}

std::vector<std::vector<int>> ring_neighborhoods(const TopologyCache& topo, const ClusterLabels* labels,
                                                 int depth) {
  const int nf = static_cast<int>(topo.face_edges.size());
  std::vector<std::vector<int>> out(nf);
  for (int f = 0; f < nf; ++f) out[f] = with_self(neighbors(f, topo, labels, EdgeRing{depth}), f);
  return out;
}

}  // namespace

DenoiseParams parse_denoise_params(std::string_view method, std::span<const double> t) {
  auto arity = [&](std::size_t n) {
    if (t.size() != n) {
      throw Error(ErrorCode::InvalidArgument, std::string(method) + " expects " + std::to_string(n) +
                                                  " parameters, got " + std::to_string(t.size()));
    }
  };
  DenoiseParams params;
  if (method == "unf") {
    arity(3);
    params = UnfParams{t[0], as_iterations(t[1], "n_iter"), as_iterations(t[2], "v_iter")};
  } else if (method == "bnf") {
    arity(3);
    params = BnfParams{t[0], as_iterations(t[1], "n_iter"), as_iterations(t[2], "v_iter")};
  } else if (method == "gnf") {
    arity(5);
    params = GnfParams{t[0], t[1], t[2], as_iterations(t[3], "n_iter"), as_iterations(t[4], "v_iter")};
  } else if (method == "l1") {
    arity(3);
    params = L1Params{t[0], as_iterations(t[1], "n_iter"), as_iterations(t[2], "v_iter")};
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(method) + "'");
  }
  validate(params);
  return params;
}

DenoiseParams parse_denoise_params(std::string_view method, std::string_view comma_tuple) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= comma_tuple.size()) {
    const auto comma = comma_tuple.find(',', start);
    const std::string field = trim(comma_tuple.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                              : comma - start));
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
      throw Error(ErrorCode::InvalidArgument, "malformed parameter tuple '" + std::string(comma_tuple) + "'");
    }
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parse_denoise_params(method, values);
}

std::string method_name(const DenoiseParams& params) {
  struct Visitor {
    std::string operator()(const UnfParams&) const { return "unf"; }
    std::string operator()(const BnfParams&) const { return "bnf"; }
    std::string operator()(const GnfParams&) const { return "gnf"; }
    std::string operator()(const L1Params&) const { return "l1"; }
  };
  return std::visit(Visitor{}, params);
}

std::string format_params(const DenoiseParams& params) {
  std::ostringstream os;
  os.precision(12);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, UnfParams>) {
          os << p.threshold << ',' << p.n_iter << ',' << p.v_iter;
        } else if constexpr (std::is_same_v<T, BnfParams>) {
          os << p.sigma_r << ',' << p.n_iter << ',' << p.v_iter;
        } else if constexpr (std::is_same_v<T, GnfParams>) {
          os << p.radius << ',' << p.sigma_s_mult << ',' << p.sigma_r << ',' << p.n_iter << ',' << p.v_iter;
        } else {
          os << p.angle_max_deg << ',' << p.n_iter << ',' << p.v_iter;
        }
      },
      params);
  return os.str();
}

void validate(const DenoiseParams& params) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if (p.n_iter < 1 || p.v_iter < 1) fail("iteration counts must be >= 1");
        if constexpr (std::is_same_v<T, UnfParams>) {
          if (!(p.threshold >= -1.0 && p.threshold <= 1.0)) fail("T must lie in [-1, 1]");
        } else if constexpr (std::is_same_v<T, BnfParams>) {
          if (!(p.sigma_r > 0.0)) fail("sigma_r must be > 0");
        } else if constexpr (std::is_same_v<T, GnfParams>) {
          if (!(p.radius > 0.0) || !(p.sigma_s_mult > 0.0) || !(p.sigma_r > 0.0)) {
            fail("r, sigma_s and sigma_r must be > 0");
          }
        } else {
          if (!(p.angle_max_deg > 0.0)) fail("angle_max_deg must be > 0");
        }
        if (p.ring_depth < 1) fail("ring_depth must be >= 1");
      },
      params);
}

std::vector<int> neighbors(int face, const TopologyCache& topo, const ClusterLabels* labels,
                           const NeighborScheme& scheme) {
  std::vector<int> base;
  if (const auto* ring = std::get_if<EdgeRing>(&scheme)) {
    base = face_ring(topo, face, ring->depth);
  } else {
    const auto& ball = std::get<GeometricBall>(scheme);
    base = ball.index->within(face, ball.radius);
  }
  if (labels) {
    const int k = labels->label[face];
    std::erase_if(base, [&](int j) { return labels->label[j] != k; });
  }
  return base;
}

double mean_adjacent_centroid_distance(const TopologyCache& topo, const FaceGeometry& geometry) {
  double total = 0.0;
  int count = 0;
  for (int e = 0; e < topo.num_edges(); ++e) {
    if (topo.is_boundary(e)) continue;
    const auto& f = topo.edge_faces[e];
    total += (geometry.centroids[f[0]] - geometry.centroids[f[1]]).norm();
    ++count;
  }
  // Edge-free meshes have no spatial scale; any positive value works there.
  return count > 0 && total > 0.0 ? total / count : 1.0;
}

NormalField filter_unf(const TriMesh&, const TopologyCache& topo, const FaceGeometry& geometry,
                       const ClusterLabels* labels, const UnfParams& params) {
  validate(params);
  const int nf = static_cast<int>(geometry.normals.size());
  const auto hood = ring_neighborhoods(topo, labels, params.ring_depth);
  const double threshold = params.threshold;

  NormalField current = geometry.normals;
  NormalField next(nf);
  for (int it = 0; it < params.n_iter; ++it) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nf; ++i) {
      Vec3 sum = Vec3::Zero();
      for (int j : hood[i]) {
        const double d = current[i].dot(current[j]) - threshold;
        if (d > 0.0) sum += geometry.areas[j] * d * d * current[j];
      }
      next[i] = normalized_or(sum, current[i]);
    }
    std::swap(current, next);
  }
  return current;
}

NormalField filter_bnf(const TriMesh&, const TopologyCache& topo, const FaceGeometry& geometry,
                       const ClusterLabels* labels, const BnfParams& params) {
  validate(params);
  const int nf = static_cast<int>(geometry.normals.size());
  const auto hood = ring_neighborhoods(topo, labels, params.ring_depth);
  const double sigma_c = mean_adjacent_centroid_distance(topo, geometry);
  const double inv_2sc2 = 1.0 / (2.0 * sigma_c * sigma_c);
  const double inv_2sr2 = 1.0 / (2.0 * params.sigma_r * params.sigma_r);

  // Spatial weights do not change between sweeps.
  std::vector<std::vector<double>> spatial(nf);
  for (int i = 0; i < nf; ++i) {
    spatial[i].reserve(hood[i].size());
    for (int j : hood[i]) {
      spatial[i].push_back(geometry.areas[j] *
                           std::exp(-(geometry.centroids[i] - geometry.centroids[j]).squaredNorm() * inv_2sc2));
    }
  }

  NormalField current = geometry.normals;
  NormalField next(nf);
  for (int it = 0; it < params.n_iter; ++it) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nf; ++i) {
      Vec3 sum = Vec3::Zero();
      for (std::size_t k = 0; k < hood[i].size(); ++k) {
        const int j = hood[i][k];
        sum += spatial[i][k] * std::exp(-(current[i] - current[j]).squaredNorm() * inv_2sr2) * current[j];
      }
      next[i] = normalized_or(sum, current[i]);
    }
    std::swap(current, next);
  }
  return current;
}

std::vector<std::vector<int>> guidance_patches(const TopologyCache& topo, const ClusterLabels* labels, int depth) {
  const int nf = static_cast<int>(topo.face_edges.size());
  std::vector<std::vector<int>> patches(nf);
  for (int j = 0; j < nf; ++j) patches[j] = with_self(neighbors(j, topo, labels, EdgeRing{depth}), j);
  return patches;
}

NormalField filter_gnf(const TriMesh&, const TopologyCache& topo, const FaceGeometry& geometry,
                       const ClusterLabels* labels, const GnfParams& params) {
  validate(params);
  const int nf = static_cast<int>(geometry.normals.size());
  const CentroidIndex index(geometry.centroids, topo.mean_edge_length);
  const GeometricBall ball{&index, params.radius * topo.mean_edge_length};

  std::vector<std::vector<int>> hood(nf);
  for (int i = 0; i < nf; ++i) hood[i] = with_self(neighbors(i, topo, labels, ball), i);
  const auto patches = guidance_patches(topo, labels, params.ring_depth);

  std::vector<Vec3> patch_centroid(nf);
  for (int j = 0; j < nf; ++j) {
    Vec3 c = Vec3::Zero();
    double area = 0.0;
    for (int a : patches[j]) {
      c += geometry.areas[a] * geometry.centroids[a];
      area += geometry.areas[a];
    }
    patch_centroid[j] = c / area;
  }

  const double sigma_s = params.sigma_s_mult * mean_adjacent_centroid_distance(topo, geometry);
  const double inv_2ss2 = 1.0 / (2.0 * sigma_s * sigma_s);
  const double inv_2sr2 = 1.0 / (2.0 * params.sigma_r * params.sigma_r);
  std::vector<std::vector<double>> spatial(nf);
  for (int i = 0; i < nf; ++i) {
    spatial[i].reserve(hood[i].size());
    for (int j : hood[i]) {
      spatial[i].push_back(geometry.areas[j] *
                           std::exp(-(geometry.centroids[i] - geometry.centroids[j]).squaredNorm() * inv_2ss2));
    }
  }

  NormalField current = geometry.normals;
  NormalField next(nf);
  std::vector<double> consistency(nf);
  std::vector<Vec3> patch_normal(nf);
  NormalField guidance(nf);
  for (int it = 0; it < params.n_iter; ++it) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < nf; ++j) {
      const auto& patch = patches[j];
      double worst = 0.0;
      Vec3 avg = Vec3::Zero();
      for (std::size_t a = 0; a < patch.size(); ++a) {
        avg += geometry.areas[patch[a]] * current[patch[a]];
        for (std::size_t b = a + 1; b < patch.size(); ++b) {
          worst = std::max(worst, (current[patch[a]] - current[patch[b]]).norm());
        }
      }
      consistency[j] = worst;
      patch_normal[j] = normalized_or(avg, current[j]);
    }

#pragma omp parallel for schedule(static)
    for (int i = 0; i < nf; ++i) {
      // Candidates are the patches that contain face i, i.e. those centered
      // on i or on a face of its own patch (patch membership is symmetric).
      int best = -1;
      double best_dist = 0.0;
      for (int j : patches[i]) {
        if (!std::binary_search(hood[i].begin(), hood[i].end(), j)) continue;
        const double dist = (patch_centroid[j] - geometry.centroids[i]).squaredNorm();
        if (best < 0 || consistency[j] < consistency[best] ||
            (consistency[j] == consistency[best] && dist < best_dist)) {
          best = j;
          best_dist = dist;
        }
      }
      guidance[i] = patch_normal[best];
    }

#pragma omp parallel for schedule(static)
    for (int i = 0; i < nf; ++i) {
      Vec3 sum = Vec3::Zero();
      for (std::size_t k = 0; k < hood[i].size(); ++k) {
        const int j = hood[i][k];
        sum += spatial[i][k] * std::exp(-(guidance[i] - guidance[j]).squaredNorm() * inv_2sr2) * current[j];
      }
      next[i] = normalized_or(sum, current[i]);
    }
    std::swap(current, next);
  }
  return current;
}

Vec3 weighted_geometric_median(std::span<const Vec3> points, std::span<const double> weights, int max_iter,
                               double tol) {
  constexpr double kDistanceFloor = 1e-12;
  Vec3 y = Vec3::Zero();
  double total = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    y += weights[k] * points[k];
    total += weights[k];
  }
  if (!(total > 0.0)) return y;
  y /= total;
  for (int it = 0; it < max_iter; ++it) {
    Vec3 num = Vec3::Zero();
    double den = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) {
      const double w = weights[k] / std::max((points[k] - y).norm(), kDistanceFloor);
      num += w * points[k];
      den += w;
    }
    const Vec3 moved = num / den;
    const double step = (moved - y).norm();
    y = moved;
    if (step < tol) break;
  }
  return y;
}

NormalField filter_l1median(const TriMesh&, const TopologyCache& topo, const FaceGeometry& geometry,
                            const ClusterLabels* labels, const L1Params& params) {
  validate(params);
  const int nf = static_cast<int>(geometry.normals.size());
  const auto hood = ring_neighborhoods(topo, labels, params.ring_depth);
  const double sigma_c = mean_adjacent_centroid_distance(topo, geometry);
  const double inv_2sc2 = 1.0 / (2.0 * sigma_c * sigma_c);
  const double min_cos = std::cos(std::min(params.angle_max_deg, 180.0) * std::numbers::pi / 180.0);

  std::vector<std::vector<double>> spatial(nf);
  for (int i = 0; i < nf; ++i) {
    for (int j : hood[i]) {
      spatial[i].push_back(geometry.areas[j] *
                           std::exp(-(geometry.centroids[i] - geometry.centroids[j]).squaredNorm() * inv_2sc2));
    }
  }

  NormalField current = geometry.normals;
  NormalField next(nf);
  for (int it = 0; it < params.n_iter; ++it) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nf; ++i) {
      std::vector<Vec3> points;
      std::vector<double> weights;
      for (std::size_t k = 0; k < hood[i].size(); ++k) {
        const int j = hood[i][k];
        if (current[i].dot(current[j]) >= min_cos) {
          points.push_back(current[j]);
          weights.push_back(spatial[i][k]);
        }
      }
      next[i] = points.empty() ? current[i] : normalized_or(weighted_geometric_median(points, weights), current[i]);
    }
    std::swap(current, next);
  }
  return current;
}

TriMesh vertex_update(const TriMesh& mesh, const TopologyCache& topo, const NormalField& normals, int v_iter) {
  TriMesh out = mesh;
  const int nv = mesh.num_vertices();
  const int nf = mesh.num_faces();
  int isolated = 0;
  for (int v = 0; v < nv; ++v) isolated += topo.vertex_faces[v].empty() ? 1 : 0;
  if (isolated > 0 && v_iter > 0) {
    std::cerr << "warning: IsolatedVertex: " << isolated << " vertices without faces left unchanged\n";
  }

  std::vector<Vec3> next = out.vertices;
  std::vector<Vec3> centroids(nf);
  for (int it = 0; it < v_iter; ++it) {
    const auto& x = out.vertices;
#pragma omp parallel for schedule(static)
    for (int f = 0; f < nf; ++f) {
      const Face& t = mesh.faces[f];
      centroids[f] = (x[t[0]] + x[t[1]] + x[t[2]]) / 3.0;
    }
#pragma omp parallel for schedule(static)
    for (int v = 0; v < nv; ++v) {
      const auto& incident = topo.vertex_faces[v];
      if (incident.empty()) {
        next[v] = x[v];
        continue;
      }
      Vec3 delta = Vec3::Zero();
      for (int f : incident) delta += normals[f] * normals[f].dot(centroids[f] - x[v]);
      next[v] = x[v] + delta / static_cast<double>(incident.size());
    }
    std::swap(out.vertices, next);
  }
  return out;
}

NormalField filter_normals(const TriMesh& mesh, const TopologyCache& topo, const FaceGeometry& geometry,
                           const ClusterLabels* labels, const DenoiseParams& params) {
  if (labels && static_cast<int>(labels->label.size()) != mesh.num_faces()) {
    throw Error(ErrorCode::LabelLengthMismatch, std::to_string(labels->label.size()) + " labels for " +
                                                    std::to_string(mesh.num_faces()) + " faces");
  }
  struct Visitor {
    const TriMesh& m;
    const TopologyCache& t;
    const FaceGeometry& g;
    const ClusterLabels* l;
    NormalField operator()(const UnfParams& p) const { return filter_unf(m, t, g, l, p); }
    NormalField operator()(const BnfParams& p) const { return filter_bnf(m, t, g, l, p); }
    NormalField operator()(const GnfParams& p) const { return filter_gnf(m, t, g, l, p); }
    NormalField operator()(const L1Params& p) const { return filter_l1median(m, t, g, l, p); }
  };
  return std::visit(Visitor{mesh, topo, geometry, labels}, params);
}

TriMesh denoise(const TriMesh& mesh, const DenoiseParams& params, const ClusterLabels* labels) {
  validate(params);
  const TopologyCache topo = build_topology(mesh);
  const FaceGeometry geometry = face_geometry(mesh);
  const NormalField normals = filter_normals(mesh, topo, geometry, labels, params);
  const int v_iter = std::visit([](const auto& p) { return p.v_iter; }, params);
  return vertex_update(mesh, topo, normals, v_iter);
}

PipelineResult run_pipeline(const TriMesh& noisy, const DenoiseParams& params, const PipelineOptions& options) {
  PipelineResult result;
  if (options.segmentation) result.labels = segment(noisy, *options.segmentation, options.prefilter);
  result.mesh = denoise(noisy, params, result.labels ? &*result.labels : nullptr);
  return result;
}

}  // namespace segden
