// segden: segmentation-driven mesh denoising from the command line.
//
// Exit codes: 0 ok, 2 I/O or processing failure, 3 metric connectivity
// mismatch, 64 usage error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "segden/bench.hpp"
#include "segden/denoise.hpp"
#include "segden/edge_operator.hpp"
#include "segden/fixtures.hpp"
#include "segden/mesh_io.hpp"
#include "segden/metrics.hpp"
#include "segden/noise.hpp"
#include "segden/prefilter.hpp"
#include "segden/segment.hpp"

namespace fs = std::filesystem;
using namespace segden;

namespace {

constexpr int kExitIo = 2;
constexpr int kExitMismatch = 3;
constexpr int kExitUsage = 64;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ConnectivityMismatch: return kExitMismatch;
    case ErrorCode::InvalidArgument: return kExitUsage;
    default: return kExitIo;
  }
}

// Accepts "inf" and friends, which the option parser's numeric check rejects.
double parse_threshold(const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw Error(ErrorCode::InvalidArgument, "bad threshold '" + text + "'");
}

struct PrefilterFlags {
  bool enabled = false;
  PrefilterParams params;

  void add_to(CLI::App* cmd) {
    cmd->add_flag("--prefilter", enabled, "Pre-filter before segmenting (recommended for noise >= 0.3 l_e)");
    cmd->add_option("--alpha", params.alpha, "Pre-filter edge-operator weight")->capture_default_str();
    cmd->add_option("--beta", params.beta, "Pre-filter regularizer weight")->capture_default_str();
    cmd->add_option("--sigma-w", params.sigma_w, "Pre-filter edge weight bandwidth")->capture_default_str();
    cmd->add_option("--refreeze", params.refreeze_iterations, "Extra pre-filter re-linearization rounds")
        ->capture_default_str();
  }
  std::optional<PrefilterParams> get() const { return enabled ? std::optional(params) : std::nullopt; }
};

struct SegmentFlags {
  std::string dthr = "0";
  int min_cluster = 50;
  int ring_depth = 2;
  bool no_refine = false;
  std::string metric = "edgeop";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--dthr", dthr, "Edge-operator norm threshold (model units, or 'inf')");
    cmd->add_option("--min-cluster", min_cluster, "Clusters below this face count are merged")
        ->capture_default_str();
    cmd->add_option("--ring-depth", ring_depth, "Refinement neighborhood depth")->capture_default_str();
    cmd->add_flag("--no-refine", no_refine, "Skip small-cluster refinement");
    cmd->add_option("--metric", metric, "edgeop | normal-angle (dthr in degrees) | none")
        ->check(CLI::IsMember({"edgeop", "normal-angle", "none"}))
        ->capture_default_str();
  }
  SegmentParams get() const {
    SegmentParams p;
    p.d_thr = parse_threshold(dthr);
    p.min_cluster_size = min_cluster;
    p.ring_depth = ring_depth;
    p.refine = !no_refine;
    p.metric = metric == "edgeop" ? SegmentMetric::EdgeOperator
               : metric == "none" ? SegmentMetric::None
                                  : SegmentMetric::NormalAngle;
    return p;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segmentation-driven mesh denoising"};
  app.require_subcommand(1);

  // noise
  auto* noise_cmd = app.add_subcommand("noise", "Add zero-mean Gaussian noise to a mesh");
  std::string noise_in, noise_out, noise_sigma = "0", noise_mode = "normal";
  std::uint64_t noise_seed = 0;
  noise_cmd->add_option("input", noise_in, "Input OBJ")->required();
  noise_cmd->add_option("--sigma", noise_sigma, "Noise std as a multiple of the mean edge length")->required();
  noise_cmd->add_option("--mode", noise_mode, "normal | isotropic")
      ->check(CLI::IsMember({"normal", "isotropic"}))
      ->capture_default_str();
  noise_cmd->add_option("--seed", noise_seed, "Random seed")->capture_default_str();
  noise_cmd->add_option("-o,--output", noise_out, "Output OBJ (default <input>_n<sigma>.obj)");

  // segment
  auto* seg_cmd = app.add_subcommand("segment", "Segment a mesh into near-planar clusters");
  std::string seg_in, seg_prefix;
  bool dump_norms = false;
  SegmentFlags seg_flags;
  PrefilterFlags seg_pre;
  seg_cmd->add_option("input", seg_in, "Input OBJ")->required();
  seg_flags.add_to(seg_cmd);
  seg_pre.add_to(seg_cmd);
  seg_cmd->add_flag("--dump-norms", dump_norms, "Write <prefix>.norms.csv with per-edge operator norms");
  seg_cmd->add_option("-o,--output", seg_prefix, "Output prefix (default: input without extension)");

  // denoise
  auto* den_cmd = app.add_subcommand("denoise", "Denoise a mesh, optionally cluster-constrained");
  std::string den_in, den_out, den_method, den_params;
  bool use_clusters = false;
  std::optional<double> den_noise;
  std::uint64_t den_seed = 0;
  SegmentFlags den_seg;
  PrefilterFlags den_pre;
  den_cmd->add_option("input", den_in, "Input OBJ")->required();
  den_cmd->add_option("--method", den_method, "unf | bnf | gnf | l1")
      ->required()
      ->check(CLI::IsMember({"unf", "bnf", "gnf", "l1"}));
  den_cmd->add_option("--params", den_params, "Comma tuple, e.g. 0.45,200,100")->required();
  den_cmd->add_flag("--use-clusters", use_clusters, "Constrain neighborhoods to clusters");
  den_seg.add_to(den_cmd);
  den_pre.add_to(den_cmd);
  den_cmd->add_option("--noise", den_noise, "Corrupt the input first (multiple of mean edge length)");
  den_cmd->add_option("--seed", den_seed, "Seed for --noise")->capture_default_str();
  den_cmd->add_option("-o,--output", den_out, "Output OBJ (default <input>_<method>.obj)");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Compare a result against ground truth");
  std::string eval_result, eval_truth, eval_label = "result", eval_report = "report.csv";
  eval_cmd->add_option("result", eval_result, "Result OBJ")->required();
  eval_cmd->add_option("truth", eval_truth, "Ground-truth OBJ")->required();
  eval_cmd->add_option("--label", eval_label, "Row label")->capture_default_str();
  eval_cmd->add_option("--report", eval_report, "CSV to append to")->capture_default_str();

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run a parameter sweep from a config file");
  std::string bench_config;
  bench_cmd->add_option("config", bench_config, "Config file")->required();

  // make-fixture
  auto* fix_cmd = app.add_subcommand("make-fixture", "Generate a clean test mesh");
  std::string fix_shape, fix_out;
  int fix_subdiv = 1;
  fix_cmd->add_option("shape", fix_shape, "cube | icosahedron | sphere | plane")->required();
  fix_cmd->add_option("--subdiv", fix_subdiv, "Grid size (cube, plane) or split levels (icosahedron, sphere)")
      ->capture_default_str();
  fix_cmd->add_option("-o,--output", fix_out, "Output OBJ (default <shape><subdiv>.obj)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*noise_cmd) {
      const fs::path in = noise_in;
      NoiseSpec spec;
      spec.sigma_factor = parse_threshold(noise_sigma);
      spec.mode = noise_mode == "normal" ? NoiseMode::AlongNormal : NoiseMode::Isotropic;
      spec.seed = noise_seed;
      const fs::path out =
          noise_out.empty() ? in.parent_path() / (in.stem().string() + "_n" + noise_sigma + ".obj") : fs::path(noise_out);
      write_obj(add_noise(read_obj(in), spec), out);
      std::cout << out.string() << '\n';
    } else if (*seg_cmd) {
      const fs::path in = seg_in;
      const std::string prefix = seg_prefix.empty() ? (in.parent_path() / in.stem()).string() : seg_prefix;
      const TriMesh mesh = read_obj(in);
      const SegmentParams params = seg_flags.get();
      const ClusterLabels labels = segment(mesh, params, seg_pre.get());
      write_labels(labels.label, prefix + ".labels.txt");
      write_ply_colored(mesh, labels.label, prefix + ".clusters.ply");
      if (dump_norms) {
        const TriMesh source = seg_pre.enabled ? prefilter(mesh, seg_pre.params) : mesh;
        const TopologyCache topo = build_topology(source);
        write_edge_norms_csv(topo, edge_operator_field(source, topo), prefix + ".norms.csv");
      }
      std::cout << "clusters: " << labels.cluster_count << '\n';
    } else if (*den_cmd) {
      DenoiseParams params;
      try {
        params = parse_denoise_params(den_method, den_params);
      } catch (const Error& e) {
        std::cerr << e.what() << "\n\n" << den_cmd->help();
        return kExitUsage;
      }
      const fs::path in = den_in;
      TriMesh mesh = read_obj(in);
      if (den_noise) mesh = add_noise(mesh, {*den_noise, NoiseMode::AlongNormal, den_seed});
      PipelineOptions options;
      if (use_clusters) {
        options.segmentation = den_seg.get();
        options.prefilter = den_pre.get();
      } else if (den_cmd->count("--dthr") > 0) {
        std::cerr << "warning: --dthr ignored without --use-clusters\n";
      }
      const PipelineResult result = run_pipeline(mesh, params, options);
      const fs::path out = den_out.empty()
                               ? in.parent_path() / (in.stem().string() + (use_clusters ? "_our_" : "_") + den_method + ".obj")
                               : fs::path(den_out);
      write_obj(result.mesh, out);
      if (result.labels) std::cout << "clusters: " << result.labels->cluster_count << '\n';
      std::cout << out.string() << '\n';
    } else if (*eval_cmd) {
      const TriMesh result = read_obj(eval_result);
      const TriMesh truth = read_obj(eval_truth);
      const MetricsReport report = evaluate(result, truth);
      const std::string row =
          csv_field(eval_label) + ',' + format_number(report.msae) + ',' + format_number(report.ev);
      const bool fresh = !fs::exists(eval_report) || fs::file_size(eval_report) == 0;
      std::ofstream csv(eval_report, std::ios::app);
      if (!csv) throw Error(ErrorCode::IoError, "cannot open " + eval_report);
      if (fresh) csv << "label,msae,ev\n";
      csv << row << '\n';
      if (!csv) throw Error(ErrorCode::IoError, "write failed for " + eval_report);
      std::cout << row << '\n';
    } else if (*bench_cmd) {
      const PipelineConfig config = load_config(bench_config);
      const BenchReport report = run_bench(config);
      std::cout << "clusters: " << report.cluster_count << '\n';
      for (const SweepSummary& s : report.summary) {
        std::cout << (s.use_clusters ? "our+" : "") << s.method << ": jobs " << s.jobs << ", mean msae "
                  << format_number(s.mean_msae) << ", cv " << format_number(s.cv_msae) << '\n';
      }
      int failed = 0;
      for (const BenchRow& row : report.rows) failed += row.status == "ok" ? 0 : 1;
      if (failed > 0) std::cerr << failed << " job(s) failed; see results.csv\n";
      std::cout << (config.output / "results.csv").string() << '\n';
    } else if (*fix_cmd) {
      const TriMesh mesh = make_fixture(fix_shape, fix_subdiv);
      const fs::path out = fix_out.empty() ? fs::path(fix_shape + std::to_string(fix_subdiv) + ".obj") : fs::path(fix_out);
      write_obj(mesh, out);
      std::cout << out.string() << ": " << mesh.num_vertices() << " vertices, " << mesh.num_faces() << " faces\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
