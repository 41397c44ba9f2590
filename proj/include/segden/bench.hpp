#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segden/denoise.hpp"
#include "segden/noise.hpp"
#include "segden/prefilter.hpp"
#include "segden/segment.hpp"

namespace segden {

// Benchmark configuration. Text format, one `key = value` per line, `#`
// starts a comment, `sweep.<method>` may repeat:
//
//   fixture = cube          # or: input = path/to/mesh.obj
//   subdiv = 16
//   truth = clean.obj       # optional; defaults to the input when noise is added
//   noise.sigma = 0.5
//   noise.mode = normal     # normal | isotropic
//   seed = 7
//   output = bench_out
//   dthr = 0.05
//   min_cluster = 50
//   ring_depth = 2
//   refine = on
//   prefilter = on
//   prefilter.alpha = 0.1
//   prefilter.beta = 0.1
//   prefilter.sigma_w = 0.35
//   prefilter.refreeze = 0
//   threads = 2
//   timing = off            # on fills the wall_ms column (breaks byte-stability)
//   sweep.unf = 0.5,20,10
//   sweep.gnf = 2,1,0.3,20,10
struct PipelineConfig {
  std::optional<std::filesystem::path> input;
  std::string fixture;
  int subdiv = 8;
  std::optional<std::filesystem::path> truth;
  std::optional<NoiseSpec> noise;
  std::optional<PrefilterParams> prefilter;
  SegmentParams segment;
  std::vector<DenoiseParams> sweep;
  std::filesystem::path output = "bench_out";
  std::uint64_t seed = 0;
  int threads = 1;
  bool timing = false;

  std::string model_name() const;
  // Throws InvalidArgument (bad or empty sweep, bad values) or IoError
  // (referenced file missing).
  void validate() const;
};

PipelineConfig parse_config(std::istream& in);
PipelineConfig load_config(const std::filesystem::path& path);

struct BenchJob {
  std::string label;
  DenoiseParams params;
  bool use_clusters = false;
};

struct BenchRow {
  BenchJob job;
  std::optional<double> msae;
  std::optional<double> ev;
  std::string status = "ok";
  double wall_ms = 0.0;
};

struct SweepSummary {
  std::string method;
  bool use_clusters = false;
  int jobs = 0;
  double mean_msae = 0.0;
  double std_msae = 0.0;
  double cv_msae = 0.0;
  double mean_ev = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<SweepSummary> summary;
  int cluster_count = 0;
};

// Population standard deviation over the mean; 0 for an empty or zero-mean
// sample.
double coefficient_of_variation(std::span<const double> values);

// Every sweep entry runs twice, without and with clusters, on one shared
// noise realization. Writes results.csv, summary.csv, labels.txt and
// clusters.ply into config.output. Failed jobs are recorded with their
// status and do not stop the run.
BenchReport run_bench(const PipelineConfig& config);

std::vector<SweepSummary> summarize(std::span<const BenchRow> rows);

// CSV helpers shared with the command line tool.
std::string csv_field(const std::string& s);
std::string format_number(double v);

}  // namespace segden
