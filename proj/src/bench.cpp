#include "segden/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <thread>

#include "segden/fixtures.hpp"
#include "segden/mesh_io.hpp"
#include "segden/metrics.hpp"

namespace segden {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void config_error(int line, const std::string& msg) {
  throw Error(ErrorCode::InvalidArgument, "config line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) config_error(line, "trailing characters in number '" + v + "'");
    return d;
  } catch (const std::logic_error&) {
    config_error(line, "expected a number, got '" + v + "'");
  }
}

int to_int(const std::string& v, int line) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) config_error(line, "expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& v, int line) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  config_error(line, "expected on/off, got '" + v + "'");
}

}  // namespace

std::string PipelineConfig::model_name() const {
  if (input) return input->stem().string();
  return fixture + std::to_string(subdiv);
}

void PipelineConfig::validate() const {
  if (sweep.empty()) throw Error(ErrorCode::InvalidArgument, "config has no sweep entries");
  if (!input && fixture.empty()) throw Error(ErrorCode::InvalidArgument, "config needs `input` or `fixture`");
  if (input && !fixture.empty()) throw Error(ErrorCode::InvalidArgument, "`input` and `fixture` are exclusive");
  if (threads < 1) throw Error(ErrorCode::InvalidArgument, "threads must be >= 1");
  if (!noise && !truth && fixture.empty()) {
    throw Error(ErrorCode::InvalidArgument, "without noise a `truth` mesh is required");
  }
  segment.validate();
  if (prefilter) prefilter->validate();
  if (noise && !(noise->sigma_factor >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise.sigma must be >= 0");
  for (const auto& p : sweep) segden::validate(p);
  if (input && !std::filesystem::exists(*input)) throw Error(ErrorCode::IoError, "missing input " + input->string());
  if (truth && !std::filesystem::exists(*truth)) throw Error(ErrorCode::IoError, "missing truth " + truth->string());
}

PipelineConfig parse_config(std::istream& in) {
  PipelineConfig cfg;
  PrefilterParams pre;
  bool prefilter_on = false;
  NoiseSpec noise;
  bool has_noise = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error(line_no, "expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key.rfind("sweep.", 0) == 0) {
      try {
        cfg.sweep.push_back(parse_denoise_params(key.substr(6), value));
      } catch (const Error& e) {
        config_error(line_no, e.what());
      }
    } else if (key == "input") {
      cfg.input = value;
    } else if (key == "fixture") {
      cfg.fixture = value;
    } else if (key == "subdiv") {
      cfg.subdiv = to_int(value, line_no);
    } else if (key == "truth") {
      cfg.truth = value;
    } else if (key == "noise.sigma") {
      noise.sigma_factor = to_double(value, line_no);
      has_noise = true;
    } else if (key == "noise.mode") {
      if (value == "normal") {
        noise.mode = NoiseMode::AlongNormal;
      } else if (value == "isotropic") {
        noise.mode = NoiseMode::Isotropic;
      } else {
        config_error(line_no, "noise.mode must be normal or isotropic");
      }
    } else if (key == "seed") {
      try {
        cfg.seed = std::stoull(value);
      } catch (const std::logic_error&) {
        config_error(line_no, "bad seed '" + value + "'");
      }
    } else if (key == "output") {
      cfg.output = value;
    } else if (key == "dthr") {
      cfg.segment.d_thr = to_double(value, line_no);
    } else if (key == "min_cluster") {
      cfg.segment.min_cluster_size = to_int(value, line_no);
    } else if (key == "ring_depth") {
      cfg.segment.ring_depth = to_int(value, line_no);
    } else if (key == "refine") {
      cfg.segment.refine = to_bool(value, line_no);
    } else if (key == "prefilter") {
      prefilter_on = to_bool(value, line_no);
    } else if (key == "prefilter.alpha") {
      pre.alpha = to_double(value, line_no);
    } else if (key == "prefilter.beta") {
      pre.beta = to_double(value, line_no);
    } else if (key == "prefilter.sigma_w") {
      pre.sigma_w = to_double(value, line_no);
    } else if (key == "prefilter.refreeze") {
      pre.refreeze_iterations = to_int(value, line_no);
    } else if (key == "threads") {
      cfg.threads = to_int(value, line_no);
    } else if (key == "timing") {
      cfg.timing = to_bool(value, line_no);
    } else {
      config_error(line_no, "unknown key '" + key + "'");
    }
  }
  noise.seed = cfg.seed;
  if (has_noise) cfg.noise = noise;
  if (prefilter_on) cfg.prefilter = pre;
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  return parse_config(in);
}

double coefficient_of_variation(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (mean == 0.0) return 0.0;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return std::sqrt(var) / mean;
}

std::vector<SweepSummary> summarize(std::span<const BenchRow> rows) {
  std::vector<SweepSummary> out;
  std::vector<std::vector<double>> msae_groups;
  std::vector<std::vector<double>> ev_groups;
  for (const BenchRow& row : rows) {
    if (!row.msae || !row.ev) continue;
    const std::string method = method_name(row.job.params);
    auto it = std::find_if(out.begin(), out.end(), [&](const SweepSummary& s) {
      return s.method == method && s.use_clusters == row.job.use_clusters;
    });
    if (it == out.end()) {
      out.push_back({method, row.job.use_clusters});
      msae_groups.emplace_back();
      ev_groups.emplace_back();
      it = out.end() - 1;
    }
    const auto g = static_cast<std::size_t>(it - out.begin());
    msae_groups[g].push_back(*row.msae);
    ev_groups[g].push_back(*row.ev);
  }
  for (std::size_t g = 0; g < out.size(); ++g) {
    const auto& m = msae_groups[g];
    SweepSummary& s = out[g];
    s.jobs = static_cast<int>(m.size());
    for (double v : m) s.mean_msae += v;
    s.mean_msae /= s.jobs;
    for (double v : m) s.std_msae += (v - s.mean_msae) * (v - s.mean_msae);
    s.std_msae = std::sqrt(s.std_msae / s.jobs);
    s.cv_msae = coefficient_of_variation(m);
    for (double v : ev_groups[g]) s.mean_ev += v;
    s.mean_ev /= s.jobs;
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

BenchReport run_bench(const PipelineConfig& config) {
  config.validate();

  const TriMesh input = config.input ? read_obj(*config.input) : make_fixture(config.fixture, config.subdiv);
  TriMesh noisy = input;
  TriMesh truth = input;
  if (config.noise) noisy = add_noise(input, *config.noise);
  if (config.truth) truth = read_obj(*config.truth);

  std::filesystem::create_directories(config.output);

  BenchReport report;
  const ClusterLabels labels = segment(noisy, config.segment, config.prefilter);
  report.cluster_count = labels.cluster_count;
  write_labels(labels.label, config.output / "labels.txt");
  write_ply_colored(noisy, labels.label, config.output / "clusters.ply");

  std::vector<BenchJob> jobs;
  for (const DenoiseParams& p : config.sweep) {
    const std::string tag = method_name(p) + "_" + format_params(p);
    jobs.push_back({tag, p, false});
    jobs.push_back({"our+" + tag, p, true});
  }
  for (BenchJob& job : jobs) std::replace(job.label.begin(), job.label.end(), ',', '_');

  report.rows.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      BenchRow& row = report.rows[k];
      row.job = jobs[k];
      const auto start = std::chrono::steady_clock::now();
      try {
        const TriMesh result = denoise(noisy, jobs[k].params, jobs[k].use_clusters ? &labels : nullptr);
        row.msae = msae(result, truth);
        row.ev = ev(result, truth);
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
      }
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  };
  const int thread_count = std::min<int>(config.threads, static_cast<int>(jobs.size()));
  std::vector<std::jthread> pool;
  for (int t = 1; t < thread_count; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  report.summary = summarize(report.rows);

  const std::string model = config.model_name();
  const auto results_path = config.output / "results.csv";
  std::ofstream csv(results_path);
  if (!csv) throw Error(ErrorCode::IoError, "cannot open " + results_path.string());
  csv << "label,model,method,use_clusters,dthr,params,msae,ev,status,wall_ms\n";
  for (const BenchRow& row : report.rows) {
    csv << csv_field(row.job.label) << ',' << csv_field(model) << ',' << method_name(row.job.params) << ','
        << (row.job.use_clusters ? 1 : 0) << ',' << (row.job.use_clusters ? format_number(config.segment.d_thr) : "")
        << ',' << csv_field(format_params(row.job.params)) << ',' << (row.msae ? format_number(*row.msae) : "")
        << ',' << (row.ev ? format_number(*row.ev) : "") << ',' << csv_field(row.status) << ','
        << (config.timing ? format_number(row.wall_ms) : "") << '\n';
  }
  csv.flush();
  if (!csv) throw Error(ErrorCode::IoError, "write failed for " + results_path.string());

  const auto summary_path = config.output / "summary.csv";
  std::ofstream sum(summary_path);
  if (!sum) throw Error(ErrorCode::IoError, "cannot open " + summary_path.string());
  sum << "method,use_clusters,jobs,mean_msae,std_msae,cv_msae,mean_ev\n";
  for (const SweepSummary& s : report.summary) {
    sum << s.method << ',' << (s.use_clusters ? 1 : 0) << ',' << s.jobs << ',' << format_number(s.mean_msae) << ','
        << format_number(s.std_msae) << ',' << format_number(s.cv_msae) << ',' << format_number(s.mean_ev) << '\n';
  }
  sum.flush();
  if (!sum) throw Error(ErrorCode::IoError, "write failed for " + summary_path.string());
  return report;
}

}  // namespace segden
