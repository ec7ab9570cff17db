// Command-line front end: synthetic dataset generation, end-to-end
// clustering, accuracy scoring, and parameter sweeps over datasets of
// subspaces. See the subcommand help strings for usage.

#include <CLI11.hpp>

#include "lglrr/data.hpp"
#include "lglrr/errors.hpp"
#include "lglrr/eval.hpp"
#include "lglrr/solver.hpp"
#include "lglrr/spectral.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNotConverged = 4;
constexpr int kExitCutLocus = 5;

int env_threads() {
  const char* s = std::getenv("LGLRR_THREADS");
  if (s != nullptr) {
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end != s && *end == '\0' && v >= 1) return static_cast<int>(v);
    std::cerr << "warning: ignoring invalid LGLRR_THREADS value '" << s
              << "'\n";
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct SolverFlags {
  lglrr::SolverConfig config;
  double eta_w = 0.0;  // 0 means "use the default"

  void attach(CLI::App* cmd) {
    cmd->add_option("--lambda", config.lambda, "Nuclear norm weight")
        ->capture_default_str();
    cmd->add_option("--neighbors", config.c, "Neighbors per point (C)")
        ->capture_default_str();
    cmd->add_option("--rho0", config.rho0, "Penalty growth factor")
        ->capture_default_str();
    cmd->add_option("--beta0", config.beta0, "Initial penalty")
        ->capture_default_str();
    cmd->add_option("--beta-max", config.beta_max, "Penalty cap")
        ->capture_default_str();
    cmd->add_option("--eps1", config.eps1, "Tolerance on beta * ||dW||_F")
        ->capture_default_str();
    cmd->add_option("--eps2", config.eps2, "Tolerance on ||W 1 - 1||")
        ->capture_default_str();
    cmd->add_option("--max-iters", config.max_iters, "Iteration cap")
        ->capture_default_str();
    cmd->add_option("--eta-w", eta_w,
                    "Linearization constant override (default: "
                    "max_i ||B_i||^2 + N + 1)");
  }

  lglrr::SolverConfig resolve() const {
    lglrr::SolverConfig c = config;
    if (eta_w != 0.0) c.eta_w_override = eta_w;
    return c;
  }
};

struct LoadedDataset {
  std::vector<lglrr::GrassmannPoint> points;
  std::vector<std::string> ids;
  std::vector<int> labels;  // empty when the manifest is unlabeled
};

LoadedDataset load_points(const fs::path& manifest_path, int p,
                          bool normalize) {
  const lglrr::DatasetManifest manifest =
      lglrr::load_manifest(manifest_path);
  LoadedDataset out;
  out.points.reserve(manifest.entries.size());
  out.ids.reserve(manifest.entries.size());
  for (const auto& entry : manifest.entries) {
    const lglrr::Matrix gamma = lglrr::read_matrix(entry.path);
    try {
      out.points.push_back(lglrr::columns_to_point(gamma, p, normalize));
    } catch (const lglrr::Error& e) {
      throw lglrr::ValidationError("while ingesting " + entry.path.string() +
                                   ": " + e.what());
    }
    out.ids.push_back(entry.id);
    if (entry.label) out.labels.push_back(*entry.label);
  }
  return out;
}

void write_trace(const fs::path& path,
                 const std::vector<lglrr::TraceRow>& trace) {
  std::ofstream f(path);
  if (!f) throw lglrr::IoError("cannot open " + path.string());
  f << "iter,beta,primal_change,affine_residual\n";
  for (const auto& row : trace) {
    f << row.iter << ',' << format_double(row.beta) << ','
      << format_double(row.primal_change) << ','
      << format_double(row.affine_residual) << '\n';
  }
}

int cmd_synth(const lglrr::SynthSpec& spec, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const lglrr::SynthDataset data = lglrr::generate_synthetic(spec);

  std::ofstream manifest(out_dir / "manifest.tsv");
  if (!manifest) {
    throw lglrr::IoError("cannot open " +
                         (out_dir / "manifest.tsv").string());
  }
  manifest << "# synthetic dataset: clusters=" << spec.r
           << " per_cluster=" << spec.per_cluster << " d=" << spec.d
           << " p=" << spec.p << " sigma=" << spec.sigma
           << " seed=" << spec.seed << "\n";

  std::vector<std::string> ids;
  ids.reserve(data.points.size());
  char name[32];
  for (std::size_t i = 0; i < data.points.size(); ++i) {
    std::snprintf(name, sizeof name, "point_%04zu.mtx", i);
    lglrr::write_matrix(out_dir / name, data.points[i].x());
    std::snprintf(name, sizeof name, "point_%04zu", i);
    ids.emplace_back(name);
    manifest << ids.back() << ".mtx\t" << ids.back() << '\t'
             << data.labels[i] << '\n';
  }
  manifest.flush();
  if (!manifest) {
    throw lglrr::IoError("failed while writing the manifest");
  }
  lglrr::write_labels(out_dir / "labels.csv", ids, data.labels);

  std::cout << "wrote " << data.points.size() << " points to "
            << out_dir.string() << '\n';
  return kExitOk;
}

int cmd_cluster(const fs::path& manifest_path, int p, int clusters,
                std::uint64_t seed, bool normalize, const SolverFlags& flags,
                const fs::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const LoadedDataset data = load_points(manifest_path, p, normalize);

  const lglrr::SolverConfig config = flags.resolve();
  const lglrr::NeighborhoodGraph graph =
      lglrr::build_neighborhood(data.points, config.c);
  const lglrr::BTensor b =
      lglrr::build_btensor(data.points, graph, env_threads());
  const lglrr::SolverState state = lglrr::solve(graph, b, config);

  const std::vector<int> labels =
      lglrr::ncut(lglrr::affinity_from_w(state.w), clusters, seed);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  fs::create_directories(out_dir);
  lglrr::write_labels(out_dir / "labels.csv", data.ids, labels);
  lglrr::write_matrix(out_dir / "W.mtx", state.w);
  write_trace(out_dir / "trace.csv", state.trace);

  lglrr::RunReport report;
  report.command = "cluster";
  report.config = {
      {"manifest", manifest_path.string()},
      {"n", std::to_string(data.points.size())},
      {"p", std::to_string(p)},
      {"lambda", format_double(config.lambda)},
      {"c", std::to_string(config.c)},
      {"clusters", std::to_string(clusters)},
      {"seed", std::to_string(seed)},
      {"normalize", normalize ? "true" : "false"},
      {"max_iters", std::to_string(config.max_iters)},
  };
  report.iterations = state.iterations;
  report.converged = state.converged;
  report.eta_w = state.eta_w;
  report.wall_seconds = wall;
  if (state.c_clamped) {
    report.warnings.push_back(
        "requested C >= N, clamped to " +
        std::to_string(graph.effective_c) + " neighbors");
  }
  {
    std::ofstream f(out_dir / "report.json");
    if (!f) {
      throw lglrr::IoError("cannot open " +
                           (out_dir / "report.json").string());
    }
    f << lglrr::to_json_line(report) << '\n';
  }
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';

  std::cout << "converged=" << (state.converged ? "true" : "false")
            << " iterations=" << state.iterations << " eta_w=" << state.eta_w
            << " wall=" << wall << "s outputs=" << out_dir.string() << '\n';
  if (!state.converged) {
    std::cerr << "warning: iteration cap reached before both residuals met "
                 "tolerance; outputs were still written\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_eval(const fs::path& pred_path, const fs::path& truth_path) {
  const auto pred = lglrr::read_labels(pred_path);
  const auto truth = lglrr::read_labels(truth_path);
  if (pred.size() != truth.size()) {
    throw lglrr::ValidationError(
        "prediction and truth files label different numbers of items");
  }
  std::map<std::string, int> truth_by_id(truth.begin(), truth.end());
  std::vector<int> pred_labels;
  std::vector<int> truth_labels;
  pred_labels.reserve(pred.size());
  truth_labels.reserve(pred.size());
  for (const auto& [id, label] : pred) {
    const auto it = truth_by_id.find(id);
    if (it == truth_by_id.end()) {
      throw lglrr::ValidationError("id '" + id + "' missing from " +
                                   truth_path.string());
    }
    pred_labels.push_back(label);
    truth_labels.push_back(it->second);
  }
  std::printf("%.4f\n", lglrr::accuracy(pred_labels, truth_labels));
  return kExitOk;
}

int cmd_sweep(const fs::path& manifest_path, int p, int clusters,
              std::uint64_t seed, bool normalize, const SolverFlags& flags,
              const std::vector<double>& lambda_grid,
              const std::vector<int>& c_grid, const std::string& out_path) {
  const LoadedDataset data = load_points(manifest_path, p, normalize);
  if (data.labels.empty()) {
    throw lglrr::ValidationError(
        "sweep needs ground truth: the manifest must carry labels");
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw lglrr::IoError("cannot open " + out_path);
    out = &file;
  }
  (*out) << "lambda,c,accuracy,iterations,converged\n";

  const int threads = env_threads();
  std::vector<int> cs = c_grid;
  if (cs.empty()) cs.push_back(flags.config.c);

  for (int c : cs) {
    // The graph and B tensor depend on C but not on lambda, so they are
    // built once per C and shared across the lambda grid.
    lglrr::SolverConfig config = flags.resolve();
    config.c = c;
    const lglrr::NeighborhoodGraph graph =
        lglrr::build_neighborhood(data.points, c);
    const lglrr::BTensor b =
        lglrr::build_btensor(data.points, graph, threads);
    for (double lambda : lambda_grid) {
      config.lambda = lambda;
      const lglrr::SolverState state = lglrr::solve(graph, b, config);
      const std::vector<int> labels =
          lglrr::ncut(lglrr::affinity_from_w(state.w), clusters, seed);
      const double acc = lglrr::accuracy(labels, data.labels);
      char row[128];
      std::snprintf(row, sizeof row, "%g,%d,%.4f,%d,%d\n", lambda, c, acc,
                    state.iterations, state.converged ? 1 : 0);
      (*out) << row;
    }
  }
  out->flush();
  if (!*out) throw lglrr::IoError("failed while writing sweep results");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subspace clustering on Grassmann manifolds via localized "
               "low-rank representations"};
  app.require_subcommand(1);

  // synth
  lglrr::SynthSpec spec;
  std::string synth_out;
  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a labeled synthetic dataset of subspaces");
  synth->add_option("--clusters", spec.r, "Number of clusters")
      ->capture_default_str();
  synth->add_option("--per-cluster", spec.per_cluster, "Points per cluster")
      ->capture_default_str();
  synth->add_option("--ambient-dim", spec.d, "Ambient dimension d")
      ->capture_default_str();
  synth->add_option("--subspace-dim", spec.p, "Subspace dimension p")
      ->capture_default_str();
  synth->add_option("--sigma", spec.sigma, "Geodesic noise scale")
      ->capture_default_str();
  synth->add_option("--seed", spec.seed, "RNG seed")->capture_default_str();
  synth->add_option("--out", synth_out, "Output directory")->required();

  // cluster
  std::string cluster_manifest;
  std::string cluster_out;
  int cluster_p = 10;
  int cluster_r = 0;
  std::uint64_t cluster_seed = 0;
  bool cluster_normalize = false;
  SolverFlags cluster_flags;
  CLI::App* cluster = app.add_subcommand(
      "cluster", "Cluster the subspaces listed in a manifest");
  cluster->add_option("--manifest", cluster_manifest, "Dataset manifest")
      ->required();
  cluster->add_option("--p", cluster_p, "Subspace dimension per point")
      ->capture_default_str();
  cluster->add_option("--clusters", cluster_r, "Number of clusters (R)")
      ->required();
  cluster->add_option("--seed", cluster_seed, "Seed for spectral k-means")
      ->capture_default_str();
  cluster->add_flag("--normalize", cluster_normalize,
                    "Standardize each feature column before ingestion");
  cluster_flags.attach(cluster);
  cluster->add_option("--out", cluster_out, "Output directory")->required();

  // eval
  std::string eval_pred;
  std::string eval_truth;
  CLI::App* eval = app.add_subcommand(
      "eval", "Score predicted labels against ground truth");
  eval->add_option("--pred", eval_pred, "Predicted labels CSV")->required();
  eval->add_option("--truth", eval_truth, "Ground truth labels CSV")
      ->required();

  // sweep
  std::string sweep_manifest;
  std::string sweep_out;
  int sweep_p = 10;
  int sweep_r = 0;
  std::uint64_t sweep_seed = 0;
  bool sweep_normalize = false;
  std::vector<double> lambda_grid;
  std::vector<int> c_grid;
  SolverFlags sweep_flags;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Accuracy over a parameter grid on a labeled manifest");
  sweep->add_option("--manifest", sweep_manifest, "Labeled dataset manifest")
      ->required();
  sweep->add_option("--p", sweep_p, "Subspace dimension per point")
      ->capture_default_str();
  sweep->add_option("--clusters", sweep_r, "Number of clusters (R)")
      ->required();
  sweep->add_option("--seed", sweep_seed, "Seed for spectral k-means")
      ->capture_default_str();
  sweep->add_flag("--normalize", sweep_normalize,
                  "Standardize each feature column before ingestion");
  sweep->add_option("--lambda-grid", lambda_grid,
                    "Comma-separated lambda values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--c-grid", c_grid, "Comma-separated neighbor counts")
      ->delimiter(',');
  sweep_flags.attach(sweep);
  sweep->add_option("--out", sweep_out,
                    "Output CSV path (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(spec, synth_out);
    if (cluster->parsed()) {
      return cmd_cluster(cluster_manifest, cluster_p, cluster_r, cluster_seed,
                         cluster_normalize, cluster_flags, cluster_out);
    }
    if (eval->parsed()) return cmd_eval(eval_pred, eval_truth);
    if (sweep->parsed()) {
      return cmd_sweep(sweep_manifest, sweep_p, sweep_r, sweep_seed,
                       sweep_normalize, sweep_flags, lambda_grid, c_grid,
                       sweep_out);
    }
  } catch (const lglrr::PairAtCutLocusError& e) {
    std::cerr << "error: " << e.what() << " (dataset pair " << e.i << ", "
              << e.j << ")\n";
    return kExitCutLocus;
  } catch (const lglrr::CutLocusError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCutLocus;
  } catch (const lglrr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}
