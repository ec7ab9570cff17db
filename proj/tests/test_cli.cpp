// Integration tests that drive the installed command-line binary in a
// scratch directory. The binary path is injected by the build as
// LGLRR_CLI_PATH.

#include "lglrr/data.hpp"
#include "lglrr/errors.hpp"

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("lglrr_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

struct RunResult {
  int exit_code;
  std::string stdout_text;
};

RunResult run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path out = scratch / "stdout.txt";
  const std::string cmd = std::string("\"") + LGLRR_CLI_PATH + "\" " + args +
                          " > \"" + out.string() + "\" 2> \"" +
                          (scratch / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream f(out);
  std::ostringstream ss;
  ss << f.rdbuf();
  r.stdout_text = ss.str();
  return r;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("synth writes a loadable dataset") {
  TempDir dir;
  const auto r = run_cli("synth --clusters 2 --per-cluster 3 --ambient-dim 8 "
                         "--subspace-dim 2 --sigma 0.1 --seed 3 --out " +
                             (dir.path / "data").string(),
                         dir.path);
  REQUIRE(r.exit_code == 0);

  const auto manifest = lglrr::load_manifest(dir.path / "data/manifest.tsv");
  REQUIRE(manifest.entries.size() == 6);
  CHECK(manifest.labeled());
  for (const auto& e : manifest.entries) {
    const lglrr::Matrix m = lglrr::read_matrix(e.path);
    CHECK(m.rows() == 8);
    CHECK(m.cols() == 2);
    // Stored representatives are orthonormal.
    CHECK((m.transpose() * m - lglrr::Matrix::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() <= 1e-10);
  }
  const auto labels = lglrr::read_labels(dir.path / "data/labels.csv");
  CHECK(labels.size() == 6);
}

TEST_CASE("cluster produces labels, coefficients, a trace and a report") {
  TempDir dir;
  REQUIRE(run_cli("synth --clusters 2 --per-cluster 5 --ambient-dim 12 "
                  "--subspace-dim 2 --sigma 0.05 --seed 9 --out " +
                      (dir.path / "data").string(),
                  dir.path)
              .exit_code == 0);

  const auto r = run_cli(
      "cluster --manifest " + (dir.path / "data/manifest.tsv").string() +
          " --p 2 --clusters 2 --neighbors 5 --max-iters 3000 --out " +
          (dir.path / "run").string(),
      dir.path);
  REQUIRE(r.exit_code == 0);  // converged

  CHECK(fs::exists(dir.path / "run/labels.csv"));
  CHECK(fs::exists(dir.path / "run/W.mtx"));
  CHECK(fs::exists(dir.path / "run/trace.csv"));
  CHECK(fs::exists(dir.path / "run/report.json"));

  const auto eval = run_cli(
      "eval --pred " + (dir.path / "run/labels.csv").string() + " --truth " +
          (dir.path / "data/labels.csv").string(),
      dir.path);
  CHECK(eval.exit_code == 0);
  CHECK(eval.stdout_text == "1.0000\n");

  // The trace header matches the documented column order.
  std::ifstream trace(dir.path / "run/trace.csv");
  std::string header;
  std::getline(trace, header);
  CHECK(header == "iter,beta,primal_change,affine_residual");
}

TEST_CASE("a two-point dataset has the forced solution") {
  TempDir dir;
  REQUIRE(run_cli("synth --clusters 2 --per-cluster 1 --ambient-dim 6 "
                  "--subspace-dim 2 --sigma 0 --seed 5 --out " +
                      (dir.path / "data").string(),
                  dir.path)
              .exit_code == 0);
  const auto r = run_cli(
      "cluster --manifest " + (dir.path / "data/manifest.tsv").string() +
          " --p 2 --clusters 2 --neighbors 1 --out " +
          (dir.path / "run").string(),
      dir.path);
  REQUIRE(r.exit_code == 0);
  const lglrr::Matrix w = lglrr::read_matrix(dir.path / "run/W.mtx");
  CHECK(w(0, 0) == 0.0);
  CHECK(w(1, 1) == 0.0);
  CHECK(w(0, 1) == 1.0);
  CHECK(w(1, 0) == 1.0);
}

TEST_CASE("eval scores identical files as a perfect match") {
  TempDir dir;
  lglrr::write_labels(dir.path / "a.csv", {"x", "y", "z"}, {0, 1, 0});
  lglrr::write_labels(dir.path / "b.csv", {"z", "x", "y"}, {1, 1, 0});
  // Ids align by name, not order, and relabeling does not matter.
  const auto r = run_cli("eval --pred " + (dir.path / "a.csv").string() +
                             " --truth " + (dir.path / "b.csv").string(),
                         dir.path);
  CHECK(r.exit_code == 0);
  CHECK(r.stdout_text == "1.0000\n");
}

TEST_CASE("sweep emits one row per lambda") {
  TempDir dir;
  REQUIRE(run_cli("synth --clusters 2 --per-cluster 4 --ambient-dim 10 "
                  "--subspace-dim 2 --sigma 0.05 --seed 13 --out " +
                      (dir.path / "data").string(),
                  dir.path)
              .exit_code == 0);
  const auto r = run_cli(
      "sweep --manifest " + (dir.path / "data/manifest.tsv").string() +
          " --p 2 --clusters 2 --neighbors 6 --lambda-grid 0.5,1,2 "
          "--max-iters 300",
      dir.path);
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(r.stdout_text);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "lambda,c,accuracy,iterations,converged");
  int rows = 0;
  while (std::getline(lines, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("failure exit codes") {
  TempDir dir;
  SUBCASE("usage errors exit 2") {
    CHECK(run_cli("cluster --no-such-flag", dir.path).exit_code == 2);
    CHECK(run_cli("", dir.path).exit_code == 2);
  }
  SUBCASE("data errors exit 3") {
    CHECK(run_cli("cluster --manifest /nonexistent.tsv --clusters 2 --out " +
                      (dir.path / "out").string(),
                  dir.path)
              .exit_code == 3);
    lglrr::write_labels(dir.path / "a.csv", {"x"}, {0});
    lglrr::write_labels(dir.path / "b.csv", {"y"}, {0});
    CHECK(run_cli("eval --pred " + (dir.path / "a.csv").string() +
                      " --truth " + (dir.path / "b.csv").string(),
                  dir.path)
              .exit_code == 3);
  }
  SUBCASE("the iteration cap exits 4 but still writes outputs") {
    REQUIRE(run_cli("synth --clusters 2 --per-cluster 5 --ambient-dim 12 "
                    "--subspace-dim 2 --sigma 0.05 --seed 9 --out " +
                        (dir.path / "data").string(),
                    dir.path)
                .exit_code == 0);
    const auto r = run_cli(
        "cluster --manifest " + (dir.path / "data/manifest.tsv").string() +
            " --p 2 --clusters 2 --neighbors 5 --max-iters 10 --out " +
            (dir.path / "run").string(),
        dir.path);
    CHECK(r.exit_code == 4);
    CHECK(fs::exists(dir.path / "run/labels.csv"));
    CHECK(fs::exists(dir.path / "run/W.mtx"));
  }
  SUBCASE("a dataset pair at the cut locus exits 5") {
    // Two orthogonal lines in the plane: the log map is undefined.
    fs::create_directories(dir.path / "data");
    lglrr::Matrix e1(2, 1);
    e1 << 1.0, 0.0;
    lglrr::Matrix e2(2, 1);
    e2 << 0.0, 1.0;
    lglrr::write_matrix(dir.path / "data/a.mtx", e1);
    lglrr::write_matrix(dir.path / "data/b.mtx", e2);
    std::ofstream mf(dir.path / "data/manifest.tsv");
    mf << "a.mtx\ta\nb.mtx\tb\n";
    mf.close();
    const auto r = run_cli(
        "cluster --manifest " + (dir.path / "data/manifest.tsv").string() +
            " --p 1 --clusters 2 --neighbors 1 --out " +
            (dir.path / "run").string(),
        dir.path);
    CHECK(r.exit_code == 5);
  }
}

TEST_SUITE_END();
