#include "lglrr/data.hpp"

#include "lglrr/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>

namespace lglrr {

namespace {

std::string rstrip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n' ||
                        s.back() == ' ' || s.back() == '\t')) {
    s.pop_back();
  }
  return s;
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

Matrix read_matrix(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) {
    throw IoError("cannot open " + path.string());
  }
  const std::string name = path.string();

  std::string line;
  int lineno = 0;

  if (!std::getline(f, line)) {
    throw ParseError(name, 1, "empty file, expected a 'rows cols' header");
  }
  ++lineno;
  long rows = 0;
  long cols = 0;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> rows >> cols) || (hs >> extra)) {
      throw ParseError(name, lineno, "expected a 'rows cols' header");
    }
    if (rows < 1 || cols < 1) {
      throw ParseError(name, lineno, "matrix dimensions must be positive");
    }
  }

  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    if (!std::getline(f, line)) {
      throw ParseError(name, lineno + 1,
                       "unexpected end of file, expected row " +
                           std::to_string(i + 1) + " of " +
                           std::to_string(rows));
    }
    ++lineno;
    std::istringstream rs(line);
    for (long j = 0; j < cols; ++j) {
      double v = 0.0;
      if (!(rs >> v)) {
        throw ParseError(name, lineno,
                         "expected " + std::to_string(cols) +
                             " numeric entries in this row");
      }
      if (!std::isfinite(v)) {
        throw ParseError(name, lineno, "non-finite entry");
      }
      m(i, j) = v;
    }
    std::string extra;
    if (rs >> extra) {
      throw ParseError(name, lineno, "extra data after " +
                                         std::to_string(cols) + " entries");
    }
  }
  while (std::getline(f, line)) {
    ++lineno;
    if (!blank(line)) {
      throw ParseError(name, lineno, "trailing content after the last row");
    }
  }
  return m;
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw InvalidInputError("write_matrix: matrix must be nonempty");
  }
  if (!m.allFinite()) {
    throw InvalidInputError("write_matrix: non-finite entries");
  }
  std::ofstream f(path);
  if (!f) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  f << m.rows() << ' ' << m.cols() << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      // 17 significant digits, enough to reproduce any double exactly.
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j > 0) f << ' ';
      f << buf;
    }
    f << '\n';
  }
  f.flush();
  if (!f) {
    throw IoError("failed while writing " + path.string());
  }
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) {
    throw IoError("cannot open " + path.string());
  }
  const std::string name = path.string();
  const std::filesystem::path base = path.parent_path();

  DatasetManifest manifest;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    line = rstrip(line);
    if (line.empty() || blank(line)) continue;

    const auto first = line.find_first_not_of(" \t");
    if (line[first] == '#') {
      // Comments are free-form except the optional frame-shape note.
      std::string body = line.substr(first + 1);
      const auto pos = body.find_first_not_of(" \t");
      if (pos != std::string::npos &&
          body.compare(pos, 8, "ambient:") == 0) {
        std::istringstream as(body.substr(pos + 8));
        int m = 0;
        int n = 0;
        std::string extra;
        if (!(as >> m >> n) || (as >> extra) || m < 1 || n < 1) {
          throw ParseError(name, lineno,
                           "malformed ambient note, expected '# ambient: m n'");
        }
        manifest.ambient = {m, n};
      }
      continue;
    }

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() < 2 || fields.size() > 3) {
      throw ParseError(name, lineno,
                       "expected 'path<TAB>id' or 'path<TAB>id<TAB>label'");
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw ParseError(name, lineno, "path and id must be nonempty");
    }

    ManifestEntry entry;
    std::filesystem::path p(fields[0]);
    entry.path = (p.is_absolute() ? p : base / p).lexically_normal();
    entry.id = fields[1];
    if (fields.size() == 3) {
      std::istringstream ls(fields[2]);
      int label = 0;
      std::string extra;
      if (!(ls >> label) || (ls >> extra)) {
        throw ParseError(name, lineno, "label must be an integer");
      }
      entry.label = label;
    }
    manifest.entries.push_back(std::move(entry));
  }

  if (manifest.entries.empty()) {
    throw ValidationError("manifest " + name + " has no entries");
  }

  std::set<std::string> paths;
  std::set<std::string> ids;
  for (const auto& e : manifest.entries) {
    if (!paths.insert(e.path.string()).second) {
      throw ValidationError("duplicate path in manifest: " + e.path.string());
    }
    if (!ids.insert(e.id).second) {
      throw ValidationError("duplicate id in manifest: " + e.id);
    }
    if (!std::filesystem::exists(e.path)) {
      throw ValidationError("manifest references a missing file: " +
                            e.path.string());
    }
  }

  const bool first_labeled = manifest.entries.front().label.has_value();
  std::set<int> labels;
  for (const auto& e : manifest.entries) {
    if (e.label.has_value() != first_labeled) {
      throw ValidationError(
          "labels must be present on every manifest entry or on none");
    }
    if (e.label) labels.insert(*e.label);
  }
  if (first_labeled) {
    int expected = 0;
    for (int l : labels) {
      if (l != expected++) {
        throw ValidationError(
            "labels must cover 0..K-1 without gaps, found label " +
            std::to_string(l));
      }
    }
  }
  return manifest;
}

void write_labels(const std::filesystem::path& path,
                  const std::vector<std::string>& ids,
                  const std::vector<int>& labels) {
  if (ids.size() != labels.size() || ids.empty()) {
    throw InvalidInputError("write_labels: need matching nonempty id and "
                            "label lists");
  }
  std::ofstream f(path);
  if (!f) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  f << "id,label\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    f << ids[i] << ',' << labels[i] << '\n';
  }
  f.flush();
  if (!f) {
    throw IoError("failed while writing " + path.string());
  }
}

std::vector<std::pair<std::string, int>> read_labels(
    const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) {
    throw IoError("cannot open " + path.string());
  }
  const std::string name = path.string();

  std::string line;
  if (!std::getline(f, line) || rstrip(line) != "id,label") {
    throw ParseError(name, 1, "expected 'id,label' header");
  }

  std::vector<std::pair<std::string, int>> out;
  std::set<std::string> seen;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    line = rstrip(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || comma == 0) {
      throw ParseError(name, lineno, "expected 'id,label'");
    }
    const std::string id = line.substr(0, comma);
    std::istringstream ls(line.substr(comma + 1));
    int label = 0;
    std::string extra;
    if (!(ls >> label) || (ls >> extra)) {
      throw ParseError(name, lineno, "label must be an integer");
    }
    if (!seen.insert(id).second) {
      throw ValidationError("duplicate id in " + name + ": " + id);
    }
    out.emplace_back(id, label);
  }
  if (out.empty()) {
    throw ValidationError("labels file " + name + " has no rows");
  }
  return out;
}

GrassmannPoint columns_to_point(const Matrix& gamma, int p, bool normalize) {
  if (gamma.rows() == 0 || gamma.cols() == 0) {
    throw InvalidInputError("columns_to_point: matrix must be nonempty");
  }
  if (!normalize) return from_basis(gamma, p);

  Matrix g = gamma;
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    const double mean = g.col(j).mean();
    g.col(j).array() -= mean;
    const double sd = std::sqrt(g.col(j).squaredNorm() / g.rows());
    if (sd <= 1e-12 * (std::abs(mean) + 1.0)) {
      throw InvalidInputError(
          "columns_to_point: column " + std::to_string(j) +
          " is constant and cannot be standardized");
    }
    g.col(j) /= sd;
  }
  return from_basis(g, p);
}

GrassmannPoint image_set_to_point(const ImageSet& set, int p, bool normalize) {
  if (set.frames.empty()) {
    throw InvalidInputError("image_set_to_point: image set has no frames");
  }
  const Eigen::Index m = set.frames.front().rows();
  const Eigen::Index n = set.frames.front().cols();
  if (m == 0 || n == 0) {
    throw InvalidInputError("image_set_to_point: frames must be nonempty");
  }
  Matrix gamma(m * n, static_cast<Eigen::Index>(set.frames.size()));
  for (std::size_t t = 0; t < set.frames.size(); ++t) {
    const Matrix& frame = set.frames[t];
    if (frame.rows() != m || frame.cols() != n) {
      throw InvalidInputError(
          "image_set_to_point: frames must share one shape");
    }
    gamma.col(static_cast<Eigen::Index>(t)) =
        Eigen::Map<const Vector>(frame.data(), m * n);
  }
  return columns_to_point(gamma, p, normalize);
}

SynthDataset generate_synthetic(const SynthSpec& spec) {
  if (spec.r < 1 || spec.per_cluster < 1) {
    throw InvalidInputError(
        "generate_synthetic: need at least one cluster and one member");
  }
  if (spec.p < 1 || spec.p >= spec.d) {
    throw InvalidInputError("generate_synthetic: need 1 <= p < d");
  }
  if (spec.sigma < 0.0) {
    throw InvalidInputError("generate_synthetic: sigma must be nonnegative");
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto fill_gaussian = [&](Matrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = gauss(rng);
    }
  };

  SynthDataset out;
  out.points.reserve(static_cast<std::size_t>(spec.r) * spec.per_cluster);
  out.labels.reserve(out.points.capacity());

  Matrix g(spec.d, spec.p);
  for (int cluster = 0; cluster < spec.r; ++cluster) {
    fill_gaussian(g);
    const GrassmannPoint center = from_basis(g, spec.p);

    for (int member = 0; member < spec.per_cluster; ++member) {
      fill_gaussian(g);
      // Project onto the horizontal space at the center and normalize, so
      // the step length below is an exact geodesic distance.
      Matrix h = g - center.x() * (center.x().transpose() * g);
      const double nrm = h.norm();
      const double length = std::abs(gauss(rng)) * spec.sigma;
      if (nrm > 0.0 && length > 0.0) {
        h *= length / nrm;
        out.points.push_back(exp_map(center, h));
      } else {
        out.points.push_back(center);
      }
      out.labels.push_back(cluster);
    }
  }
  return out;
}

}  // namespace lglrr
