#pragma once

#include "lglrr/grassmann.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lglrr {

/// One image set: frames of identical shape plus an identifier and an
/// optional ground-truth label.
struct ImageSet {
  std::vector<Matrix> frames;
  std::string id;
  std::optional<int> label;
};

struct ManifestEntry {
  std::filesystem::path path;  // resolved against the manifest's directory
  std::string id;
  std::optional<int> label;
};

/// Parsed dataset manifest. When labels are present they are present on
/// every entry and cover 0..K-1 without gaps.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::optional<std::pair<int, int>> ambient;  // frame shape, when noted

  bool labeled() const {
    return !entries.empty() && entries.front().label.has_value();
  }
};

/// Text matrix format: a "rows cols" header line, then one space-separated
/// row per line. Writing uses 17 significant digits, so a write/read round
/// trip reproduces every double exactly. Malformed content raises ParseError
/// carrying the 1-based line number.
Matrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Matrix& m);

/// Tab-separated manifest, one "path<TAB>id" or "path<TAB>id<TAB>label"
/// entry per line; '#' starts a comment line. A comment of the form
/// "# ambient: m n" records the frame shape. Relative paths resolve against
/// the manifest's directory and must exist. Duplicate paths or ids, labels
/// on only some entries, or a label set with gaps raise ValidationError.
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Labels CSV with an "id,label" header, one "id,label" row per entry.
void write_labels(const std::filesystem::path& path,
                  const std::vector<std::string>& ids,
                  const std::vector<int>& labels);
std::vector<std::pair<std::string, int>> read_labels(
    const std::filesystem::path& path);

/// Orthonormalizes the span of a stacked feature matrix (one column per
/// observation): from_basis(gamma, p). With normalize set, each column is
/// standardized to mean 0 and unit variance first; constant columns are
/// rejected. This is the ingestion path for matrix files whose columns are
/// vectorized frames.
GrassmannPoint columns_to_point(const Matrix& gamma, int p, bool normalize);

/// Maps an image set to the subspace spanned by its vectorized frames
/// (column-major flattening, one column per frame), optionally
/// standardizing each frame to mean 0 and unit variance first.
GrassmannPoint image_set_to_point(const ImageSet& set, int p, bool normalize);

struct SynthSpec {
  int r = 4;            // clusters
  int per_cluster = 30;
  int d = 50;           // ambient dimension
  int p = 5;            // subspace dimension
  double sigma = 0.05;  // scale of the half-normal geodesic step length
  std::uint64_t seed = 0;
};

struct SynthDataset {
  std::vector<GrassmannPoint> points;
  std::vector<int> labels;  // cluster index per point, grouped by cluster
};

/// Draws r cluster centers (orthonormalized Gaussian bases) and, for each
/// member, walks from its center along a random unit-norm horizontal
/// direction for a length |N(0, sigma)|. sigma = 0 reproduces each center
/// exactly. Bit-identical for a fixed seed on a given platform.
SynthDataset generate_synthetic(const SynthSpec& spec);

}  // namespace lglrr
