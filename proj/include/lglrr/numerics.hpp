#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace lglrr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thin SVD `a = u * s.asDiagonal() * v.transpose()` with singular values in
/// descending order and r = min(rows, cols) columns in u and v. The sign of
/// each u column is fixed so that its first nonzero entry is positive, with
/// the paired v column flipped to match; equal inputs therefore decompose to
/// bitwise-equal factors across calls.
struct ThinSvd {
  Matrix u;
  Vector s;
  Matrix v;
};

ThinSvd thin_svd(const Matrix& a);

/// Eigendecomposition of a symmetric matrix, eigenvalues ascending and
/// eigenvectors in matching columns (signs fixed as in thin_svd). Asymmetry
/// beyond 1e-8 relative to the largest entry is rejected.
struct SymEig {
  Vector values;
  Matrix vectors;
};

SymEig sym_eig(const Matrix& a);

/// Inverse of a small square matrix computed from its SVD. Throws
/// SingularMatrixError when smallest_sv < 1e-12 * largest_sv.
Matrix small_inverse(const Matrix& a);

struct KMeansResult {
  std::vector<int> labels;  // one per row of the input, values in [0, k)
  Matrix centroids;         // k x dim
  double wcss = 0.0;        // within-cluster sum of squared distances
};

/// Seeded k-means over the rows of `points`: k-means++ initialization, Lloyd
/// iterations, best of `restarts` runs by WCSS. Ties in the assignment step
/// go to the lowest centroid index, and a cluster that empties out is
/// reseeded with the point farthest from its current centroid, so the result
/// is fully determined by (points, k, restarts, seed).
KMeansResult kmeans(const Matrix& points, int k, int restarts = 10,
                    std::uint64_t seed = 0);

}  // namespace lglrr
