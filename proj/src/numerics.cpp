#include "lglrr/numerics.hpp"

#include "lglrr/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace lglrr {

namespace {

void require_finite(const Matrix& a, const char* who) {
  if (!a.allFinite()) {
    throw InvalidInputError(std::string(who) + ": non-finite entries");
  }
}

// Flips the sign of each column whose first non-negligible entry is
// negative. "First nonzero" is read relative to the column's own magnitude
// so that rounding noise in entries that are conceptually zero cannot decide
// the sign. `coupled`, when given, absorbs the same flip so a two-factor
// decomposition stays valid.
void fix_column_signs(Matrix& m, Matrix* coupled) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double colmax = m.col(j).cwiseAbs().maxCoeff();
    if (colmax == 0.0) continue;
    const double tol = 1e-12 * colmax;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double x = m(i, j);
      if (std::abs(x) > tol) {
        if (x < 0.0) {
          m.col(j) = -m.col(j);
          if (coupled != nullptr) coupled->col(j) = -coupled->col(j);
        }
        break;
      }
    }
  }
}

}  // namespace

ThinSvd thin_svd(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw InvalidInputError("thin_svd: matrix must be nonempty");
  }
  require_finite(a, "thin_svd");

  ThinSvd out;
  // Jacobi is the more accurate choice and cheap for small inputs; the
  // divide-and-conquer kernel takes over once either side grows.
  if (std::max(a.rows(), a.cols()) <= 16) {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = svd.matrixU();
    out.s = svd.singularValues();
    out.v = svd.matrixV();
  } else {
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = svd.matrixU();
    out.s = svd.singularValues();
    out.v = svd.matrixV();
  }
  fix_column_signs(out.u, &out.v);
  return out;
}

SymEig sym_eig(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw InvalidInputError("sym_eig: matrix must be square and nonempty");
  }
  require_finite(a, "sym_eig");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw InvalidInputError("sym_eig: matrix is not symmetric within 1e-8");
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(((a + a.transpose()) * 0.5).eval());
  if (es.info() != Eigen::Success) {
    throw Error("sym_eig: eigendecomposition failed to converge");
  }
  SymEig out{es.eigenvalues(), es.eigenvectors()};
  fix_column_signs(out.vectors, nullptr);
  return out;
}

Matrix small_inverse(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw InvalidInputError("small_inverse: matrix must be square");
  }
  require_finite(a, "small_inverse");

  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double largest = s(0);
  const double smallest = s(s.size() - 1);
  if (largest == 0.0 || smallest < 1e-12 * largest) {
    throw SingularMatrixError(
        "small_inverse: numerically singular (sv ratio " +
        std::to_string(largest == 0.0 ? 0.0 : smallest / largest) + ")");
  }
  return svd.matrixV() * s.cwiseInverse().asDiagonal() *
         svd.matrixU().transpose();
}

namespace {

Vector squared_distances_to(const Matrix& points, const Eigen::RowVectorXd& c) {
  return (points.rowwise() - c).rowwise().squaredNorm();
}

KMeansResult kmeans_once(const Matrix& points, int k, std::mt19937_64& rng) {
  const int n = static_cast<int>(points.rows());
  const int dim = static_cast<int>(points.cols());

  // k-means++ seeding: first center uniform, the rest proportional to the
  // squared distance from the nearest center already chosen.
  std::vector<int> center_idx;
  center_idx.reserve(k);
  std::vector<char> chosen(n, 0);
  {
    std::uniform_int_distribution<int> uni(0, n - 1);
    const int first = uni(rng);
    center_idx.push_back(first);
    chosen[first] = 1;
  }
  Vector d2 = squared_distances_to(points, points.row(center_idx[0]));
  while (static_cast<int>(center_idx.size()) < k) {
    const double total = d2.sum();
    int pick = -1;
    if (total > 0.0) {
      std::uniform_real_distribution<double> uni(0.0, total);
      const double x = uni(rng);
      double cum = 0.0;
      for (int i = 0; i < n; ++i) {
        if (d2(i) <= 0.0) continue;
        cum += d2(i);
        if (x <= cum) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {  // rounding pushed x past the last positive mass
        for (int i = n - 1; i >= 0; --i) {
          if (d2(i) > 0.0) {
            pick = i;
            break;
          }
        }
      }
    }
    if (pick < 0) {  // every remaining point coincides with a center
      for (int i = 0; i < n; ++i) {
        if (!chosen[i]) {
          pick = i;
          break;
        }
      }
    }
    center_idx.push_back(pick);
    chosen[pick] = 1;
    d2 = d2.cwiseMin(squared_distances_to(points, points.row(pick)));
  }

  Matrix centroids(k, dim);
  for (int c = 0; c < k; ++c) centroids.row(c) = points.row(center_idx[c]);

  std::vector<int> labels(n, 0);
  std::vector<int> prev(n, -1);
  std::vector<int> counts(k, 0);
  for (int iter = 0; iter < 100; ++iter) {
    // Assignment; ties go to the lowest centroid index.
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (points.row(i) - centroids.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (points.row(i) - centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      labels[i] = best;
    }

    // Reseed any cluster that emptied with the point farthest from its own
    // centroid, one cluster at a time so the rule stays deterministic.
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) ++counts[labels[i]];
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      int farthest = -1;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        if (counts[labels[i]] <= 1) continue;  // don't strand another cluster
        const double d =
            (points.row(i) - centroids.row(labels[i])).squaredNorm();
        if (d > far_d) {
          far_d = d;
          farthest = i;
        }
      }
      if (farthest < 0) break;  // fewer distinct points than clusters
      --counts[labels[farthest]];
      labels[farthest] = c;
      ++counts[c];
    }

    if (labels == prev) break;
    prev = labels;

    centroids.setZero();
    for (int i = 0; i < n; ++i) centroids.row(labels[i]) += points.row(i);
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) centroids.row(c) /= counts[c];
    }
  }

  KMeansResult out;
  out.labels = std::move(labels);
  out.centroids = std::move(centroids);
  out.wcss = 0.0;
  for (int i = 0; i < n; ++i) {
    out.wcss += (points.row(i) - out.centroids.row(out.labels[i])).squaredNorm();
  }
  return out;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, int restarts,
                    std::uint64_t seed) {
  const int n = static_cast<int>(points.rows());
  if (n == 0 || points.cols() == 0) {
    throw InvalidInputError("kmeans: need a nonempty point matrix");
  }
  require_finite(points, "kmeans");
  if (k < 1 || k > n) {
    throw InvalidInputError("kmeans: need 1 <= k <= number of points");
  }
  if (restarts < 1) {
    throw InvalidInputError("kmeans: restarts must be positive");
  }

  std::mt19937_64 master(seed);
  KMeansResult best;
  best.wcss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(master());
    KMeansResult cur = kmeans_once(points, k, rng);
    if (cur.wcss < best.wcss) best = std::move(cur);
  }
  return best;
}

}  // namespace lglrr
