#include "lglrr/spectral.hpp"

#include "lglrr/errors.hpp"

#include <cmath>

namespace lglrr {

Matrix affinity_from_w(const Matrix& w) {
  if (w.rows() != w.cols() || w.rows() == 0) {
    throw InvalidInputError("affinity_from_w: matrix must be square");
  }
  if (!w.allFinite()) {
    throw InvalidInputError("affinity_from_w: non-finite entries");
  }
  Matrix a = 0.5 * (w.cwiseAbs() + w.cwiseAbs().transpose());
  a.diagonal().setZero();
  return a;
}

std::vector<int> ncut(const Matrix& affinity, int r, std::uint64_t seed) {
  const int n = static_cast<int>(affinity.rows());
  if (affinity.cols() != n || n == 0) {
    throw InvalidInputError("ncut: affinity must be square");
  }
  if (!affinity.allFinite()) {
    throw InvalidInputError("ncut: non-finite entries");
  }
  const double scale = std::max(1.0, affinity.cwiseAbs().maxCoeff());
  if ((affinity - affinity.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw InvalidInputError("ncut: affinity must be symmetric");
  }
  if (affinity.minCoeff() < 0.0) {
    throw InvalidInputError("ncut: affinity must be nonnegative");
  }
  if (affinity.diagonal().cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidInputError("ncut: affinity must have a zero diagonal");
  }
  if (r < 1 || r > n) {
    throw InvalidInputError("ncut: need 1 <= r <= number of vertices");
  }

  // Symmetric normalized Laplacian; the degree floor keeps isolated
  // vertices finite without visibly perturbing connected ones.
  Vector degrees = affinity.rowwise().sum();
  degrees.array() += 1e-12;
  const Vector dis = degrees.array().rsqrt();
  Matrix l = Matrix::Identity(n, n) -
             (dis.asDiagonal() * affinity * dis.asDiagonal());
  l = (0.5 * (l + l.transpose())).eval();

  const SymEig es = sym_eig(l);
  Matrix embedding = es.vectors.leftCols(r);
  for (int i = 0; i < n; ++i) {
    const double nrm = embedding.row(i).norm();
    if (nrm > 1e-12) {
      embedding.row(i) /= nrm;
    } else {
      embedding.row(i).setZero();
    }
  }

  return kmeans(embedding, r, 10, seed).labels;
}

}  // namespace lglrr
