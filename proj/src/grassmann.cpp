#include "lglrr/grassmann.hpp"

#include "lglrr/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lglrr {

namespace {

// Orthonormality slack allowed in a stored representative.
constexpr double kOrthoTol = 1e-10;
// Horizontality slack allowed in a tangent representative.
constexpr double kHorizontalTol = 1e-8;
// Smallest singular value of X^T Y for which the logarithm is still taken.
constexpr double kCutLocusTol = 1e-10;

double ortho_defect(const Matrix& x) {
  Matrix gram = x.transpose() * x;
  gram.diagonal().array() -= 1.0;
  return gram.cwiseAbs().maxCoeff();
}

void check_same_dims(const GrassmannPoint& x, const GrassmannPoint& y,
                     const char* who) {
  if (x.d() != y.d() || x.p() != y.p()) {
    std::ostringstream os;
    os << who << ": points live on different manifolds, G(" << x.p() << ", "
       << x.d() << ") vs G(" << y.p() << ", " << y.d() << ")";
    throw InvalidInputError(os.str());
  }
}

}  // namespace

GrassmannPoint::GrassmannPoint(Matrix x) : x_(std::move(x)) {
  if (x_.rows() == 0 || x_.cols() == 0 || x_.rows() < x_.cols()) {
    throw InvalidInputError(
        "GrassmannPoint: representative must be d x p with d >= p >= 1");
  }
  if (!x_.allFinite()) {
    throw InvalidInputError("GrassmannPoint: non-finite entries");
  }
  const double defect = ortho_defect(x_);
  if (defect > kOrthoTol) {
    std::ostringstream os;
    os << "GrassmannPoint: representative is not orthonormal, ||X^T X - I|| = "
       << defect << "; use from_basis to orthonormalize";
    throw InvalidInputError(os.str());
  }
}

GrassmannPoint from_basis(const Matrix& a, int p) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw InvalidInputError("from_basis: matrix must be nonempty");
  }
  if (p < 1 || p > std::min(a.rows(), a.cols())) {
    throw InvalidInputError("from_basis: need 1 <= p <= min(rows, cols)");
  }
  const ThinSvd svd = thin_svd(a);
  if (svd.s(0) == 0.0 || svd.s(p - 1) < 1e-12 * svd.s(0)) {
    std::ostringstream os;
    os << "from_basis: numerical rank below " << p << " (s_" << p << "/s_1 = "
       << (svd.s(0) == 0.0 ? 0.0 : svd.s(p - 1) / svd.s(0)) << ")";
    throw RankDeficientError(os.str());
  }
  return GrassmannPoint(svd.u.leftCols(p));
}

TangentVector::TangentVector(GrassmannPoint base, Matrix h)
    : base_(std::move(base)), h_(std::move(h)) {
  if (h_.rows() != base_.d() || h_.cols() != base_.p()) {
    throw InvalidInputError("TangentVector: direction must match the base's "
                            "d x p representative");
  }
  if (!h_.allFinite()) {
    throw InvalidInputError("TangentVector: non-finite entries");
  }
  const double defect = (base_.x().transpose() * h_).cwiseAbs().maxCoeff();
  if (defect > kHorizontalTol) {
    std::ostringstream os;
    os << "TangentVector: direction is not horizontal, ||X^T H|| = " << defect;
    throw InvalidInputError(os.str());
  }
}

double tangent_inner(const TangentVector& h1, const TangentVector& h2) {
  check_same_dims(h1.base(), h2.base(), "tangent_inner");
  if ((h1.base().x() - h2.base().x()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidInputError(
        "tangent_inner: vectors are anchored at different base points");
  }
  return h1.h().cwiseProduct(h2.h()).sum();
}

double geodesic_distance_sq(const GrassmannPoint& x, const GrassmannPoint& y) {
  check_same_dims(x, y, "geodesic_distance_sq");
  Eigen::JacobiSVD<Matrix> svd(x.x().transpose() * y.x());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    const double s = std::clamp(svd.singularValues()(i), 0.0, 1.0);
    const double theta = std::acos(s);
    acc += theta * theta;
  }
  return acc;
}

TangentVector log_map(const GrassmannPoint& x, const GrassmannPoint& y) {
  check_same_dims(x, y, "log_map");
  const Matrix xty = x.x().transpose() * y.x();

  Eigen::JacobiSVD<Matrix> gate(xty);
  const double smallest = gate.singularValues()(x.p() - 1);
  if (smallest < kCutLocusTol) {
    std::ostringstream os;
    os << "log_map: target at the cut locus of the base point (smallest "
          "singular value of X^T Y = "
       << smallest << ")";
    throw CutLocusError(os.str());
  }

  const Matrix m = (y.x() - x.x() * xty) * small_inverse(xty);
  const ThinSvd svd = thin_svd(m);
  const Matrix h = svd.u * svd.s.array().atan().matrix().asDiagonal() *
                   svd.v.transpose();
  return TangentVector(x, h);
}

GrassmannPoint exp_map(const GrassmannPoint& x, const TangentVector& h) {
  if (h.base().d() != x.d() || h.base().p() != x.p() ||
      (h.base().x() - x.x()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidInputError(
        "exp_map: tangent vector is anchored at a different base point");
  }
  return exp_map(x, h.h());
}

GrassmannPoint exp_map(const GrassmannPoint& x, const Matrix& h) {
  if (h.rows() != x.d() || h.cols() != x.p()) {
    throw InvalidInputError("exp_map: direction must be d x p");
  }
  if (!h.allFinite()) {
    throw InvalidInputError("exp_map: non-finite entries");
  }
  if ((x.x().transpose() * h).cwiseAbs().maxCoeff() > kHorizontalTol) {
    throw InvalidInputError("exp_map: direction is not horizontal at x");
  }
  // Zero velocity reproduces the base point exactly rather than through a
  // rounding trip of cos(0)/sin(0) products.
  if (h.cwiseAbs().maxCoeff() == 0.0) return x;

  const ThinSvd svd = thin_svd(h);
  const Matrix vt = svd.v.transpose();
  const Matrix y =
      x.x() * svd.v * svd.s.array().cos().matrix().asDiagonal() * vt +
      svd.u * svd.s.array().sin().matrix().asDiagonal() * vt;
  return from_basis(y, x.p());
}

}  // namespace lglrr
