#pragma once

#include "lglrr/numerics.hpp"

namespace lglrr {

/// A point on the Grassmann manifold G(p, d): the p-dimensional subspace of
/// R^d spanned by the columns of an orthonormal d x p representative. The
/// representative is validated on construction (||X^T X - I||_inf <= 1e-10);
/// use from_basis to orthonormalize an arbitrary spanning set first.
class GrassmannPoint {
 public:
  explicit GrassmannPoint(Matrix x);

  const Matrix& x() const { return x_; }
  int d() const { return static_cast<int>(x_.rows()); }
  int p() const { return static_cast<int>(x_.cols()); }

 private:
  Matrix x_;
};

/// The subspace spanned by the first p left singular vectors of `a`.
/// Throws RankDeficientError when the numerical rank of `a` is below p
/// (p-th singular value under 1e-12 times the largest).
GrassmannPoint from_basis(const Matrix& a, int p);

/// A tangent vector at `base`, stored as a horizontal d x p matrix:
/// base.x()^T * h vanishes to 1e-8. Carries its base point by value so it
/// stays meaningful independent of the point it was derived from.
class TangentVector {
 public:
  TangentVector(GrassmannPoint base, Matrix h);

  const GrassmannPoint& base() const { return base_; }
  const Matrix& h() const { return h_; }
  double norm() const { return h_.norm(); }

 private:
  GrassmannPoint base_;
  Matrix h_;
};

/// trace(h1^T h2) under the canonical metric; both vectors must sit at the
/// same base point.
double tangent_inner(const TangentVector& h1, const TangentVector& h2);

/// Squared geodesic distance: the sum of squared principal angles
/// acos(s_i), where s_i are the singular values of X^T Y clamped to [0, 1].
double geodesic_distance_sq(const GrassmannPoint& x, const GrassmannPoint& y);

/// Riemannian logarithm of y at x: with U S V^T the thin SVD of
/// (Y - X X^T Y)(X^T Y)^{-1}, returns H = U atan(S) V^T. Throws
/// CutLocusError when X^T Y is numerically singular (smallest singular
/// value below 1e-10), i.e. when y is at or near the cut locus of x.
TangentVector log_map(const GrassmannPoint& x, const GrassmannPoint& y);

/// Endpoint of the geodesic leaving x with velocity h, evaluated at t = 1:
/// with U S V^T the thin SVD of H, Y = X V cos(S) V^T + U sin(S) V^T,
/// re-orthonormalized. The tangent vector's base must equal x.
GrassmannPoint exp_map(const GrassmannPoint& x, const TangentVector& h);

/// Same map for a raw horizontal direction (X^T h vanishing to 1e-8).
GrassmannPoint exp_map(const GrassmannPoint& x, const Matrix& h);

}  // namespace lglrr
