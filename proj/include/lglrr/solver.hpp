#pragma once

#include "lglrr/grassmann.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace lglrr {

/// K-nearest-neighbor structure over a dataset of Grassmann points.
/// neighbors[i] lists the indices closest to point i by geodesic distance,
/// ascending, ties broken by ascending index; i itself is excluded. The
/// complement of this support (plus the diagonal) is the constraint set
/// Omega on which representation coefficients are forced to zero.
struct NeighborhoodGraph {
  std::vector<std::vector<int>> neighbors;
  int requested_c = 0;
  int effective_c = 0;   // min(requested_c, N - 1)
  bool clamped = false;  // requested_c exceeded N - 1 and was clamped

  int size() const { return static_cast<int>(neighbors.size()); }

  /// True when (i, j) lies outside the free support: j == i or j is not a
  /// neighbor of i.
  bool in_omega(int i, int j) const {
    return !free_mask[static_cast<std::size_t>(i) * neighbors.size() + j];
  }

  std::vector<char> free_mask;  // row-major N x N, 1 on free entries
};

NeighborhoodGraph build_neighborhood(const std::vector<GrassmannPoint>& points,
                                     int c);

/// Per-anchor Gram matrices of log-mapped neighbors:
///   B_i[a, b] = < Log_{X_i}(X_{n_a}), Log_{X_i}(X_{n_b}) >
/// over the neighbor list n of point i. Entries outside the support are zero
/// by definition and never stored; blocks[i] is indexed in neighbors[i]
/// order. Each block is symmetric positive semidefinite with squared
/// anchor-to-neighbor geodesic distances on its diagonal.
struct BTensor {
  std::vector<Matrix> blocks;
  std::vector<double> block_norms;  // spectral norm of each block

  int size() const { return static_cast<int>(blocks.size()); }
  double max_block_norm() const;

  /// Dense accessor for tests: the coefficient coupling w(i, j) and w(i, k),
  /// zero when j or k is outside neighbors[i].
  double entry(const NeighborhoodGraph& graph, int i, int j, int k) const;
};

/// Builds the tensor, computing each Log_{X_i}(X_j) once per ordered pair
/// with j in neighbors[i]. A CutLocusError for pair (i, j) is rethrown as
/// PairAtCutLocusError with the indices attached. `threads` > 1 splits the
/// anchors across that many worker threads (the result does not depend on
/// the thread count).
BTensor build_btensor(const std::vector<GrassmannPoint>& points,
                      const NeighborhoodGraph& graph, int threads = 1);

struct SolverConfig {
  double lambda = 1.0;   // nuclear norm weight
  int c = 35;            // neighbors per point
  double rho0 = 1.9;     // penalty growth factor on stalled iterations
  double beta0 = 0.1;    // initial penalty
  double beta_max = 1e6;
  double eps1 = 1e-4;    // tolerance on beta_k * ||W_{k+1} - W_k||_F
  double eps2 = 1e-4;    // tolerance on ||W 1 - 1||_2
  int max_iters = 500;
  /// Replaces the default linearization constant
  /// eta_W = max_i ||B_i||^2 + N + 1 when set. Must be positive.
  std::optional<double> eta_w_override;
};

struct TraceRow {
  int iter;                // 1-based
  double beta;             // penalty used by this iteration
  double primal_change;    // beta * ||W_{k+1} - W_k||_F
  double affine_residual;  // ||W_{k+1} 1 - 1||_2
};

struct SolverState {
  Matrix w;  // N x N coefficients, Omega entries zeroed, rows summing to 1
  bool converged = false;
  int iterations = 0;
  double eta_w = 0.0;
  std::vector<TraceRow> trace;  // one row per iteration actually run
  bool c_clamped = false;
};

/// Gradient of the smooth part of the augmented objective at W:
///   rows of W against their B block, plus Y1 1^T + beta (W 1 - 1) 1^T,
///   plus (Y2 + beta W) restricted to Omega.
/// Exposed for testing against finite differences.
Matrix gradient_f(const Matrix& w, const Vector& y1, const Matrix& y2,
                  double beta, const BTensor& b,
                  const NeighborhoodGraph& graph);

/// Singular value thresholding: U max(S - tau, 0) V^T.
Matrix svt(const Matrix& m, double tau);

/// Runs the linearized ADM iteration on a prebuilt graph and B tensor
/// (the form parameter sweeps reuse). Starts from W = Y1 = Y2 = 0; each
/// iteration takes one SVT step on the linearized objective, updates the
/// multipliers with the new iterate, then grows beta by rho0 only when the
/// scaled step beta ||dW|| has dropped below eps1. Stops when both residuals
/// are within tolerance or after max_iters iterations; hitting the cap is
/// reported via converged = false, not an error. The returned W has Omega
/// entries hard-zeroed and rows renormalized to unit sum.
SolverState solve(const NeighborhoodGraph& graph, const BTensor& b,
                  const SolverConfig& config);

/// Convenience form: builds the neighborhood and B tensor from the points.
SolverState solve(const std::vector<GrassmannPoint>& points,
                  const SolverConfig& config);

}  // namespace lglrr
