#include "lglrr/solver.hpp"

#include "lglrr/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>
#include <utility>

namespace lglrr {

NeighborhoodGraph build_neighborhood(const std::vector<GrassmannPoint>& points,
                                     int c) {
  const int n = static_cast<int>(points.size());
  if (n < 2) {
    throw InvalidInputError("build_neighborhood: need at least 2 points");
  }
  if (c < 1) {
    throw InvalidInputError("build_neighborhood: c must be positive");
  }
  for (int i = 1; i < n; ++i) {
    if (points[i].d() != points[0].d() || points[i].p() != points[0].p()) {
      throw InvalidInputError(
          "build_neighborhood: points live on different manifolds");
    }
  }

  NeighborhoodGraph g;
  g.requested_c = c;
  g.effective_c = std::min(c, n - 1);
  g.clamped = c > n - 1;

  Matrix d2 = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = geodesic_distance_sq(points[i], points[j]);
      d2(i, j) = v;
      d2(j, i) = v;
    }
  }

  g.neighbors.resize(n);
  std::vector<int> order(n - 1);
  for (int i = 0; i < n; ++i) {
    int t = 0;
    for (int j = 0; j < n; ++j) {
      if (j != i) order[t++] = j;
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (d2(i, a) != d2(i, b)) return d2(i, a) < d2(i, b);
      return a < b;
    });
    g.neighbors[i].assign(order.begin(), order.begin() + g.effective_c);
  }

  g.free_mask.assign(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j : g.neighbors[i]) {
      g.free_mask[static_cast<std::size_t>(i) * n + j] = 1;
    }
  }
  return g;
}

double BTensor::max_block_norm() const {
  double m = 0.0;
  for (double v : block_norms) m = std::max(m, v);
  return m;
}

double BTensor::entry(const NeighborhoodGraph& graph, int i, int j,
                      int k) const {
  const auto& nb = graph.neighbors.at(i);
  const auto jt = std::find(nb.begin(), nb.end(), j);
  const auto kt = std::find(nb.begin(), nb.end(), k);
  if (jt == nb.end() || kt == nb.end()) return 0.0;
  return blocks[i](jt - nb.begin(), kt - nb.begin());
}

BTensor build_btensor(const std::vector<GrassmannPoint>& points,
                      const NeighborhoodGraph& graph, int threads) {
  const int n = static_cast<int>(points.size());
  if (graph.size() != n) {
    throw InvalidInputError("build_btensor: graph was built for a different "
                            "number of points");
  }
  if (threads < 1) {
    throw InvalidInputError("build_btensor: threads must be positive");
  }

  BTensor b;
  b.blocks.resize(n);
  b.block_norms.resize(n, 0.0);

  // Failures are collected per anchor and the smallest index wins, so the
  // reported pair does not depend on thread scheduling.
  std::vector<std::exception_ptr> failures(n);

  auto worker = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      try {
        const auto& nb = graph.neighbors[i];
        const int m = static_cast<int>(nb.size());
        const int dp = points[i].d() * points[i].p();
        Matrix logs(dp, m);  // one flattened log per neighbor
        for (int t = 0; t < m; ++t) {
          TangentVector h = [&] {
            try {
              return log_map(points[i], points[nb[t]]);
            } catch (const CutLocusError& e) {
              throw PairAtCutLocusError(i, nb[t], e.what());
            }
          }();
          logs.col(t) = Eigen::Map<const Vector>(h.h().data(), dp);
        }
        Matrix block = Matrix::Zero(m, m);
        block.selfadjointView<Eigen::Lower>().rankUpdate(logs.transpose());
        block = block.selfadjointView<Eigen::Lower>();  // mirror exactly
        b.blocks[i] = std::move(block);
        if (m > 0) {
          Eigen::SelfAdjointEigenSolver<Matrix> es(b.blocks[i],
                                                   Eigen::EigenvaluesOnly);
          b.block_norms[i] = es.eigenvalues().cwiseAbs().maxCoeff();
        }
      } catch (...) {
        failures[i] = std::current_exception();
        return;
      }
    }
  };

  const int workers = std::min(threads, n);
  if (workers <= 1) {
    worker(0, n);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(n, begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  for (int i = 0; i < n; ++i) {
    if (failures[i]) std::rethrow_exception(failures[i]);
  }
  return b;
}

Matrix gradient_f(const Matrix& w, const Vector& y1, const Matrix& y2,
                  double beta, const BTensor& b,
                  const NeighborhoodGraph& graph) {
  const int n = graph.size();
  if (w.rows() != n || w.cols() != n || y2.rows() != n || y2.cols() != n ||
      y1.size() != n || b.size() != n) {
    throw InvalidInputError("gradient_f: dimension mismatch");
  }
  if (beta <= 0.0) {
    throw InvalidInputError("gradient_f: beta must be positive");
  }

  Matrix g = Matrix::Zero(n, n);

  // Quadratic term, row by row on the neighbor support.
  for (int i = 0; i < n; ++i) {
    const auto& nb = graph.neighbors[i];
    const int m = static_cast<int>(nb.size());
    if (m == 0) continue;
    Vector wi(m);
    for (int t = 0; t < m; ++t) wi(t) = w(i, nb[t]);
    const Vector gi = b.blocks[i] * wi;
    for (int t = 0; t < m; ++t) g(i, nb[t]) += gi(t);
  }

  // Affine row-sum term: (Y1 + beta (W 1 - 1)) broadcast across each row.
  Vector r = w.rowwise().sum();
  r.array() -= 1.0;
  g.colwise() += (y1 + beta * r).eval();

  // Support constraint term, only on Omega.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (graph.in_omega(i, j)) g(i, j) += y2(i, j) + beta * w(i, j);
    }
  }
  return g;
}

Matrix svt(const Matrix& m, double tau) {
  if (tau < 0.0) {
    throw InvalidInputError("svt: threshold must be nonnegative");
  }
  const ThinSvd svd = thin_svd(m);
  const Vector shrunk = (svd.s.array() - tau).max(0.0);
  return svd.u * shrunk.asDiagonal() * svd.v.transpose();
}

namespace {

void validate_config(const SolverConfig& c) {
  std::ostringstream os;
  if (c.lambda < 0.0) {
    os << "lambda must be nonnegative";
  } else if (c.c < 1) {
    os << "c must be positive";
  } else if (c.rho0 < 1.0) {
    os << "rho0 must be at least 1";
  } else if (c.beta0 <= 0.0) {
    os << "beta0 must be positive";
  } else if (c.beta_max < c.beta0) {
    os << "beta_max must be at least beta0";
  } else if (c.eps1 <= 0.0 || c.eps2 <= 0.0) {
    os << "tolerances must be positive";
  } else if (c.max_iters < 1) {
    os << "max_iters must be positive";
  } else if (c.eta_w_override && *c.eta_w_override <= 0.0) {
    os << "eta_w_override must be positive";
  } else {
    return;
  }
  throw InvalidInputError("solve: " + os.str());
}

}  // namespace

SolverState solve(const NeighborhoodGraph& graph, const BTensor& b,
                  const SolverConfig& config) {
  validate_config(config);
  const int n = graph.size();
  if (n < 2 || b.size() != n) {
    throw InvalidInputError("solve: graph and B tensor must cover the same "
                            "N >= 2 points");
  }

  const double max_norm = b.max_block_norm();
  const double eta = config.eta_w_override
                         ? *config.eta_w_override
                         : max_norm * max_norm + n + 1;

  SolverState st;
  st.eta_w = eta;
  st.c_clamped = graph.clamped;
  st.trace.reserve(config.max_iters);

  Matrix w = Matrix::Zero(n, n);
  Matrix y2 = Matrix::Zero(n, n);
  Vector y1 = Vector::Zero(n);
  double beta = config.beta0;

  for (int k = 1; k <= config.max_iters; ++k) {
    const Matrix g = gradient_f(w, y1, y2, beta, b, graph);
    const double step = 1.0 / (eta * beta);
    Matrix w_next = svt(w - step * g, config.lambda * step);

    const double primal = beta * (w_next - w).norm();

    Vector r = w_next.rowwise().sum();
    r.array() -= 1.0;
    const double affine = r.norm();

    y1 += beta * r;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (graph.in_omega(i, j)) y2(i, j) += beta * w_next(i, j);
      }
    }

    st.trace.push_back({k, beta, primal, affine});

    // The penalty only grows on iterations where the scaled step has
    // stalled below eps1; it never shrinks and never exceeds beta_max.
    const double rho = primal <= config.eps1 ? config.rho0 : 1.0;
    beta = std::min(config.beta_max, rho * beta);

    w.swap(w_next);
    if (primal <= config.eps1 && affine <= config.eps2) {
      st.converged = true;
      break;
    }
  }
  st.iterations = static_cast<int>(st.trace.size());

  // Hard projection: the support constraint and the row-sum constraint are
  // enforced exactly on the way out.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (graph.in_omega(i, j)) w(i, j) = 0.0;
    }
  }
  for (int i = 0; i < n; ++i) {
    const double s = w.row(i).sum();
    if (s != 0.0) w.row(i) /= s;
  }
  st.w = std::move(w);
  return st;
}

SolverState solve(const std::vector<GrassmannPoint>& points,
                  const SolverConfig& config) {
  const NeighborhoodGraph graph = build_neighborhood(points, config.c);
  const BTensor b = build_btensor(points, graph);
  return solve(graph, b, config);
}

}  // namespace lglrr
