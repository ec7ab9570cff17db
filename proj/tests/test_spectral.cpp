#include "lglrr/spectral.hpp"

#include "lglrr/errors.hpp"
#include "lglrr/eval.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

using lglrr::Matrix;

namespace {

// Block-constant affinity with the given block sizes; `within` on
// within-block edges, `cross` elsewhere, zero diagonal.
Matrix block_affinity(const std::vector<int>& sizes, double within,
                      double cross) {
  int n = 0;
  for (int s : sizes) n += s;
  Matrix a = Matrix::Constant(n, n, cross);
  int start = 0;
  for (int s : sizes) {
    a.block(start, start, s, s).setConstant(within);
    start += s;
  }
  a.diagonal().setZero();
  return a;
}

std::vector<int> block_labels(const std::vector<int>& sizes) {
  std::vector<int> labels;
  for (int c = 0; c < static_cast<int>(sizes.size()); ++c) {
    labels.insert(labels.end(), sizes[c], c);
  }
  return labels;
}

}  // namespace

TEST_SUITE_BEGIN("spectral");

TEST_CASE("affinity_from_w symmetrizes and zeroes the diagonal") {
  Matrix w(2, 2);
  w << 7.0, -2.0, 4.0, 7.0;
  const Matrix a = lglrr::affinity_from_w(w);
  CHECK(a(0, 0) == 0.0);
  CHECK(a(1, 1) == 0.0);
  CHECK(a(0, 1) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(a(1, 0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS(lglrr::affinity_from_w(Matrix::Ones(2, 3)),
                  lglrr::InvalidInputError);
}

TEST_CASE("ncut recovers exact blocks") {
  const Matrix a = block_affinity({2, 2}, 1.0, 0.0);
  const auto labels = lglrr::ncut(a, 2, 0);
  CHECK(labels[0] == labels[1]);
  CHECK(labels[2] == labels[3]);
  CHECK(labels[0] != labels[2]);
}

TEST_CASE("ncut degenerate cluster counts") {
  const Matrix a = block_affinity({3, 3}, 1.0, 0.1);
  SUBCASE("r = 1 puts everything together") {
    const auto labels = lglrr::ncut(a, 1, 0);
    CHECK(std::all_of(labels.begin(), labels.end(),
                      [](int l) { return l == 0; }));
  }
  SUBCASE("r = n separates everything") {
    const auto labels = lglrr::ncut(a, 6, 0);
    std::vector<int> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 6; ++i) CHECK(sorted[i] == i);
  }
}

TEST_CASE("ncut recovers noisy planted blocks") {
  const std::vector<int> sizes = {5, 5, 5};
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> strong(0.5, 1.0);
  std::uniform_real_distribution<double> weak(0.0, 0.01);
  const auto truth = block_labels(sizes);
  Matrix a = Matrix::Zero(15, 15);
  for (int i = 0; i < 15; ++i) {
    for (int j = i + 1; j < 15; ++j) {
      const double v = truth[i] == truth[j] ? strong(rng) : weak(rng);
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  const auto labels = lglrr::ncut(a, 3, 7);
  CHECK(lglrr::accuracy(labels, truth) == 1.0);
}

TEST_CASE("ncut is invariant to vertex permutation and affinity scale") {
  const Matrix a = block_affinity({4, 3, 5}, 1.0, 0.05);
  const auto truth = block_labels({4, 3, 5});
  const int n = 12;

  SUBCASE("permutation") {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(5);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix ap(n, n);
    std::vector<int> truth_p(n);
    for (int i = 0; i < n; ++i) {
      truth_p[i] = truth[perm[i]];
      for (int j = 0; j < n; ++j) ap(i, j) = a(perm[i], perm[j]);
    }
    const auto labels = lglrr::ncut(ap, 3, 11);
    CHECK(lglrr::accuracy(labels, truth_p) == 1.0);
  }
  SUBCASE("scale") {
    const auto base = lglrr::ncut(a, 3, 11);
    const auto scaled = lglrr::ncut((10.0 * a).eval(), 3, 11);
    CHECK(lglrr::accuracy(base, scaled) == 1.0);
    CHECK(lglrr::accuracy(base, truth) == 1.0);
  }
}

TEST_CASE("ncut handles isolated vertices deterministically") {
  Matrix a = Matrix::Zero(5, 5);
  a(0, 1) = a(1, 0) = 1.0;
  a(2, 3) = a(3, 2) = 1.0;  // vertex 4 is isolated
  const auto labels = lglrr::ncut(a, 2, 3);
  REQUIRE(labels.size() == 5);
  for (int l : labels) CHECK((l == 0 || l == 1));
  CHECK(labels[0] == labels[1]);
  CHECK(labels[2] == labels[3]);
  CHECK(labels[0] != labels[2]);
  CHECK(labels == lglrr::ncut(a, 2, 3));
}

TEST_CASE("ncut validates its affinity") {
  Matrix bad(2, 2);
  bad << 0.0, 1.0, 2.0, 0.0;  // asymmetric
  CHECK_THROWS_AS(lglrr::ncut(bad, 1, 0), lglrr::InvalidInputError);

  Matrix neg(2, 2);
  neg << 0.0, -1.0, -1.0, 0.0;
  CHECK_THROWS_AS(lglrr::ncut(neg, 1, 0), lglrr::InvalidInputError);

  Matrix diag(2, 2);
  diag << 0.5, 1.0, 1.0, 0.0;
  CHECK_THROWS_AS(lglrr::ncut(diag, 1, 0), lglrr::InvalidInputError);

  const Matrix ok = block_affinity({2, 2}, 1.0, 0.1);
  CHECK_THROWS_AS(lglrr::ncut(ok, 0, 0), lglrr::InvalidInputError);
  CHECK_THROWS_AS(lglrr::ncut(ok, 5, 0), lglrr::InvalidInputError);
}

TEST_SUITE_END();
