#pragma once

#include "lglrr/numerics.hpp"

#include <cstdint>
#include <vector>

namespace lglrr {

/// Symmetric nonnegative affinity (|W| + |W|^T) / 2 with a zeroed diagonal.
Matrix affinity_from_w(const Matrix& w);

/// Normalized-cut spectral clustering. Embeds vertices with the r
/// eigenvectors of L = I - D^{-1/2} A D^{-1/2} for the smallest eigenvalues
/// (degrees get +1e-12 so isolated vertices stay well defined), normalizes
/// each embedding row to unit length (all-zero rows are left as zero, which
/// sends isolated vertices to whichever centroid is nearest, ties to cluster
/// 0), then runs seeded k-means. The affinity must be square, symmetric,
/// nonnegative with a zero diagonal. Returns one label in [0, r) per vertex.
std::vector<int> ncut(const Matrix& affinity, int r, std::uint64_t seed);

}  // namespace lglrr
