#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Sparse>

#include "xvh/dataset.hpp"

namespace xvh {

// Paired training objects used as landmarks; row j of anchors1/anchors2 are
// the two views of pair `source_pairs[j]` (pair index in [0, n0)).
struct AnchorSet {
  Matrix anchors1;
  Matrix anchors2;
  std::vector<Index> source_pairs;

  Index size() const { return anchors1.rows(); }
};

enum class SigmaPolicy { automatic, fixed };

struct SigmaSetting {
  SigmaPolicy policy = SigmaPolicy::automatic;
  // Bandwidth used for both views when policy == fixed.
  double value = 1.0;
};

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Sample-to-anchor affinities and the implied similarity S = Z diag(1'Z)^-1 Z'.
// S and the Laplacian L = I - S are only ever applied in factored form.
struct AnchorGraph {
  SparseRowMatrix z;
  Vector lambda;  // column sums of z, all > 0
  Index k = 0;
  // Squared per-view bandwidths sigma_v^2.
  std::array<double, 2> sigma_sq{1.0, 1.0};
  // Anchors (indices into the AnchorSet passed to build) that survived; the
  // others touched no sample and were dropped.
  std::vector<Index> kept_anchors;

  Index samples() const { return z.rows(); }
  Index anchors() const { return z.cols(); }
};

// 10% of the pairs when that exceeds fifty, fifty otherwise.
Index default_anchor_count(Index n0);

AnchorSet select_anchors(const SemiPairedDataset& ds, Index m0, std::uint64_t seed);

// k-nearest-anchor softmax affinities. A sample observed only in view v is
// compared to the anchors' view-v rows with distance ||x - mu||^2 / sigma_v^2;
// a paired sample averages the two normalized view distances. Ties are broken
// by the lower anchor index. Rows are processed by `workers` threads; the
// result does not depend on the worker count.
AnchorGraph build_anchor_graph(const SemiPairedDataset& ds, const AnchorSet& anchors, Index k, SigmaSetting sigma,
                               unsigned workers = 1);

// S F computed as Z (Lambda^-1 (Z' F)).
Matrix similarity_apply(const AnchorGraph& g, const Matrix& f);

// Tr(F' L F) = ||F||^2 - ||Lambda^-1/2 Z' F||^2.
double laplacian_quadratic(const AnchorGraph& g, const Matrix& f);

// Dense S; intended for small graphs (tests, diagnostics).
Matrix dense_similarity(const AnchorGraph& g);

}  // namespace xvh
