#include "xvh/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "xvh/errors.hpp"
#include "xvh/log.hpp"
#include "xvh/random.hpp"

namespace xvh {

Index default_anchor_count(Index n0) {
  const Index tenth = n0 / 10;
  return tenth > 50 ? tenth : 50;
}

AnchorSet select_anchors(const SemiPairedDataset& ds, Index m0, std::uint64_t seed) {
  if (ds.n0 == 0) throw InputError("cannot select anchors: dataset has no paired samples");
  if (m0 < 1 || m0 > ds.n0)
    throw InputError("anchor count " + std::to_string(m0) + " must lie in [1, n0 = " + std::to_string(ds.n0) + "]");
  std::vector<Index> pairs(ds.n0);
  std::iota(pairs.begin(), pairs.end(), Index{0});
  Rng rng = make_rng(seed, Stream::anchors);
  // Partial Fisher-Yates: the first m0 entries are a uniform sample.
  for (Index i = 0; i < m0; ++i) {
    std::uniform_int_distribution<Index> pick(i, ds.n0 - 1);
    std::swap(pairs[i], pairs[pick(rng)]);
  }
  pairs.resize(m0);

  AnchorSet a;
  a.source_pairs = pairs;
  a.anchors1.resize(m0, ds.d1());
  a.anchors2.resize(m0, ds.d2());
  const auto p1 = ds.paired_view1();
  const auto p2 = ds.paired_view2();
  for (Index j = 0; j < m0; ++j) {
    a.anchors1.row(j) = p1.row(pairs[j]);
    a.anchors2.row(j) = p2.row(pairs[j]);
  }
  return a;
}

namespace {

// Squared Euclidean distance from every row of x to every row of anchors.
Matrix squared_distances(const Matrix& x, const Matrix& anchors) {
  const Vector xn = x.rowwise().squaredNorm();
  const Vector an = anchors.rowwise().squaredNorm();
  Matrix d = -2.0 * x * anchors.transpose();
  d.colwise() += xn;
  d.rowwise() += an.transpose();
  return d.cwiseMax(0.0);
}

// Indices of the k smallest entries, ordered by (value, index).
std::vector<Index> k_smallest(const Eigen::Ref<const RowVector>& row, Index k) {
  std::vector<Index> idx(row.size());
  std::iota(idx.begin(), idx.end(), Index{0});
  auto less = [&](Index a, Index b) { return row(a) < row(b) || (row(a) == row(b) && a < b); };
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), less);
  idx.resize(k);
  return idx;
}

double auto_sigma_sq(const Matrix& dist, Index k) {
  if (dist.rows() == 0) return 1.0;
  double total = 0.0;
  for (Index i = 0; i < dist.rows(); ++i) {
    const auto nn = k_smallest(dist.row(i), k);
    total += dist(i, nn.back());
  }
  return total / static_cast<double>(dist.rows());
}

template <typename Fn>
void parallel_rows(Index n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2) {
    fn(Index{0}, n);
    return;
  }
  std::vector<std::thread> threads;
  const Index chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const Index begin = std::min<Index>(n, w * chunk);
    const Index end = std::min<Index>(n, begin + chunk);
    if (begin < end) threads.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : threads) t.join();
}

}  // namespace

AnchorGraph build_anchor_graph(const SemiPairedDataset& ds, const AnchorSet& anchors, Index k, SigmaSetting sigma,
                               unsigned workers) {
  const Index m0 = anchors.size();
  if (m0 < 1) throw InputError("anchor set is empty");
  if (k < 1 || k > m0)
    throw InputError("neighbor count k = " + std::to_string(k) + " must lie in [1, m0 = " + std::to_string(m0) + "]");
  if (anchors.anchors1.cols() != ds.d1() || anchors.anchors2.cols() != ds.d2())
    throw InputError("anchor dimensions do not match the dataset views");

  const Matrix dist1 = squared_distances(ds.view1, anchors.anchors1);
  const Matrix dist2 = squared_distances(ds.view2, anchors.anchors2);

  AnchorGraph g;
  g.k = k;
  if (sigma.policy == SigmaPolicy::fixed) {
    if (!(sigma.value > 0.0) || !std::isfinite(sigma.value)) throw InputError("fixed sigma must be positive");
    g.sigma_sq = {sigma.value * sigma.value, sigma.value * sigma.value};
  } else {
    g.sigma_sq = {auto_sigma_sq(dist1, k), auto_sigma_sq(dist2, k)};
    if (g.sigma_sq[0] <= 0.0 || g.sigma_sq[1] <= 0.0)
      throw NumericalError("degenerate sigma: all sample-to-anchor distances are zero");
  }

  const Index n = ds.size();
  const Index u1 = ds.unpaired1();
  std::vector<std::vector<std::pair<Index, double>>> rows(n);
  parallel_rows(n, workers, [&](Index begin, Index end) {
    RowVector d(m0);
    for (Index i = begin; i < end; ++i) {
      const bool in1 = ds.has_view1(i);
      const bool in2 = ds.has_view2(i);
      if (in1 && in2)
        d = 0.5 * (dist1.row(i) / g.sigma_sq[0] + dist2.row(i - u1) / g.sigma_sq[1]);
      else if (in1)
        d = dist1.row(i) / g.sigma_sq[0];
      else
        d = dist2.row(i - u1) / g.sigma_sq[1];
      const auto nn = k_smallest(d, k);
      // Softmax of -d over the neighbors, shifted by the nearest distance.
      const double base = d(nn.front());
      double sum = 0.0;
      auto& out = rows[i];
      out.reserve(k);
      for (Index j : nn) {
        const double w = std::exp(-(d(j) - base));
        out.emplace_back(j, w);
        sum += w;
      }
      for (auto& [j, w] : out) w /= sum;
      std::sort(out.begin(), out.end());
    }
  });

  Vector colsum = Vector::Zero(m0);
  for (const auto& r : rows)
    for (const auto& [j, w] : r) colsum(j) += w;

  std::vector<Index> remap(m0, -1);
  for (Index j = 0; j < m0; ++j)
    if (colsum(j) > 0.0) {
      remap[j] = static_cast<Index>(g.kept_anchors.size());
      g.kept_anchors.push_back(j);
    }
  const Index kept = static_cast<Index>(g.kept_anchors.size());
  if (kept < m0)
    warn("dropped " + std::to_string(m0 - kept) + " anchor(s) not touched by any sample; m0 = " +
         std::to_string(kept));

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n * k));
  for (Index i = 0; i < n; ++i)
    for (const auto& [j, w] : rows[i])
      if (w > 0.0) triplets.emplace_back(i, remap[j], w);
  g.z.resize(n, kept);
  g.z.setFromTriplets(triplets.begin(), triplets.end());
  g.z.makeCompressed();
  g.lambda.resize(kept);
  for (Index j = 0; j < kept; ++j) g.lambda(j) = colsum(g.kept_anchors[j]);
  return g;
}

Matrix similarity_apply(const AnchorGraph& g, const Matrix& f) {
  if (f.rows() != g.samples())
    throw InputError("similarity_apply: F has " + std::to_string(f.rows()) + " rows, graph has " +
                     std::to_string(g.samples()) + " samples");
  const Matrix projected = g.lambda.cwiseInverse().asDiagonal() * (g.z.transpose() * f);
  return g.z * projected;
}

double laplacian_quadratic(const AnchorGraph& g, const Matrix& f) {
  if (f.rows() != g.samples())
    throw InputError("laplacian_quadratic: F has " + std::to_string(f.rows()) + " rows, graph has " +
                     std::to_string(g.samples()) + " samples");
  const Matrix projected = g.lambda.cwiseSqrt().cwiseInverse().asDiagonal() * (g.z.transpose() * f);
  return f.squaredNorm() - projected.squaredNorm();
}

Matrix dense_similarity(const AnchorGraph& g) {
  const Matrix z = Matrix(g.z);
  return z * g.lambda.cwiseInverse().asDiagonal() * z.transpose();
}

}  // namespace xvh
