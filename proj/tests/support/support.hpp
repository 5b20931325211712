#pragma once

#include <array>
#include <filesystem>
#include <string>

#include "xvh/dataset.hpp"
#include "xvh/graph.hpp"
#include "xvh/random.hpp"
#include "xvh/solver.hpp"

namespace xvh::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_bytes(const std::filesystem::path& path);

int uniform_int(Rng& rng, int lo, int hi);  // inclusive
double uniform_real(Rng& rng, double lo, double hi);
double log_uniform(Rng& rng, double lo, double hi);

struct TinyLimits {
  Index max_n = 20;
  Index max_d = 6;
  Index max_r = 4;
  Index max_c = 3;
  // n0 > max(d1, d2) keeps X'X and the paired Gram matrices invertible.
  bool pairs_exceed_dims = true;
};

// Centered random dataset with random pairing and a partial, class-covering
// label set.
SemiPairedDataset random_dataset(Rng& rng, const TinyLimits& lim);

struct TinyInstance {
  SemiPairedDataset ds;
  AnchorGraph graph;
  SolverConfig cfg;
  ModelParams params;  // random, not an initialization
};

TinyInstance random_instance(Rng& rng, const TinyLimits& lim = {});

// --- dense reference ---------------------------------------------------------
// Literal transcriptions with explicit selection matrices and pseudoinverses.

Matrix dense_pinv(const Matrix& a);  // complete orthogonal decomposition
Matrix selection_t(const SemiPairedDataset& ds, int view);  // n_v x n
Matrix selection_m(const SemiPairedDataset& ds, int view);  // n0 x n_v
Matrix dense_u(const SemiPairedDataset& ds, double u_large);
Matrix dense_s_from_z(const Matrix& z);
Matrix dense_laplacian(const Matrix& z);

// Sample-to-anchor affinities from the definition: full sort of the
// normalized distances, softmax over the k smallest.
Matrix reference_z(const SemiPairedDataset& ds, const AnchorSet& anchors, Index k, std::array<double, 2> sigma_sq);

// 1/2 sum_ij S_ij ||F_i - F_j||^2.
double laplacian_double_sum(const Matrix& s, const Matrix& f);

Matrix reference_update_f(const ModelParams& p, const SemiPairedDataset& ds, const Matrix& s,
                          const SolverConfig& cfg);
Matrix reference_update_w(const ModelParams& p, const SemiPairedDataset& ds, const SolverConfig& cfg);
// Projection equation of one view solved through the Kronecker-vectorized
// system (I (x) A + B' (x) I) vec(Q) = vec(C).
Matrix reference_update_q(int view, const ModelParams& p, const SemiPairedDataset& ds, const SolverConfig& cfg);
// Candidate enumeration over the stationary point and both floors.
std::array<double, 2> reference_theta(std::array<double, 2> pi, double lambda);

struct ReferenceTerms {
  double laplacian, label_fit, view_fit, w_reg, pair, theta_reg;
  double total() const { return laplacian + label_fit + view_fit + w_reg + pair + theta_reg; }
};
ReferenceTerms reference_objective(const ModelParams& p, const SemiPairedDataset& ds, const Matrix& s,
                                   const SolverConfig& cfg);

// Sub-objectives minimized by each block.
double f_subobjective(const Matrix& f, const ModelParams& p, const SemiPairedDataset& ds, const Matrix& s,
                      const SolverConfig& cfg);
double w_subobjective(const Matrix& w, const ModelParams& p, const SemiPairedDataset& ds, const SolverConfig& cfg);
double q_subobjective(const Matrix& q1, const Matrix& q2, const ModelParams& p, const SemiPairedDataset& ds,
                      const SolverConfig& cfg);
double theta_subobjective(double theta1, const ModelParams& p, const SemiPairedDataset& ds, const SolverConfig& cfg);

// Relative residual of the stated projection equation for view `view`.
double q_equation_residual(int view, const ModelParams& p, const SemiPairedDataset& ds, const SolverConfig& cfg);

// Central finite-difference gradient of `fn` at `x`.
template <typename Fn>
Matrix numeric_gradient(Fn&& fn, const Matrix& x, double h = 1e-5) {
  Matrix g(x.rows(), x.cols());
  Matrix probe = x;
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) {
      const double keep = probe(i, j);
      probe(i, j) = keep + h;
      const double up = fn(probe);
      probe(i, j) = keep - h;
      const double down = fn(probe);
      probe(i, j) = keep;
      g(i, j) = (up - down) / (2 * h);
    }
  return g;
}

}  // namespace xvh::testing
