#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "xvh/dataset.hpp"
#include "xvh/graph.hpp"
#include "xvh/linalg.hpp"

namespace xvh {

struct SolverConfig {
  Index code_length = 32;
  double beta = 1.0;
  double gamma = 1.0;
  double lambda = 1.0;
  // Penalty standing in for an infinite weight on labeled rows.
  double u_large = 1e8;
  RidgePolicy ridge;
  int max_iter = 50;
  double rel_tol = 1e-5;
  std::uint64_t seed = 0;
  // Relative objective increase between iterations that aborts the fit.
  double increase_tolerance = 1e-6;

  void validate() const;
};

struct ModelParams {
  Matrix f;  // n x c label predictions
  Matrix w;  // r x c classifier
  Matrix q1; // d1 x r
  Matrix q2; // d2 x r
  std::array<double, 2> theta{0.5, 0.5};
};

// Terms of the relaxed objective. `theta_reg` is lambda * ||theta||^2, the
// regularizer the view-weight step minimizes alongside the other terms.
struct ObjectiveTerms {
  double laplacian = 0.0;  // Tr(F' L F)
  double label_fit = 0.0;  // Tr((F - Y)' U (F - Y))
  double view_fit = 0.0;   // sum_i theta_i ||T_i F - X_i Q_i W||^2
  double w_reg = 0.0;      // beta ||W||^2
  double pair = 0.0;       // gamma ||M1 X1 Q1 - M2 X2 Q2||^2
  double theta_reg = 0.0;

  double relaxed() const { return laplacian + label_fit + view_fit + w_reg + pair; }
  double total() const { return relaxed() + theta_reg; }
};

struct ObjectiveTrace {
  std::vector<ObjectiveTerms> values;  // values[0] is the initial state
  std::vector<double> seconds;         // wall time of each iteration (0 for the initial entry)
  bool converged = false;

  // Columns: iteration,total,laplacian,label_fit,view_fit,w_reg,pair,theta_reg,seconds
  void write_csv(std::ostream& out) const;
};

class ObjectiveIncreaseError : public std::runtime_error {
 public:
  ObjectiveIncreaseError(int iteration, ObjectiveTerms before, ObjectiveTerms after);
  int iteration;
  ObjectiveTerms before;
  ObjectiveTerms after;
};

ModelParams init_params(const SemiPairedDataset& ds, const AnchorGraph& graph, const SolverConfig& cfg);

// Solves (L + U + sum_i theta_i D_i) F = sum_i theta_i G_i X_i Q_i W + U Y,
// where D_i marks view membership and G_i scatters view rows to globals.
// L + U + sum theta D = Delta - Z Lambda^-1 Z' with Delta diagonal, solved
// through the Woodbury identity in O(n m0^2).
Matrix update_f(const ModelParams& p, const SemiPairedDataset& ds, const AnchorGraph& graph, const SolverConfig& cfg);

// W = (sum theta_i Q_i' X_i' X_i Q_i + beta I)^-1 sum theta_i Q_i' X_i' T_i F.
Matrix update_w(const ModelParams& p, const SemiPairedDataset& ds, const SolverConfig& cfg);

// Coefficients of the Sylvester equation A Q_v + Q_v B = C for view v given
// the current F, W, theta and the other view's projection.
struct SylvesterSystem {
  Matrix a;
  Matrix b;
  Matrix c;
};
SylvesterSystem q_system(int view, const ModelParams& p, const SemiPairedDataset& ds, const SolverConfig& cfg);

// Q1 from its equation with Q2 fixed, then Q2 with the new Q1.
std::pair<Matrix, Matrix> update_q(const ModelParams& p, const SemiPairedDataset& ds, const SolverConfig& cfg);

// pi_i = ||T_i F - X_i Q_i W||^2, then the simplex QP.
std::array<double, 2> view_residuals(const ModelParams& p, const SemiPairedDataset& ds);
std::array<double, 2> update_theta(const ModelParams& p, const SemiPairedDataset& ds, const SolverConfig& cfg);

ObjectiveTerms objective(const ModelParams& p, const SemiPairedDataset& ds, const AnchorGraph& graph,
                         const SolverConfig& cfg);

struct FitResult {
  ModelParams params;
  ObjectiveTrace trace;
};

// Alternates F, W, (Q1, Q2), theta until the relative change of the total
// objective drops below rel_tol or max_iter passes are done. Throws
// ObjectiveIncreaseError if an iteration raises the objective.
FitResult fit(const SemiPairedDataset& ds, const AnchorGraph& graph, const SolverConfig& cfg);

}  // namespace xvh
