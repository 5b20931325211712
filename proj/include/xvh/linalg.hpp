#pragma once

#include <array>

#include <Eigen/Dense>

#include "xvh/dataset.hpp"

namespace xvh {

// Ridge added as epsilon * I to Gram matrices before inversion.
struct RidgePolicy {
  double epsilon = 1e-6;
};

// Lower bound on each view weight; keeps theta strictly inside the simplex.
inline constexpr double kThetaFloor = 1e-4;

// Moore-Penrose pseudoinverse via SVD; singular values below
// max(rows, cols) * eps * sigma_max are treated as zero.
Matrix pinv(const Matrix& a);

enum class ShiftPolicy {
  strict,      // throw NumericalError on a singular shifted system
  least_norm,  // use the minimum-norm least-squares solution instead
};

// Solves A X + X B = C for symmetric B by diagonalizing B = P D P' and
// solving (A + d_j I) x_j = (C P)_j column by column.
Matrix sylvester_solve(const Matrix& a, const Matrix& b, const Matrix& c, ShiftPolicy policy = ShiftPolicy::strict);

// Orthogonal R maximizing Tr(R' M): with M = U S V', R = U V'.
Matrix orthogonal_procrustes(const Matrix& m);

// argmin over theta1 + theta2 = 1, theta_i >= kThetaFloor of
// theta . pi + lambda * ||theta||^2.
std::array<double, 2> simplex_qp(std::array<double, 2> pi, double lambda);

// Solves a symmetric positive (semi)definite system, falling back to the
// pseudoinverse when Cholesky fails.
Matrix spd_solve(const Matrix& a, const Matrix& rhs);

}  // namespace xvh
