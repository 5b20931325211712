#include "xvh/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "xvh/errors.hpp"

namespace xvh {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw NumericalError(std::string(what) + ": non-finite input");
}

}  // namespace

Matrix pinv(const Matrix& a) {
  require_finite(a, "pinv");
  if (a.size() == 0) return Matrix(a.cols(), a.rows());
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double tol = static_cast<double>(std::max(a.rows(), a.cols())) * std::numeric_limits<double>::epsilon() *
                     (s.size() ? s(0) : 0.0);
  Vector inv = Vector::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix sylvester_solve(const Matrix& a, const Matrix& b, const Matrix& c, ShiftPolicy policy) {
  const Index p = a.rows();
  const Index q = b.rows();
  if (a.cols() != p || b.cols() != q || c.rows() != p || c.cols() != q)
    throw InputError("sylvester_solve: shape mismatch");
  require_finite(a, "sylvester_solve");
  require_finite(b, "sylvester_solve");
  require_finite(c, "sylvester_solve");
  if (p == 0 || q == 0) return Matrix::Zero(p, q);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (b + b.transpose()));
  if (eig.info() != Eigen::Success) throw NumericalError("sylvester_solve: eigendecomposition of B failed");
  Vector shifts = eig.eigenvalues();
  const Matrix& basis = eig.eigenvectors();
  const double shift_scale = shifts.cwiseAbs().maxCoeff();
  // Eigenvalues at rounding level are exact zeros of a rank-deficient B.
  const double zero_tol = static_cast<double>(q) * std::numeric_limits<double>::epsilon() * shift_scale;
  for (Index j = 0; j < q; ++j)
    if (std::abs(shifts(j)) <= zero_tol) shifts(j) = 0.0;

  const Eigen::VectorXcd alphas = Eigen::EigenSolver<Matrix>(a, false).eigenvalues();
  const double scale = std::max(alphas.cwiseAbs().maxCoeff(), shift_scale);

  const Matrix rhs = c * basis;
  Matrix x(p, q);
  for (Index j = 0; j < q; ++j) {
    const double gap = (alphas.array() + shifts(j)).abs().minCoeff();
    Matrix shifted = a;
    shifted.diagonal().array() += shifts(j);
    if (!(gap > 1e-12 * scale)) {
      if (policy == ShiftPolicy::strict) {
        std::ostringstream msg;
        msg << "ill-posed Sylvester equation: shift " << shifts(j) << " cancels an eigenvalue of A (gap " << gap
            << ")";
        throw NumericalError(msg.str());
      }
      x.col(j) = pinv(shifted) * rhs.col(j);
    } else {
      x.col(j) = shifted.partialPivLu().solve(rhs.col(j));
    }
  }
  return x * basis.transpose();
}

Matrix orthogonal_procrustes(const Matrix& m) {
  require_finite(m, "orthogonal_procrustes");
  if (m.rows() != m.cols()) throw InputError("orthogonal_procrustes: matrix must be square");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

std::array<double, 2> simplex_qp(std::array<double, 2> pi, double lambda) {
  if (!(lambda > 0.0)) throw InputError("simplex_qp: lambda must be positive");
  if (!std::isfinite(pi[0]) || !std::isfinite(pi[1])) throw NumericalError("simplex_qp: non-finite pi");
  const double t1 = std::clamp(0.5 + (pi[1] - pi[0]) / (4.0 * lambda), kThetaFloor, 1.0 - kThetaFloor);
  // The larger weight lies in [0.5, 1], so its complement is exact and the
  // pair sums to exactly one; nudge it down until the floor holds.
  double larger = t1 >= 0.5 ? t1 : 1.0 - t1;
  while (1.0 - larger < kThetaFloor) larger = std::nextafter(larger, 0.0);
  const double smaller = 1.0 - larger;
  if (t1 >= 0.5) return {larger, smaller};
  return {smaller, larger};
}

Matrix spd_solve(const Matrix& a, const Matrix& rhs) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) {
    Matrix x = llt.solve(rhs);
    if (x.allFinite()) return x;
  }
  return pinv(a) * rhs;
}

}  // namespace xvh
