#include "xvh/quantize.hpp"

#include <Eigen/QR>

#include "xvh/errors.hpp"
#include "xvh/linalg.hpp"

namespace xvh {

Matrix itq_update_b(const Matrix& projected, const Matrix& rotation) {
  if (projected.cols() != rotation.rows()) throw InputError("itq_update_b: shape mismatch");
  const Matrix vr = projected * rotation;
  return vr.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
}

Matrix itq_update_r(const Matrix& projected, const Matrix& codes) {
  if (projected.rows() != codes.rows() || projected.cols() != codes.cols())
    throw InputError("itq_update_r: shape mismatch");
  return orthogonal_procrustes(projected.transpose() * codes);
}

Matrix random_rotation(Index r, Rng& rng) {
  const Matrix g = gaussian_matrix(r, r, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(r, r);
}

ItqResult itq_fit(const Matrix& projected, int iters, std::uint64_t seed) {
  Rng rng(seed);
  return itq_fit(projected, iters, random_rotation(projected.cols(), rng));
}

ItqResult itq_fit(const Matrix& projected, int iters, Matrix initial_rotation) {
  if (iters < 1) throw InputError("itq_fit: iters must be >= 1");
  if (!projected.allFinite()) throw NumericalError("itq_fit: non-finite input");
  if (initial_rotation.rows() != projected.cols() || initial_rotation.cols() != projected.cols())
    throw InputError("itq_fit: initial rotation has the wrong shape");
  ItqResult out;
  out.rotation = std::move(initial_rotation);
  out.error_trace.reserve(iters);
  for (int it = 0; it < iters; ++it) {
    const Matrix codes = itq_update_b(projected, out.rotation);
    out.rotation = itq_update_r(projected, codes);
    out.error_trace.push_back((codes - projected * out.rotation).squaredNorm());
  }
  return out;
}

}  // namespace xvh
