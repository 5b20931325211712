#pragma once

#include <cstdint>
#include <vector>

#include "xvh/dataset.hpp"
#include "xvh/random.hpp"

namespace xvh {

struct ItqResult {
  Matrix rotation;                  // r x r orthogonal
  std::vector<double> error_trace;  // ||B - V R||_F^2 after each iteration
};

// Entrywise sign in the +-1 convention; sign(0) = +1.
Matrix itq_update_b(const Matrix& projected, const Matrix& rotation);

// Orthogonal R minimizing ||B - V R||_F^2, i.e. Procrustes on V' B.
Matrix itq_update_r(const Matrix& projected, const Matrix& codes);

Matrix random_rotation(Index r, Rng& rng);

// Alternates the code and rotation steps `iters` times starting from a
// seeded random rotation (or the supplied one).
ItqResult itq_fit(const Matrix& projected, int iters, std::uint64_t seed);
ItqResult itq_fit(const Matrix& projected, int iters, Matrix initial_rotation);

}  // namespace xvh
