#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace xvh {

using Rng = std::mt19937_64;

// Independent, reproducible sub-seeds fanned out from one user seed.
// Each consumer owns a fixed stream id so adding a consumer never shifts
// the randomness seen by another.
enum class Stream : std::uint64_t {
  synth = 1,
  split = 2,
  labels = 3,
  pairs = 4,
  anchors = 5,
  init = 6,
  itq = 7,  // one starting rotation shared by both views
  baseline = 9,
};

std::uint64_t derive_seed(std::uint64_t seed, Stream stream);

inline Rng make_rng(std::uint64_t seed, Stream stream) {
  return Rng(derive_seed(seed, stream));
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

}  // namespace xvh
