#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "xvh/dataset.hpp"

namespace xvh {

struct ViewHash {
  Matrix projection;  // d x r
  Matrix rotation;    // r x r orthogonal
  RowVector mean;     // 1 x d, subtracted before projection
};

// Per-view hash functions x -> [(x - mean) Q R > 0].
struct HashModel {
  Index code_length = 0;
  std::array<ViewHash, 2> views;

  const ViewHash& view(int v) const;
  Index dim(int v) const { return view(v).projection.rows(); }
  // Throws InputError on inconsistent shapes or a non-orthogonal rotation.
  void validate() const;
};

// Read-only view of one packed code.
struct CodeRef {
  std::span<const std::uint64_t> words;
  Index bits = 0;
};

// n codes of r bits each. Bit j of a code lives in word j / 64 at position
// j % 64; pad bits above r in the last word are zero.
class BinaryCodes {
 public:
  BinaryCodes() = default;
  BinaryCodes(Index rows, Index bits);

  Index rows() const { return rows_; }
  Index bits() const { return bits_; }
  Index words_per_row() const { return words_per_row_; }

  CodeRef row(Index i) const;
  bool bit(Index i, Index j) const;
  void set_bit(Index i, Index j, bool value);

  const std::vector<std::uint64_t>& words() const { return words_; }
  std::vector<std::uint64_t>& words() { return words_; }

  friend bool operator==(const BinaryCodes&, const BinaryCodes&) = default;

 private:
  Index rows_ = 0;
  Index bits_ = 0;
  Index words_per_row_ = 0;
  std::vector<std::uint64_t> words_;
};

// Packs a real matrix: strictly positive entries become 1 bits.
BinaryCodes pack_signs(const Matrix& values);

// Encodes raw (uncentered) samples of view 1 or 2, one code per row.
BinaryCodes encode(const Matrix& samples, const HashModel& model, int view);
BinaryCodes encode_one(const RowVector& sample, const HashModel& model, int view);

Index hamming_distance(CodeRef a, CodeRef b);

// Database indices of the `top_r` nearest codes, ordered by distance and then
// by index.
std::vector<Index> rank_by_hamming(CodeRef query, const BinaryCodes& database, Index top_r);

struct Ranking {
  std::vector<Index> indices;
  std::vector<Index> distances;
};
Ranking rank_by_hamming_with_distances(CodeRef query, const BinaryCodes& database, Index top_r);

// "XVH1", u32 n, u32 r, then n * ceil(r / 64) u64 words, all little-endian.
void save_codes(const BinaryCodes& codes, const std::filesystem::path& path);
BinaryCodes load_codes(const std::filesystem::path& path);

// "XVHM", u32 version, u32 r, then per view: u32 d, mean (d doubles),
// projection (d x r, row-major), rotation (r x r, row-major); doubles are
// little-endian IEEE-754.
void save_model(const HashModel& model, const std::filesystem::path& path);
HashModel load_model(const std::filesystem::path& path);

}  // namespace xvh
