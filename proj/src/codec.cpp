#include "xvh/codec.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <string>

#include "xvh/errors.hpp"

namespace xvh {

namespace {

constexpr char kCodeMagic[4] = {'X', 'V', 'H', '1'};
constexpr char kModelMagic[4] = {'X', 'V', 'H', 'M'};
constexpr std::uint32_t kModelVersion = 1;

Index words_for(Index bits) { return (bits + 63) / 64; }

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double v) { put_u64(buf, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  Reader(std::string data, std::string name) : data_(std::move(data)), name_(std::move(name)) {}

  void expect_magic(const char (&magic)[4]) {
    need(4);
    if (std::memcmp(data_.data() + pos_, magic, 4) != 0) throw InputError(name_ + ": bad magic");
    pos_ += 4;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  bool at_end() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t bytes) const {
    if (data_.size() - pos_ < bytes) throw InputError(name_ + ": truncated file");
  }
  std::string data_;
  std::string name_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("write failed: " + path.string());
}

}  // namespace

const ViewHash& HashModel::view(int v) const {
  if (v != 1 && v != 2) throw InputError("view must be 1 or 2, got " + std::to_string(v));
  return views[v - 1];
}

void HashModel::validate() const {
  if (code_length < 1) throw InputError("hash model code length must be >= 1");
  for (int v = 1; v <= 2; ++v) {
    const auto& h = view(v);
    if (h.projection.cols() != code_length || h.rotation.rows() != code_length ||
        h.rotation.cols() != code_length || h.mean.size() != h.projection.rows())
      throw InputError("hash model view " + std::to_string(v) + " has inconsistent dimensions");
    const double err = (h.rotation.transpose() * h.rotation - Matrix::Identity(code_length, code_length)).norm();
    if (!(err < 1e-8)) throw InputError("hash model view " + std::to_string(v) + " rotation is not orthogonal");
  }
}

BinaryCodes::BinaryCodes(Index rows, Index bits)
    : rows_(rows), bits_(bits), words_per_row_(words_for(bits)), words_(static_cast<std::size_t>(rows * words_for(bits)), 0) {
  if (rows < 0 || bits < 1) throw InputError("binary codes need r >= 1 and n >= 0");
}

CodeRef BinaryCodes::row(Index i) const {
  return {std::span<const std::uint64_t>(words_).subspan(static_cast<std::size_t>(i * words_per_row_),
                                                         static_cast<std::size_t>(words_per_row_)),
          bits_};
}

bool BinaryCodes::bit(Index i, Index j) const {
  return (words_[i * words_per_row_ + j / 64] >> (j % 64)) & 1u;
}

void BinaryCodes::set_bit(Index i, Index j, bool value) {
  auto& w = words_[i * words_per_row_ + j / 64];
  const std::uint64_t mask = std::uint64_t{1} << (j % 64);
  w = value ? (w | mask) : (w & ~mask);
}

BinaryCodes pack_signs(const Matrix& values) {
  BinaryCodes codes(values.rows(), values.cols());
  for (Index i = 0; i < values.rows(); ++i)
    for (Index j = 0; j < values.cols(); ++j)
      if (values(i, j) > 0.0) codes.set_bit(i, j, true);
  return codes;
}

BinaryCodes encode(const Matrix& samples, const HashModel& model, int view) {
  const ViewHash& h = model.view(view);
  if (samples.cols() != h.projection.rows())
    throw InputError("encode: samples have " + std::to_string(samples.cols()) + " features, view " +
                     std::to_string(view) + " expects " + std::to_string(h.projection.rows()));
  if (samples.rows() == 0) throw InputError("encode: no samples");
  const Matrix centered = samples.rowwise() - h.mean;
  return pack_signs(centered * h.projection * h.rotation);
}

BinaryCodes encode_one(const RowVector& sample, const HashModel& model, int view) {
  return encode(Matrix(sample), model, view);
}

Index hamming_distance(CodeRef a, CodeRef b) {
  if (a.bits != b.bits || a.words.size() != b.words.size())
    throw InputError("hamming_distance: code lengths differ (" + std::to_string(a.bits) + " vs " +
                     std::to_string(b.bits) + ")");
  Index d = 0;
  for (std::size_t k = 0; k < a.words.size(); ++k) d += std::popcount(a.words[k] ^ b.words[k]);
  return d;
}

Ranking rank_by_hamming_with_distances(CodeRef query, const BinaryCodes& database, Index top_r) {
  if (query.bits != database.bits()) throw InputError("rank_by_hamming: code lengths differ");
  if (top_r < 0 || top_r > database.rows()) throw InputError("rank_by_hamming: top_R exceeds database size");
  std::vector<Index> dist(database.rows());
  for (Index i = 0; i < database.rows(); ++i) dist[i] = hamming_distance(query, database.row(i));
  std::vector<Index> idx(database.rows());
  std::iota(idx.begin(), idx.end(), Index{0});
  std::partial_sort(idx.begin(), idx.begin() + top_r, idx.end(),
                    [&](Index a, Index b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); });
  idx.resize(top_r);
  Ranking out;
  out.distances.reserve(top_r);
  for (Index i : idx) out.distances.push_back(dist[i]);
  out.indices = std::move(idx);
  return out;
}

std::vector<Index> rank_by_hamming(CodeRef query, const BinaryCodes& database, Index top_r) {
  return rank_by_hamming_with_distances(query, database, top_r).indices;
}

void save_codes(const BinaryCodes& codes, const std::filesystem::path& path) {
  if (codes.rows() < 1 || codes.bits() < 1) throw InputError("save_codes: n and r must be >= 1");
  std::string buf(kCodeMagic, 4);
  put_u32(buf, static_cast<std::uint32_t>(codes.rows()));
  put_u32(buf, static_cast<std::uint32_t>(codes.bits()));
  for (std::uint64_t w : codes.words()) put_u64(buf, w);
  write_file(path, buf);
}

BinaryCodes load_codes(const std::filesystem::path& path) {
  Reader in(read_file(path), path.filename().string());
  in.expect_magic(kCodeMagic);
  const Index n = in.u32();
  const Index r = in.u32();
  if (n < 1 || r < 1) throw InputError(path.filename().string() + ": n and r must be >= 1");
  BinaryCodes codes(n, r);
  const Index wpr = codes.words_per_row();
  if (in.remaining() < static_cast<std::size_t>(n * wpr * 8)) throw InputError(path.filename().string() + ": truncated file");
  const std::uint64_t pad_mask = (r % 64) ? ~((std::uint64_t{1} << (r % 64)) - 1) : 0;
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < wpr; ++k) {
      const std::uint64_t w = in.u64();
      if (k == wpr - 1 && (w & pad_mask))
        throw InputError(path.filename().string() + ": nonzero pad bits in row " + std::to_string(i));
      codes.words()[i * wpr + k] = w;
    }
  if (!in.at_end()) throw InputError(path.filename().string() + ": trailing bytes");
  return codes;
}

void save_model(const HashModel& model, const std::filesystem::path& path) {
  model.validate();
  std::string buf(kModelMagic, 4);
  put_u32(buf, kModelVersion);
  put_u32(buf, static_cast<std::uint32_t>(model.code_length));
  for (const auto& h : model.views) {
    put_u32(buf, static_cast<std::uint32_t>(h.projection.rows()));
    for (Index j = 0; j < h.mean.size(); ++j) put_f64(buf, h.mean(j));
    for (Index i = 0; i < h.projection.rows(); ++i)
      for (Index j = 0; j < h.projection.cols(); ++j) put_f64(buf, h.projection(i, j));
    for (Index i = 0; i < h.rotation.rows(); ++i)
      for (Index j = 0; j < h.rotation.cols(); ++j) put_f64(buf, h.rotation(i, j));
  }
  write_file(path, buf);
}

HashModel load_model(const std::filesystem::path& path) {
  Reader in(read_file(path), path.filename().string());
  in.expect_magic(kModelMagic);
  const std::uint32_t version = in.u32();
  if (version != kModelVersion)
    throw InputError(path.filename().string() + ": unsupported model version " + std::to_string(version));
  HashModel model;
  model.code_length = in.u32();
  const Index r = model.code_length;
  for (auto& h : model.views) {
    const Index d = in.u32();
    h.mean.resize(d);
    h.projection.resize(d, r);
    h.rotation.resize(r, r);
    for (Index j = 0; j < d; ++j) h.mean(j) = in.f64();
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < r; ++j) h.projection(i, j) = in.f64();
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < r; ++j) h.rotation(i, j) = in.f64();
  }
  if (!in.at_end()) throw InputError(path.filename().string() + ": trailing bytes");
  model.validate();
  return model;
}

}  // namespace xvh
