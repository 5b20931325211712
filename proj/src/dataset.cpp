#include "xvh/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "csv.hpp"
#include "xvh/errors.hpp"
#include "xvh/random.hpp"

namespace xvh {

namespace fs = std::filesystem;

Index LabelMatrix::labeled_count() const {
  return static_cast<Index>(std::count(labeled.begin(), labeled.end(), true));
}

std::vector<Index> LabelMatrix::uncovered_classes() const {
  std::vector<Index> missing;
  for (Index j = 0; j < classes(); ++j) {
    bool covered = false;
    for (Index i = 0; i < rows() && !covered; ++i) covered = labeled[i] && values(i, j) > 0.5;
    if (!covered) missing.push_back(j);
  }
  return missing;
}

std::optional<Index> SemiPairedDataset::view1_row(Index global) const {
  if (global < 0 || global >= n1()) return std::nullopt;
  return global;
}

std::optional<Index> SemiPairedDataset::view2_row(Index global) const {
  if (global < unpaired1() || global >= size()) return std::nullopt;
  return global - unpaired1();
}

namespace {

void validate_labels(const LabelMatrix& lm, Index n, const char* what) {
  if (lm.rows() != n)
    throw InputError(std::string(what) + " has " + std::to_string(lm.rows()) + " rows, expected n = " +
                     std::to_string(n));
  if (static_cast<Index>(lm.labeled.size()) != n) throw InputError(std::string(what) + " mask size mismatch");
  for (Index i = 0; i < n; ++i) {
    Index ones = 0;
    for (Index j = 0; j < lm.classes(); ++j) {
      const double v = lm.values(i, j);
      if (v != 0.0 && v != 1.0)
        throw InputError(std::string(what) + " row " + std::to_string(i) + " has non-binary entry");
      ones += v == 1.0;
    }
    if (!lm.labeled[i] && ones != 0)
      throw InputError(std::string(what) + " row " + std::to_string(i) + " is unlabeled but not all-zero");
    if (lm.labeled[i] && ones == 0)
      throw InputError(std::string(what) + " row " + std::to_string(i) + " is labeled with no class");
    if (lm.labeled[i] && lm.mode == LabelMode::single && ones != 1)
      throw InputError(std::string(what) + " row " + std::to_string(i) + " is not one-hot in single-label mode");
  }
}

LabelMatrix labels_from_values(Matrix values, LabelMode mode) {
  LabelMatrix lm;
  lm.mode = mode;
  lm.labeled.resize(values.rows());
  for (Index i = 0; i < values.rows(); ++i) lm.labeled[i] = (values.row(i).array() != 0.0).any();
  lm.values = std::move(values);
  return lm;
}

LabelMatrix gather_labels(const LabelMatrix& src, std::span<const Index> globals) {
  LabelMatrix out;
  out.mode = src.mode;
  out.values.resize(static_cast<Index>(globals.size()), src.classes());
  out.labeled.resize(globals.size());
  for (std::size_t k = 0; k < globals.size(); ++k) {
    out.values.row(k) = src.values.row(globals[k]);
    out.labeled[k] = src.labeled[globals[k]];
  }
  return out;
}

Index rounded_count(double fraction, Index total) {
  return static_cast<Index>(std::llround(fraction * static_cast<double>(total)));
}

}  // namespace

void SemiPairedDataset::validate() const {
  if (n0 < 0 || n0 > std::min(n1(), n2()))
    throw InputError("pair count exceeds view size: n0 = " + std::to_string(n0) + ", n1 = " + std::to_string(n1()) +
                     ", n2 = " + std::to_string(n2()));
  if (!view1.allFinite() || !view2.allFinite()) throw InputError("view matrices contain non-finite entries");
  validate_labels(labels, size(), "labels");
  validate_labels(truth, size(), "truth");
  if (truth.classes() != labels.classes()) throw InputError("truth and labels disagree on class count");
}

void SyntheticSpec::validate() const {
  if (n1 < 0 || n2 < 0 || n0 < 0) throw InputError("sample counts must be non-negative");
  if (n0 > std::min(n1, n2))
    throw InputError("pair count exceeds view size: n0 = " + std::to_string(n0) + " > min(n1, n2) = " +
                     std::to_string(std::min(n1, n2)));
  if (d1 < 1 || d2 < 1) throw InputError("feature dimensions must be >= 1");
  if (classes < 1) throw InputError("class count must be >= 1");
  if (!(labeled_fraction >= 0.0 && labeled_fraction <= 1.0)) throw InputError("labeled fraction must lie in [0, 1]");
  if (!(noise_sigma >= 0.0)) throw InputError("noise sigma must be >= 0");
  const Index n = n1 + n2 - n0;
  if (rounded_count(labeled_fraction, n) < classes)
    throw InputError("labeled fraction * n must round to at least the class count (" + std::to_string(classes) + ")");
}

SemiPairedDataset load_dataset(const fs::path& dir) {
  const auto kv = detail::read_key_values(dir / "manifest");
  auto get = [&](const char* key) -> Index {
    auto it = kv.find(key);
    if (it == kv.end()) throw InputError(std::string("manifest missing key '") + key + "'");
    const auto v = detail::parse_integer(it->second, std::string("manifest ") + key);
    if (v < 0) throw InputError(std::string("manifest ") + key + " must be non-negative");
    return static_cast<Index>(v);
  };
  const Index n1 = get("n1"), n2 = get("n2"), n0 = get("n0"), c = get("c"), d1 = get("d1"), d2 = get("d2");
  LabelMode mode = LabelMode::single;
  if (auto it = kv.find("mode"); it != kv.end()) {
    if (it->second == "multi")
      mode = LabelMode::multi;
    else if (it->second != "single")
      throw InputError("manifest mode must be single or multi, got '" + it->second + "'");
  }
  if (n0 > std::min(n1, n2)) throw InputError("pair count exceeds view size");

  SemiPairedDataset ds;
  ds.n0 = n0;
  ds.view1 = detail::read_matrix_csv(dir / "view1.csv", d1);
  ds.view2 = detail::read_matrix_csv(dir / "view2.csv", d2);
  if (ds.view1.rows() != n1 || ds.view1.cols() != d1)
    throw InputError("view1.csv is " + std::to_string(ds.view1.rows()) + "x" + std::to_string(ds.view1.cols()) +
                     ", manifest says " + std::to_string(n1) + "x" + std::to_string(d1));
  if (ds.view2.rows() != n2 || ds.view2.cols() != d2)
    throw InputError("view2.csv is " + std::to_string(ds.view2.rows()) + "x" + std::to_string(ds.view2.cols()) +
                     ", manifest says " + std::to_string(n2) + "x" + std::to_string(d2));
  const Index n = n1 + n2 - n0;
  Matrix y = detail::read_matrix_csv(dir / "labels.csv", c);
  if (y.rows() != n || y.cols() != c)
    throw InputError("labels.csv is " + std::to_string(y.rows()) + "x" + std::to_string(y.cols()) + ", expected " +
                     std::to_string(n) + "x" + std::to_string(c));
  ds.labels = labels_from_values(std::move(y), mode);
  if (fs::exists(dir / "truth.csv")) {
    Matrix t = detail::read_matrix_csv(dir / "truth.csv", c);
    if (t.rows() != n || t.cols() != c) throw InputError("truth.csv shape does not match labels.csv");
    ds.truth = labels_from_values(std::move(t), mode);
  } else {
    ds.truth = ds.labels;
  }
  ds.validate();
  return ds;
}

void save_dataset(const SemiPairedDataset& ds, const fs::path& dir) {
  fs::create_directories(dir);
  detail::write_matrix_csv(dir / "view1.csv", ds.view1);
  detail::write_matrix_csv(dir / "view2.csv", ds.view2);
  detail::write_matrix_csv(dir / "labels.csv", ds.labels.values);
  const bool same_truth = ds.truth.values == ds.labels.values;
  if (!same_truth) detail::write_matrix_csv(dir / "truth.csv", ds.truth.values);
  else fs::remove(dir / "truth.csv");
  std::ofstream m(dir / "manifest", std::ios::binary);
  m << "n1=" << ds.n1() << "\nn2=" << ds.n2() << "\nn0=" << ds.n0 << "\nc=" << ds.classes() << "\nd1=" << ds.d1()
    << "\nd2=" << ds.d2() << "\nmode=" << (ds.labels.mode == LabelMode::multi ? "multi" : "single") << "\n";
  if (!m) throw InputError("cannot write manifest in " + dir.string());
}

SemiPairedDataset apply_centering(SemiPairedDataset ds, const CenteringStats& stats) {
  if (stats.mean1.size() != ds.d1() || stats.mean2.size() != ds.d2())
    throw InputError("centering statistics do not match view dimensions");
  ds.view1.rowwise() -= stats.mean1;
  ds.view2.rowwise() -= stats.mean2;
  if (ds.centering.applied) {
    ds.centering.mean1 += stats.mean1;
    ds.centering.mean2 += stats.mean2;
  } else {
    ds.centering = stats;
    ds.centering.applied = true;
  }
  return ds;
}

SemiPairedDataset center_views(SemiPairedDataset ds) {
  CenteringStats stats;
  stats.mean1 = ds.n1() > 0 ? RowVector(ds.view1.colwise().mean()) : RowVector::Zero(ds.d1());
  stats.mean2 = ds.n2() > 0 ? RowVector(ds.view2.colwise().mean()) : RowVector::Zero(ds.d2());
  stats.applied = true;
  return apply_centering(std::move(ds), stats);
}

SemiPairedDataset subset_objects(const SemiPairedDataset& ds, std::span<const Index> globals) {
  std::vector<Index> ids(globals.begin(), globals.end());
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw InputError("duplicate object in subset");
  if (!ids.empty() && (ids.front() < 0 || ids.back() >= ds.size())) throw InputError("object index out of range");

  // Sorted global order already follows (view-1 only, paired, view-2 only).
  std::vector<Index> rows1, rows2;
  Index pairs = 0;
  for (Index g : ids) {
    if (auto r = ds.view1_row(g)) rows1.push_back(*r);
    if (auto r = ds.view2_row(g)) rows2.push_back(*r);
    pairs += ds.has_view1(g) && ds.has_view2(g);
  }
  SemiPairedDataset out;
  out.n0 = pairs;
  out.view1 = ds.view1(rows1, Eigen::all);
  out.view2 = ds.view2(rows2, Eigen::all);
  out.labels = gather_labels(ds.labels, ids);
  out.truth = gather_labels(ds.truth, ids);
  out.centering = ds.centering;
  return out;
}

Split split_train_query(const SemiPairedDataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InputError("train fraction must lie in (0, 1)");
  std::vector<Index> ids(ds.size());
  std::iota(ids.begin(), ids.end(), Index{0});
  Rng rng = make_rng(seed, Stream::split);
  std::shuffle(ids.begin(), ids.end(), rng);
  const Index n_train = rounded_count(train_fraction, ds.size());
  Split s;
  s.train_objects.assign(ids.begin(), ids.begin() + n_train);
  s.query_objects.assign(ids.begin() + n_train, ids.end());
  std::sort(s.train_objects.begin(), s.train_objects.end());
  std::sort(s.query_objects.begin(), s.query_objects.end());
  s.train = subset_objects(ds, s.train_objects);
  s.query = subset_objects(ds, s.query_objects);
  return s;
}

SemiPairedDataset break_pairs(const SemiPairedDataset& ds, double kept_fraction, std::uint64_t seed) {
  if (!(kept_fraction >= 0.0 && kept_fraction <= 1.0)) throw InputError("paired fraction must lie in [0, 1]");
  const Index keep = rounded_count(kept_fraction, ds.n0);
  if (keep == ds.n0) return ds;

  std::vector<Index> order(ds.n0);
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng = make_rng(seed, Stream::pairs);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> kept(ds.n0, false);
  for (Index k = 0; k < keep; ++k) kept[order[k]] = true;

  const Index u1 = ds.unpaired1();
  // Object list in the new global order, each entry naming its source rows.
  struct Obj {
    Index global;  // source global for labels
    Index row1;    // -1 if absent
    Index row2;
  };
  std::vector<Obj> objs;
  for (Index r = 0; r < u1; ++r) objs.push_back({r, r, -1});
  for (Index j = 0; j < ds.n0; ++j)
    if (!kept[j]) objs.push_back({u1 + j, u1 + j, -1});
  for (Index j = 0; j < ds.n0; ++j)
    if (kept[j]) objs.push_back({u1 + j, u1 + j, j});
  for (Index j = 0; j < ds.n0; ++j)
    if (!kept[j]) objs.push_back({u1 + j, -1, j});
  for (Index r = ds.n0; r < ds.n2(); ++r) objs.push_back({ds.global_of_view2(r), -1, r});

  std::vector<Index> rows1, rows2, label_src;
  for (const auto& o : objs) {
    if (o.row1 >= 0) rows1.push_back(o.row1);
    if (o.row2 >= 0) rows2.push_back(o.row2);
    label_src.push_back(o.global);
  }
  SemiPairedDataset out;
  out.n0 = keep;
  out.view1 = ds.view1(rows1, Eigen::all);
  out.view2 = ds.view2(rows2, Eigen::all);
  out.labels = gather_labels(ds.labels, label_src);
  out.truth = gather_labels(ds.truth, label_src);
  out.centering = ds.centering;
  return out;
}

SemiPairedDataset subsample_labels(const SemiPairedDataset& ds, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InputError("labeled fraction must lie in (0, 1]");
  const Index n = ds.size();
  const Index c = ds.classes();
  std::vector<Index> candidates;
  for (Index i = 0; i < n; ++i)
    if (ds.truth.labeled[i]) candidates.push_back(i);
  Index target = std::min<Index>(rounded_count(fraction, n), static_cast<Index>(candidates.size()));
  if (target < c)
    throw InputError("labeled fraction " + std::to_string(fraction) + " leaves fewer labeled samples (" +
                     std::to_string(target) + ") than classes (" + std::to_string(c) + ")");

  Rng rng = make_rng(seed, Stream::labels);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  std::vector<bool> chosen(n, false);
  Index picked = 0;
  // One object per class first (in shuffled order), then fill.
  for (Index j = 0; j < c; ++j) {
    bool covered = false;
    for (Index g : candidates)
      if (chosen[g] && ds.truth.values(g, j) > 0.5) covered = true;
    if (covered) continue;
    auto it = std::find_if(candidates.begin(), candidates.end(),
                           [&](Index g) { return !chosen[g] && ds.truth.values(g, j) > 0.5; });
    if (it == candidates.end())
      throw InputError("class " + std::to_string(j) + " has no labeled sample in the ground truth");
    chosen[*it] = true;
    ++picked;
  }
  for (Index g : candidates) {
    if (picked >= target) break;
    if (!chosen[g]) {
      chosen[g] = true;
      ++picked;
    }
  }
  SemiPairedDataset out = ds;
  out.labels.mode = ds.truth.mode;
  out.labels.values = Matrix::Zero(n, c);
  out.labels.labeled.assign(n, false);
  for (Index g = 0; g < n; ++g)
    if (chosen[g]) {
      out.labels.values.row(g) = ds.truth.values.row(g);
      out.labels.labeled[g] = true;
    }
  return out;
}

SemiPairedDataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const Index n = spec.n1 + spec.n2 - spec.n0;
  const Index c = spec.classes;
  const Index latent_dim = std::max<Index>(8, c);
  Rng rng = make_rng(spec.seed, Stream::synth);

  const Matrix centroids = spec.class_separation * gaussian_matrix(c, latent_dim, rng);
  std::vector<Index> cls(n);
  for (Index i = 0; i < n; ++i) cls[i] = i % c;
  std::shuffle(cls.begin(), cls.end(), rng);

  Matrix latent = gaussian_matrix(n, latent_dim, rng);
  for (Index i = 0; i < n; ++i) latent.row(i) += centroids.row(cls[i]);

  const double scale = 1.0 / std::sqrt(static_cast<double>(latent_dim));
  const Matrix map1 = scale * gaussian_matrix(latent_dim, spec.d1, rng);
  const Matrix map2 = scale * gaussian_matrix(latent_dim, spec.d2, rng);

  SemiPairedDataset ds;
  ds.n0 = spec.n0;
  const Index u1 = spec.n1 - spec.n0;
  ds.view1 = latent.topRows(spec.n1) * map1 + spec.noise_sigma * gaussian_matrix(spec.n1, spec.d1, rng);
  ds.view2 = latent.middleRows(u1, spec.n2) * map2 + spec.noise_sigma * gaussian_matrix(spec.n2, spec.d2, rng);

  ds.truth.mode = LabelMode::single;
  ds.truth.values = Matrix::Zero(n, c);
  ds.truth.labeled.assign(n, true);
  for (Index i = 0; i < n; ++i) ds.truth.values(i, cls[i]) = 1.0;
  ds.labels = ds.truth;
  if (spec.labeled_fraction < 1.0) ds = subsample_labels(ds, spec.labeled_fraction, spec.seed);
  return ds;
}

}  // namespace xvh
