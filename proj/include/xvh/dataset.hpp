#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace xvh {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

enum class LabelMode { single, multi };

// n x c binary matrix in global sample order. Rows whose flag is false are
// all zero; the flag distinguishes "unlabeled" from "labeled with no class".
struct LabelMatrix {
  Matrix values;
  std::vector<bool> labeled;
  LabelMode mode = LabelMode::single;

  Index rows() const { return values.rows(); }
  Index classes() const { return values.cols(); }
  Index labeled_count() const;
  // Classes that have no labeled sample.
  std::vector<Index> uncovered_classes() const;
};

struct CenteringStats {
  RowVector mean1;
  RowVector mean2;
  bool applied = false;
};

// Two feature views of n objects where only n0 objects are observed in both.
//
// Global layout (fixed throughout the library):
//   [0, n1 - n0)   view-1 only     view1 rows [0, n1 - n0)
//   [n1 - n0, n1)  paired          view1 rows [n1 - n0, n1), view2 rows [0, n0)
//   [n1, n)        view-2 only     view2 rows [n0, n2)
//
// `labels` is what training may see. `truth` carries the ground truth used
// only for evaluation; it equals `labels` unless a truth file was supplied.
struct SemiPairedDataset {
  Matrix view1;
  Matrix view2;
  Index n0 = 0;
  LabelMatrix labels;
  LabelMatrix truth;
  CenteringStats centering;

  Index n1() const { return view1.rows(); }
  Index n2() const { return view2.rows(); }
  Index d1() const { return view1.cols(); }
  Index d2() const { return view2.cols(); }
  Index size() const { return n1() + n2() - n0; }
  Index classes() const { return labels.classes(); }
  Index unpaired1() const { return n1() - n0; }

  bool has_view1(Index global) const { return global < n1(); }
  bool has_view2(Index global) const { return global >= unpaired1(); }
  Index global_of_view1(Index row) const { return row; }
  Index global_of_view2(Index row) const { return unpaired1() + row; }
  std::optional<Index> view1_row(Index global) const;
  std::optional<Index> view2_row(Index global) const;

  const Matrix& view(int v) const { return v == 1 ? view1 : view2; }

  // Selection operators realized as row blocks. For an n x c matrix F,
  // T1 F = F.topRows(n1) and T2 F = F.bottomRows(n2); the paired blocks of
  // each view are M1 X1 and M2 X2.
  template <typename Derived>
  auto select_view1(const Eigen::MatrixBase<Derived>& f) const {
    return f.topRows(n1());
  }
  template <typename Derived>
  auto select_view2(const Eigen::MatrixBase<Derived>& f) const {
    return f.bottomRows(n2());
  }
  auto paired_view1() const { return view1.bottomRows(n0); }
  auto paired_view2() const { return view2.topRows(n0); }

  // Throws InputError describing the first violated invariant.
  void validate() const;
};

struct SyntheticSpec {
  Index n1 = 220;
  Index n2 = 220;
  Index n0 = 120;
  Index d1 = 48;
  Index d2 = 40;
  Index classes = 4;
  double labeled_fraction = 0.5;
  double noise_sigma = 0.5;
  // Scale of the class centroids relative to the unit within-class spread.
  double class_separation = 1.5;
  std::uint64_t seed = 7;

  void validate() const;
};

SemiPairedDataset load_dataset(const std::filesystem::path& dir);
// Writes view1.csv, view2.csv, labels.csv, manifest and, when the ground
// truth differs from the visible labels, truth.csv.
void save_dataset(const SemiPairedDataset& ds, const std::filesystem::path& dir);

// Subtracts per-view column means and accumulates them in `centering`.
SemiPairedDataset center_views(SemiPairedDataset ds);
// Centers with externally supplied means (query-time reuse of training stats).
SemiPairedDataset apply_centering(SemiPairedDataset ds, const CenteringStats& stats);

// Keeps the given objects (global indices, any order) in canonical layout.
SemiPairedDataset subset_objects(const SemiPairedDataset& ds, std::span<const Index> globals);

struct Split {
  SemiPairedDataset train;
  SemiPairedDataset query;
  std::vector<Index> train_objects;
  std::vector<Index> query_objects;
};

Split split_train_query(const SemiPairedDataset& ds, double train_fraction, std::uint64_t seed);

// Keeps round(fraction * n0) randomly chosen pairs; the others become one
// view-1-only object and one view-2-only object with the same labels.
SemiPairedDataset break_pairs(const SemiPairedDataset& ds, double kept_fraction, std::uint64_t seed);

// Re-draws the visible labels from the ground truth so that
// round(fraction * n) objects are labeled and every class is covered.
SemiPairedDataset subsample_labels(const SemiPairedDataset& ds, double fraction, std::uint64_t seed);

SemiPairedDataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace xvh
