#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xvh/codec.hpp"
#include "xvh/dataset.hpp"

namespace xvh {

// Image is view 2 and text is view 1.
enum class Task { image_to_text, text_to_image };

enum class JudgeMode { single_label, multi_label };

std::string to_string(Task task);
std::string to_string(JudgeMode mode);
Task parse_task(const std::string& text);  // "i2t" | "t2i"
JudgeMode parse_judge(const std::string& text);  // "single" | "multi"

inline int query_view(Task t) { return t == Task::image_to_text ? 2 : 1; }
inline int database_view(Task t) { return t == Task::image_to_text ? 1 : 2; }

// Same class (single-label) or at least one shared label (multi-label).
bool relevant(const RowVector& query_labels, const RowVector& item_labels, JudgeMode mode);

// (1 / l) * sum over relevant positions m of (relevant in top m) / m, where
// l is the number of relevant flags; 0 when nothing is relevant.
double average_precision(const std::vector<bool>& relevant_flags);

struct RetrievalResult {
  Task task = Task::image_to_text;
  Index cutoff = 50;
  JudgeMode judge = JudgeMode::single_label;
  std::vector<double> per_query_ap;
  double map = 0.0;
  // Queries without ground truth, which cannot be judged.
  Index excluded_queries = 0;
};

// Encodes the query set with the query view's hash function and the database
// with the other view's, ranks by Hamming distance and scores MAP@R against
// the ground-truth labels. Database items without ground truth are never
// relevant. The cutoff is clamped to the database size.
RetrievalResult run_cross_view_task(const HashModel& model, const SemiPairedDataset& queries,
                                    const SemiPairedDataset& database, Task task, Index cutoff, JudgeMode judge,
                                    unsigned workers = 1);

// Same, on precomputed codes: `query_truth` and `database_truth` hold one
// label row per code row.
RetrievalResult evaluate_codes(const BinaryCodes& query_codes, const LabelMatrix& query_truth,
                               const BinaryCodes& database_codes, const LabelMatrix& database_truth, Task task,
                               Index cutoff, JudgeMode judge, unsigned workers = 1);

// Ground-truth label rows of one view, in view-row order.
LabelMatrix view_truth(const SemiPairedDataset& ds, int view);

// Seeded Gaussian projections per view, identity rotations. Means are the
// dataset's centering statistics when present, otherwise its column means.
HashModel baseline_random_projection(const SemiPairedDataset& ds, Index code_length, std::uint64_t seed);

struct CcaResult {
  HashModel model;
  Vector correlations;  // top r canonical correlations, descending
};

// Canonical directions of the paired subset from the whitened
// cross-covariance, with covariance blocks ridged by
// `ridge * mean diagonal`.
CcaResult baseline_cca(const SemiPairedDataset& ds, Index code_length, double ridge = 1e-8);

}  // namespace xvh
