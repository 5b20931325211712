#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "xvh/codec.hpp"
#include "xvh/eval.hpp"
#include "xvh/graph.hpp"
#include "xvh/solver.hpp"

namespace xvh {

// Everything needed to go from a raw dataset to MAP numbers.
struct PipelineConfig {
  SolverConfig solver;
  std::optional<Index> anchors;  // default: default_anchor_count(n0), capped at n0
  std::optional<Index> knn;      // default: the anchor count
  SigmaSetting sigma;
  int itq_iters = 50;
  double train_fraction = 0.7;
  // Re-draw visible training labels from the ground truth at this fraction.
  std::optional<double> labeled_fraction;
  // Fraction of training pairs kept intact; the rest are split into singles.
  double paired_fraction = 1.0;
  Index cutoff = 50;
  std::optional<JudgeMode> judge;  // default: from the dataset's label mode
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct TrainResult {
  HashModel model;
  ModelParams params;
  ObjectiveTrace trace;
  std::vector<double> itq_trace1;
  std::vector<double> itq_trace2;
  Index anchors_used = 0;
  Index knn_used = 0;
};

// center -> anchors -> graph -> fit -> ITQ per view, on a raw training set.
TrainResult train_model(const SemiPairedDataset& train_raw, const PipelineConfig& cfg);

// Applies the configured label/pair subsampling to a raw training split.
SemiPairedDataset prepare_training_set(const SemiPairedDataset& train_raw, const PipelineConfig& cfg);

JudgeMode judge_for(const SemiPairedDataset& ds, const PipelineConfig& cfg);

struct PipelineResult {
  TrainResult training;
  RetrievalResult i2t;
  RetrievalResult t2i;
};

// Split, train on the training part, evaluate both tasks with the query part
// as queries and the training part as the retrieval database.
PipelineResult run_pipeline(const SemiPairedDataset& raw, const PipelineConfig& cfg);

struct SweepCell {
  double beta = 0.0;
  double gamma = 0.0;
  bool ok = false;
  std::string error;
  double map_i2t = 0.0;
  double map_t2i = 0.0;
  int iterations = 0;
  ObjectiveTrace trace;
};

struct SweepTable {
  std::vector<SweepCell> cells;  // beta-major order
  std::optional<std::size_t> best_i2t;
  std::optional<std::size_t> best_t2i;
};

// Full pipeline per (beta, gamma) cell; a failing cell is recorded and the
// sweep continues. Cells run on up to `cfg.workers` threads and are merged in
// grid order.
SweepTable sweep(const SemiPairedDataset& raw, const std::vector<double>& betas, const std::vector<double>& gammas,
                 const PipelineConfig& cfg);

enum class FractionAxis { labeled, paired };
std::string to_string(FractionAxis axis);
FractionAxis parse_axis(const std::string& text);

struct FractionPoint {
  double fraction = 0.0;
  bool ok = false;
  std::string error;
  double map_i2t = 0.0;
  double map_t2i = 0.0;
};

std::vector<FractionPoint> fraction_sweep(const SemiPairedDataset& raw, FractionAxis axis,
                                          const std::vector<double>& fractions, const PipelineConfig& cfg);

// CSV: task rows with columns task,r,beta,gamma,labeled_fraction,paired_fraction,map
void write_sweep_csv(std::ostream& out, const SweepTable& table, const PipelineConfig& cfg);
void write_sweep_text(std::ostream& out, const SweepTable& table);
void write_fraction_csv(std::ostream& out, FractionAxis axis, const std::vector<FractionPoint>& points,
                        const PipelineConfig& cfg);

}  // namespace xvh
