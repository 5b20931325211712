#include "xvh/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <iomanip>
#include <ostream>
#include <thread>

#include "csv.hpp"
#include "xvh/errors.hpp"
#include "xvh/quantize.hpp"
#include "xvh/random.hpp"

namespace xvh {

SemiPairedDataset prepare_training_set(const SemiPairedDataset& train_raw, const PipelineConfig& cfg) {
  SemiPairedDataset ds = train_raw;
  if (cfg.labeled_fraction) ds = subsample_labels(ds, *cfg.labeled_fraction, cfg.seed);
  if (cfg.paired_fraction < 1.0) ds = break_pairs(ds, cfg.paired_fraction, cfg.seed);
  return ds;
}

JudgeMode judge_for(const SemiPairedDataset& ds, const PipelineConfig& cfg) {
  if (cfg.judge) return *cfg.judge;
  return ds.truth.mode == LabelMode::multi ? JudgeMode::multi_label : JudgeMode::single_label;
}

TrainResult train_model(const SemiPairedDataset& train_raw, const PipelineConfig& cfg) {
  if (cfg.itq_iters < 1) throw InputError("ITQ iterations must be >= 1");
  const SemiPairedDataset ds = center_views(prepare_training_set(train_raw, cfg));

  TrainResult out;
  out.anchors_used = cfg.anchors.value_or(std::min(default_anchor_count(ds.n0), ds.n0));
  out.knn_used = cfg.knn.value_or(out.anchors_used);
  const AnchorSet anchors = select_anchors(ds, out.anchors_used, cfg.seed);
  const AnchorGraph graph = build_anchor_graph(ds, anchors, out.knn_used, cfg.sigma, cfg.workers);

  SolverConfig solver = cfg.solver;
  solver.seed = cfg.seed;
  FitResult fitted = fit(ds, graph, solver);

  // Both views start from the same rotation so their bits stay aligned.
  Rng itq_rng = make_rng(cfg.seed, Stream::itq);
  const Matrix start = random_rotation(solver.code_length, itq_rng);
  const ItqResult itq1 = itq_fit(ds.view1 * fitted.params.q1, cfg.itq_iters, start);
  const ItqResult itq2 = itq_fit(ds.view2 * fitted.params.q2, cfg.itq_iters, start);

  out.model.code_length = solver.code_length;
  out.model.views[0] = {fitted.params.q1, itq1.rotation, ds.centering.mean1};
  out.model.views[1] = {fitted.params.q2, itq2.rotation, ds.centering.mean2};
  out.params = std::move(fitted.params);
  out.trace = std::move(fitted.trace);
  out.itq_trace1 = itq1.error_trace;
  out.itq_trace2 = itq2.error_trace;
  return out;
}

PipelineResult run_pipeline(const SemiPairedDataset& raw, const PipelineConfig& cfg) {
  const Split split = split_train_query(raw, cfg.train_fraction, cfg.seed);
  PipelineResult out;
  out.training = train_model(split.train, cfg);
  const JudgeMode judge = judge_for(raw, cfg);
  out.i2t = run_cross_view_task(out.training.model, split.query, split.train, Task::image_to_text, cfg.cutoff, judge,
                                cfg.workers);
  out.t2i = run_cross_view_task(out.training.model, split.query, split.train, Task::text_to_image, cfg.cutoff, judge,
                                cfg.workers);
  return out;
}

namespace {

template <typename Fn>
void for_each_index(std::size_t count, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  for (unsigned w = 0; w < workers; ++w)
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  for (auto& t : threads) t.join();
}

std::optional<std::size_t> argmax_ok(const std::vector<SweepCell>& cells, double SweepCell::*field) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (cells[i].ok && (!best || cells[i].*field > cells[*best].*field)) best = i;
  return best;
}

}  // namespace

SweepTable sweep(const SemiPairedDataset& raw, const std::vector<double>& betas, const std::vector<double>& gammas,
                 const PipelineConfig& cfg) {
  if (betas.empty() || gammas.empty()) throw InputError("sweep grid must contain at least one beta and one gamma");
  SweepTable table;
  for (double b : betas)
    for (double g : gammas) {
      SweepCell cell;
      cell.beta = b;
      cell.gamma = g;
      table.cells.push_back(cell);
    }
  for_each_index(table.cells.size(), cfg.workers, [&](std::size_t i) {
    SweepCell& cell = table.cells[i];
    PipelineConfig local = cfg;
    local.workers = 1;
    local.solver.beta = cell.beta;
    local.solver.gamma = cell.gamma;
    try {
      const PipelineResult r = run_pipeline(raw, local);
      cell.ok = true;
      cell.map_i2t = r.i2t.map;
      cell.map_t2i = r.t2i.map;
      cell.iterations = static_cast<int>(r.training.trace.values.size()) - 1;
      cell.trace = r.training.trace;
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
  });
  table.best_i2t = argmax_ok(table.cells, &SweepCell::map_i2t);
  table.best_t2i = argmax_ok(table.cells, &SweepCell::map_t2i);
  return table;
}

std::string to_string(FractionAxis axis) { return axis == FractionAxis::labeled ? "labeled" : "paired"; }

FractionAxis parse_axis(const std::string& text) {
  if (text == "labeled") return FractionAxis::labeled;
  if (text == "paired") return FractionAxis::paired;
  throw InputError("fraction axis must be labeled or paired, got '" + text + "'");
}

std::vector<FractionPoint> fraction_sweep(const SemiPairedDataset& raw, FractionAxis axis,
                                          const std::vector<double>& fractions, const PipelineConfig& cfg) {
  for (double f : fractions)
    if (!(f > 0.0 && f <= 1.0)) throw InputError("sweep fractions must lie in (0, 1]");
  std::vector<FractionPoint> points(fractions.size());
  for_each_index(fractions.size(), cfg.workers, [&](std::size_t i) {
    FractionPoint& pt = points[i];
    pt.fraction = fractions[i];
    PipelineConfig local = cfg;
    local.workers = 1;
    if (axis == FractionAxis::labeled)
      local.labeled_fraction = fractions[i];
    else
      local.paired_fraction = fractions[i];
    try {
      const PipelineResult r = run_pipeline(raw, local);
      pt.ok = true;
      pt.map_i2t = r.i2t.map;
      pt.map_t2i = r.t2i.map;
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
  });
  return points;
}

namespace {

std::string optional_fraction(const std::optional<double>& v) {
  return v ? detail::format_double(*v) : std::string();
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepTable& table, const PipelineConfig& cfg) {
  using detail::format_double;
  out << "task,r,beta,gamma,labeled_fraction,paired_fraction,map,status\n";
  for (const char* task : {"i2t", "t2i"})
    for (const auto& cell : table.cells) {
      const double map = std::string(task) == "i2t" ? cell.map_i2t : cell.map_t2i;
      out << task << ',' << cfg.solver.code_length << ',' << format_double(cell.beta) << ','
          << format_double(cell.gamma) << ',' << optional_fraction(cfg.labeled_fraction) << ','
          << format_double(cfg.paired_fraction) << ',' << (cell.ok ? format_double(map) : std::string()) << ','
          << (cell.ok ? "ok" : "failed") << '\n';
    }
}

void write_sweep_text(std::ostream& out, const SweepTable& table) {
  out << std::left << std::setw(10) << "beta" << std::setw(10) << "gamma" << std::setw(10) << "I->T" << std::setw(10)
      << "T->I"
      << "iters\n";
  out << std::fixed << std::setprecision(4);
  for (const auto& c : table.cells) {
    out << std::setw(10) << detail::format_double(c.beta) << std::setw(10) << detail::format_double(c.gamma);
    if (c.ok)
      out << std::setw(10) << c.map_i2t << std::setw(10) << c.map_t2i << c.iterations << '\n';
    else
      out << "failed: " << c.error << '\n';
  }
  auto best = [&](const char* name, const std::optional<std::size_t>& idx, double SweepCell::*field) {
    out << "best " << name << ": ";
    if (!idx)
      out << "none\n";
    else
      out << "beta=" << detail::format_double(table.cells[*idx].beta)
          << " gamma=" << detail::format_double(table.cells[*idx].gamma) << " map=" << table.cells[*idx].*field
          << '\n';
  };
  best("I->T", table.best_i2t, &SweepCell::map_i2t);
  best("T->I", table.best_t2i, &SweepCell::map_t2i);
  out.unsetf(std::ios::floatfield);
}

void write_fraction_csv(std::ostream& out, FractionAxis axis, const std::vector<FractionPoint>& points,
                        const PipelineConfig& cfg) {
  using detail::format_double;
  out << "task,r,beta,gamma,labeled_fraction,paired_fraction,map,status\n";
  for (const char* task : {"i2t", "t2i"})
    for (const auto& p : points) {
      const double map = std::string(task) == "i2t" ? p.map_i2t : p.map_t2i;
      const std::string labeled =
          axis == FractionAxis::labeled ? format_double(p.fraction) : optional_fraction(cfg.labeled_fraction);
      const double paired = axis == FractionAxis::paired ? p.fraction : cfg.paired_fraction;
      out << task << ',' << cfg.solver.code_length << ',' << format_double(cfg.solver.beta) << ','
          << format_double(cfg.solver.gamma) << ',' << labeled << ',' << format_double(paired) << ','
          << (p.ok ? format_double(map) : std::string()) << ',' << (p.ok ? "ok" : "failed") << '\n';
    }
}

}  // namespace xvh
