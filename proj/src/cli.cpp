#include "xvh/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csv.hpp"
#include "xvh/codec.hpp"
#include "xvh/dataset.hpp"
#include "xvh/errors.hpp"
#include "xvh/eval.hpp"
#include "xvh/log.hpp"
#include "xvh/pipeline.hpp"
#include "xvh/solver.hpp"

namespace xvh::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::string kGrid = "0.01,0.1,1,10,100,1000";

// Fills options that were not given on the command line from a key=value file.
void apply_config(CLI::App* app, const std::string& path) {
  if (path.empty()) return;
  if (!fs::exists(path)) throw InputError("config file not found: " + path);
  for (const auto& [key, value] : detail::read_key_values(path)) {
    if (key == "config" || key == "help") throw UsageError("config key not allowed: " + key);
    CLI::Option* opt = nullptr;
    try {
      opt = app->get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw UsageError(path + ": unknown key '" + key + "' for " + app->get_name());
    }
    if (opt->count() > 0) continue;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError(path + ": bad value for '" + key + "': " + e.what());
    }
  }
}

void write_effective_config(const CLI::App* app, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      for (std::size_t i = 0; i < res.size(); ++i) value += (i ? "," : "") + res[i];
    } else {
      value = opt->get_default_str();
    }
    out << name << '=' << value << '\n';
  }
}

std::optional<Index> auto_or_index(const std::string& text, const char* name) {
  if (text == "auto") return std::nullopt;
  const long long v = detail::parse_integer(text, name);
  if (v < 1) throw InputError(std::string(name) + " must be >= 1 or auto");
  return static_cast<Index>(v);
}

std::optional<double> auto_or_double(const std::string& text, const char* name) {
  if (text == "auto") return std::nullopt;
  return detail::parse_double(text, name);
}

struct PipelineFlags {
  PipelineConfig cfg;
  std::string anchors = "auto";
  std::string knn = "auto";
  std::string sigma = "auto";
  std::string labeled = "auto";
  std::string judge = "auto";

  PipelineConfig resolve() {
    PipelineConfig out = cfg;
    out.anchors = auto_or_index(anchors, "anchors");
    out.knn = auto_or_index(knn, "knn");
    if (auto s = auto_or_double(sigma, "sigma")) out.sigma = {SigmaPolicy::fixed, *s};
    out.labeled_fraction = auto_or_double(labeled, "labeled-fraction");
    if (out.labeled_fraction && !(*out.labeled_fraction > 0.0 && *out.labeled_fraction <= 1.0))
      throw InputError("labeled-fraction must lie in (0, 1]");
    if (!(out.paired_fraction >= 0.0 && out.paired_fraction <= 1.0))
      throw InputError("paired-fraction must lie in [0, 1]");
    if (judge != "auto") out.judge = parse_judge(judge);
    if (out.workers < 1) throw InputError("workers must be >= 1");
    out.solver.validate();
    return out;
  }
};

void add_solver_flags(CLI::App* app, PipelineFlags& f, bool scalar_weights) {
  SolverConfig& s = f.cfg.solver;
  app->add_option("--seed", f.cfg.seed, "Master seed");
  app->add_option("--code-length", s.code_length, "Code length r");
  if (scalar_weights) {
    app->add_option("--beta", s.beta, "Weight of ||W||^2");
    app->add_option("--gamma", s.gamma, "Weight of the pair-consistency term");
  }
  app->add_option("--lambda", s.lambda, "View-weight smoothness");
  app->add_option("--u-large", s.u_large, "Penalty on labeled rows");
  app->add_option("--ridge", s.ridge.epsilon, "Ridge added to X'X in the projection step");
  app->add_option("--max-iter", s.max_iter, "Maximum alternating passes");
  app->add_option("--rel-tol", s.rel_tol, "Relative objective change that stops the fit");
  app->add_option("--anchors", f.anchors, "Anchor count or auto");
  app->add_option("--knn", f.knn, "Nearest anchors per sample or auto");
  app->add_option("--sigma", f.sigma, "Fixed kernel bandwidth or auto");
  app->add_option("--itq-iters", f.cfg.itq_iters, "ITQ iterations per view");
  app->add_option("--train-fraction", f.cfg.train_fraction, "Fraction of objects used for training");
  app->add_option("--labeled-fraction", f.labeled, "Re-draw training labels at this fraction, or auto");
  app->add_option("--paired-fraction", f.cfg.paired_fraction, "Fraction of training pairs kept");
  app->add_option("--workers", f.cfg.workers, "Worker threads");
}

void add_eval_flags(CLI::App* app, PipelineFlags& f) {
  app->add_option("--R", f.cfg.cutoff, "Retrieval cutoff");
  app->add_option("--judge", f.judge, "single, multi or auto");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InputError("cannot create directory " + dir.string());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

void write_split(const fs::path& path, const Split& split) {
  auto out = open_out(path);
  out << "object,role\n";
  std::vector<std::pair<Index, const char*>> rows;
  for (Index g : split.train_objects) rows.emplace_back(g, "train");
  for (Index g : split.query_objects) rows.emplace_back(g, "query");
  std::sort(rows.begin(), rows.end());
  for (const auto& [g, role] : rows) out << g << ',' << role << '\n';
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name, const fs::path& path) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw InputError(path.filename().string() + ": missing column " + name);
  }
};

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(detail::trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

CsvTable read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("missing input file " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": empty file");
  t.header = split_fields(line);
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != t.header.size())
      throw InputError(path.filename().string() + ": row has " + std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(t.header.size()));
    t.rows.push_back(std::move(fields));
  }
  return t;
}

Split read_split(const fs::path& path, const SemiPairedDataset& raw) {
  const CsvTable t = read_table(path);
  const std::size_t obj = t.column("object", path), role = t.column("role", path);
  Split s;
  std::vector<bool> seen(raw.size(), false);
  for (const auto& row : t.rows) {
    const long long g = detail::parse_integer(row[obj], "split object id");
    if (g < 0 || g >= raw.size() || seen[g]) throw InputError("split.csv does not match the dataset (object " + row[obj] + ")");
    seen[g] = true;
    if (row[role] == "train")
      s.train_objects.push_back(g);
    else if (row[role] == "query")
      s.query_objects.push_back(g);
    else
      throw InputError("split.csv: unknown role " + row[role]);
  }
  if (static_cast<Index>(t.rows.size()) != raw.size()) throw InputError("split.csv does not cover the dataset");
  std::sort(s.train_objects.begin(), s.train_objects.end());
  std::sort(s.query_objects.begin(), s.query_objects.end());
  s.train = subset_objects(raw, s.train_objects);
  s.query = subset_objects(raw, s.query_objects);
  return s;
}

void write_itq_trace(const fs::path& path, const TrainResult& tr) {
  auto out = open_out(path);
  out << "iteration,view1,view2\n";
  const std::size_t n = std::max(tr.itq_trace1.size(), tr.itq_trace2.size());
  for (std::size_t i = 0; i < n; ++i) {
    out << i + 1 << ',';
    if (i < tr.itq_trace1.size()) out << detail::format_double(tr.itq_trace1[i]);
    out << ',';
    if (i < tr.itq_trace2.size()) out << detail::format_double(tr.itq_trace2[i]);
    out << '\n';
  }
}

void print_results(std::ostream& out, const std::vector<RetrievalResult>& results) {
  out << std::left << std::setw(6) << "task" << std::setw(6) << "R" << std::setw(8) << "judge" << std::setw(9)
      << "queries" << std::setw(10) << "excluded"
      << "MAP\n";
  for (const auto& r : results)
    out << std::setw(6) << to_string(r.task) << std::setw(6) << r.cutoff << std::setw(8) << to_string(r.judge)
        << std::setw(9) << r.per_query_ap.size() << std::setw(10) << r.excluded_queries << std::fixed
        << std::setprecision(4) << r.map << std::defaultfloat << '\n';
}

void write_results_csv(const fs::path& path, const std::vector<RetrievalResult>& results, Index code_length) {
  auto out = open_out(path);
  out << "task,r,R,judge,queries,excluded,map\n";
  for (const auto& r : results)
    out << to_string(r.task) << ',' << code_length << ',' << r.cutoff << ',' << to_string(r.judge) << ','
        << r.per_query_ap.size() << ',' << r.excluded_queries << ',' << detail::format_double(r.map) << '\n';
}

// --- commands ---------------------------------------------------------------

struct SynthArgs {
  SyntheticSpec spec;
  std::string out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  require(a.out, "--out");
  const SemiPairedDataset ds = generate_synthetic(a.spec);
  ensure_dir(a.out);
  save_dataset(ds, a.out);
  out << "wrote synthetic dataset to " << a.out << " (n1=" << ds.n1() << " n2=" << ds.n2() << " n0=" << ds.n0
      << " c=" << ds.classes() << ")\n";
  return kOk;
}

struct TrainArgs {
  PipelineFlags flags;
  std::string data, out, config;
};

int cmd_train(TrainArgs& a, const CLI::App* app, std::ostream& out) {
  require(a.data, "--data");
  require(a.out, "--out");
  const PipelineConfig cfg = a.flags.resolve();
  const SemiPairedDataset raw = load_dataset(a.data);
  const Split split = split_train_query(raw, cfg.train_fraction, cfg.seed);
  const TrainResult tr = train_model(split.train, cfg);

  const fs::path dir = a.out;
  ensure_dir(dir);
  save_model(tr.model, dir / "model.xvh");
  {
    auto f = open_out(dir / "trace.csv");
    tr.trace.write_csv(f);
  }
  write_itq_trace(dir / "itq_trace.csv", tr);
  write_split(dir / "split.csv", split);
  write_effective_config(app, dir / "effective.conf");

  const int iters = static_cast<int>(tr.trace.values.size()) - 1;
  if (!tr.trace.converged) warn("fit stopped at max-iter=" + std::to_string(cfg.solver.max_iter) + " before converging");
  out << "trained r=" << tr.model.code_length << " with " << tr.anchors_used << " anchors, k=" << tr.knn_used << ": "
      << iters << " iterations, objective " << detail::format_double(tr.trace.values.back().total())
      << (tr.trace.converged ? " (converged)" : " (not converged)") << "\nwrote " << (dir / "model.xvh").string()
      << '\n';
  return kOk;
}

struct EncodeArgs {
  std::string model, data, out;
  int view = 1;
};

int cmd_encode(const EncodeArgs& a, std::ostream& out) {
  require(a.model, "--model");
  require(a.data, "--data");
  require(a.out, "--out");
  const HashModel model = load_model(a.model);
  const SemiPairedDataset ds = load_dataset(a.data);
  const BinaryCodes codes = encode(ds.view(a.view), model, a.view);
  save_codes(codes, a.out);
  out << "encoded " << codes.rows() << " view-" << a.view << " samples to " << a.out << '\n';
  return kOk;
}

struct EvalArgs {
  PipelineFlags flags;
  std::string data, model_dir, out, config, task = "both";
};

int cmd_eval(EvalArgs& a, const CLI::App* app, std::ostream& out) {
  require(a.data, "--data");
  require(a.model_dir, "--model-dir");
  const PipelineConfig cfg = a.flags.resolve();
  const fs::path mdir = a.model_dir;
  const HashModel model = load_model(mdir / "model.xvh");
  const SemiPairedDataset raw = load_dataset(a.data);
  const Split split = read_split(mdir / "split.csv", raw);
  const JudgeMode judge = judge_for(raw, cfg);

  std::vector<Task> tasks;
  if (a.task == "both")
    tasks = {Task::image_to_text, Task::text_to_image};
  else
    tasks = {parse_task(a.task)};

  std::vector<RetrievalResult> results;
  for (Task t : tasks) {
    const int qv = query_view(t), dv = database_view(t);
    if (split.query.view(qv).rows() == 0) throw InputError("no query samples in view " + std::to_string(qv));
    if (split.train.view(dv).rows() == 0) throw InputError("no database samples in view " + std::to_string(dv));
    const BinaryCodes qc = encode(split.query.view(qv), model, qv);
    const BinaryCodes dc = encode(split.train.view(dv), model, dv);
    results.push_back(evaluate_codes(qc, view_truth(split.query, qv), dc, view_truth(split.train, dv), t, cfg.cutoff,
                                     judge, cfg.workers));
    if (!a.out.empty()) {
      ensure_dir(a.out);
      save_codes(qc, fs::path(a.out) / (to_string(t) + "_query.codes"));
      save_codes(dc, fs::path(a.out) / (to_string(t) + "_database.codes"));
    }
  }
  print_results(out, results);
  if (!a.out.empty()) {
    write_results_csv(fs::path(a.out) / "eval.csv", results, model.code_length);
    write_effective_config(app, fs::path(a.out) / "effective.conf");
  }
  return kOk;
}

struct SweepArgs {
  PipelineFlags flags;
  std::string data, out, config;
  std::vector<double> betas{0.01, 0.1, 1, 10, 100, 1000};
  std::vector<double> gammas{0.01, 0.1, 1, 10, 100, 1000};
  std::vector<double> labeled_sweep;
  std::vector<double> paired_sweep;
};

int cmd_sweep(SweepArgs& a, const CLI::App* app, std::ostream& out) {
  require(a.data, "--data");
  require(a.out, "--out");
  PipelineConfig cfg = a.flags.resolve();
  const SemiPairedDataset raw = load_dataset(a.data);
  const fs::path dir = a.out;
  ensure_dir(dir);

  const SweepTable table = sweep(raw, a.betas, a.gammas, cfg);
  {
    auto f = open_out(dir / "grid.csv");
    write_sweep_csv(f, table, cfg);
  }
  {
    auto f = open_out(dir / "grid.txt");
    write_sweep_text(f, table);
  }
  write_sweep_text(out, table);
  for (const auto& [name, best] : {std::pair{"i2t", table.best_i2t}, std::pair{"t2i", table.best_t2i}}) {
    if (!best) continue;
    auto f = open_out(dir / (std::string("trace_") + name + ".csv"));
    table.cells[*best].trace.write_csv(f);
  }
  const Index failed = std::count_if(table.cells.begin(), table.cells.end(), [](const SweepCell& c) { return !c.ok; });
  if (failed > 0) warn(std::to_string(failed) + " sweep cell(s) failed; see grid.txt");

  // Fraction sweeps run at the best image-to-text cell.
  if (table.best_i2t) {
    cfg.solver.beta = table.cells[*table.best_i2t].beta;
    cfg.solver.gamma = table.cells[*table.best_i2t].gamma;
  }
  for (const auto& [axis, list] : {std::pair{FractionAxis::labeled, &a.labeled_sweep},
                                   std::pair{FractionAxis::paired, &a.paired_sweep}}) {
    if (list->empty()) continue;
    const auto points = fraction_sweep(raw, axis, *list, cfg);
    auto f = open_out(dir / ("fraction_" + to_string(axis) + ".csv"));
    write_fraction_csv(f, axis, points, cfg);
    out << to_string(axis) << " fraction sweep: " << points.size() << " points\n";
  }
  write_effective_config(app, dir / "effective.conf");
  return table.best_i2t || table.best_t2i ? kOk : kError;
}

struct ReportArgs {
  std::string sweep_dir, out;
};

void report_fraction(const fs::path& src, const fs::path& dst, const char* axis_column) {
  const CsvTable t = read_table(src);
  const std::size_t task = t.column("task", src), frac = t.column(axis_column, src), map = t.column("map", src),
                    status = t.column("status", src);
  auto out = open_out(dst);
  out << "task," << axis_column << ",map\n";
  for (const auto& row : t.rows)
    if (row[status] == "ok") out << row[task] << ',' << row[frac] << ',' << row[map] << '\n';
}

int cmd_report(const ReportArgs& a, std::ostream& out) {
  require(a.sweep_dir, "--sweep-dir");
  require(a.out, "--out");
  const fs::path src = a.sweep_dir, dst = a.out;
  for (const char* name : {"grid.csv", "fraction_labeled.csv", "fraction_paired.csv", "trace_i2t.csv"})
    if (!fs::exists(src / name))
      throw InputError("report needs " + (src / name).string() +
                       "; run sweep with --labeled-sweep and --paired-sweep first");
  ensure_dir(dst);
  report_fraction(src / "fraction_labeled.csv", dst / "fig2.csv", "labeled_fraction");
  report_fraction(src / "fraction_paired.csv", dst / "fig3.csv", "paired_fraction");
  {
    const fs::path p = src / "trace_i2t.csv";
    const CsvTable t = read_table(p);
    const std::size_t it = t.column("iteration", p), total = t.column("total", p);
    auto f = open_out(dst / "fig4.csv");
    f << "iteration,objective\n";
    for (const auto& row : t.rows) f << row[it] << ',' << row[total] << '\n';
  }
  {
    const fs::path p = src / "grid.csv";
    const CsvTable t = read_table(p);
    const std::size_t task = t.column("task", p), beta = t.column("beta", p), gamma = t.column("gamma", p),
                      map = t.column("map", p), status = t.column("status", p);
    auto f = open_out(dst / "fig5.csv");
    f << "task,beta,gamma,map\n";
    for (const auto& row : t.rows)
      if (row[status] == "ok") f << row[task] << ',' << row[beta] << ',' << row[gamma] << ',' << row[map] << '\n';
  }
  out << "wrote fig2.csv fig3.csv fig4.csv fig5.csv to " << dst.string() << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  WarningSink previous = set_warning_sink([&err](std::string_view msg) { err << "warning: " << msg << '\n'; });
  struct RestoreSink {
    WarningSink sink;
    ~RestoreSink() { set_warning_sink(std::move(sink)); }
  } restore{std::move(previous)};

  CLI::App app{"Semi-supervised hashing for semi-paired cross-view retrieval", "xvh"};
  app.require_subcommand(1, 1);
  app.option_defaults()->always_capture_default();

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic semi-paired dataset");
  synth_cmd->add_option("--n1", synth.spec.n1, "Samples with view 1");
  synth_cmd->add_option("--n2", synth.spec.n2, "Samples with view 2");
  synth_cmd->add_option("--n0", synth.spec.n0, "Paired samples");
  synth_cmd->add_option("--d1", synth.spec.d1, "View-1 dimension");
  synth_cmd->add_option("--d2", synth.spec.d2, "View-2 dimension");
  synth_cmd->add_option("--c", synth.spec.classes, "Classes");
  synth_cmd->add_option("--labeled", synth.spec.labeled_fraction, "Fraction of labeled objects");
  synth_cmd->add_option("--noise", synth.spec.noise_sigma, "Per-view noise standard deviation");
  synth_cmd->add_option("--separation", synth.spec.class_separation, "Class centroid scale");
  synth_cmd->add_option("--seed", synth.spec.seed, "Seed");
  synth_cmd->add_option("--out", synth.out, "Output dataset directory");

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "Fit a hash model on the training split of a dataset");
  train_cmd->add_option("--config", train.config, "key=value config file");
  train_cmd->add_option("--data", train.data, "Dataset directory");
  train_cmd->add_option("--out", train.out, "Output directory");
  add_solver_flags(train_cmd, train.flags, true);

  EncodeArgs enc;
  CLI::App* enc_cmd = app.add_subcommand("encode", "Encode one view of a dataset into a code file");
  enc_cmd->add_option("--model", enc.model, "Model file");
  enc_cmd->add_option("--data", enc.data, "Dataset directory");
  enc_cmd->add_option("--view", enc.view, "View to encode (1 or 2)")->check(CLI::IsMember({1, 2}));
  enc_cmd->add_option("--out", enc.out, "Output code file");

  EvalArgs ev;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Cross-view retrieval MAP of a trained model");
  eval_cmd->add_option("--config", ev.config, "key=value config file");
  eval_cmd->add_option("--data", ev.data, "Dataset directory used for training");
  eval_cmd->add_option("--model-dir", ev.model_dir, "Directory written by train");
  eval_cmd->add_option("--task", ev.task, "i2t, t2i or both")->check(CLI::IsMember({"i2t", "t2i", "both"}));
  eval_cmd->add_option("--workers", ev.flags.cfg.workers, "Worker threads");
  eval_cmd->add_option("--out", ev.out, "Directory for eval.csv and code files");
  add_eval_flags(eval_cmd, ev.flags);

  SweepArgs sw;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "beta/gamma grid and fraction sweeps");
  sweep_cmd->add_option("--config", sw.config, "key=value config file");
  sweep_cmd->add_option("--data", sw.data, "Dataset directory");
  sweep_cmd->add_option("--out", sw.out, "Output directory");
  sweep_cmd->add_option("--beta", sw.betas, "Comma-separated beta values")->delimiter(',')->default_str(kGrid);
  sweep_cmd->add_option("--gamma", sw.gammas, "Comma-separated gamma values")->delimiter(',')->default_str(kGrid);
  sweep_cmd->add_option("--labeled-sweep", sw.labeled_sweep, "Labeled fractions to sweep")
      ->delimiter(',')
      ->default_str("");
  sweep_cmd->add_option("--paired-sweep", sw.paired_sweep, "Paired fractions to sweep")
      ->delimiter(',')
      ->default_str("");
  add_solver_flags(sweep_cmd, sw.flags, false);
  add_eval_flags(sweep_cmd, sw.flags);

  ReportArgs rep;
  CLI::App* report_cmd = app.add_subcommand("report", "Figure-ready CSVs from a finished sweep");
  report_cmd->add_option("--sweep-dir", rep.sweep_dir, "Directory written by sweep");
  report_cmd->add_option("--out", rep.out, "Output directory");

  try {
    app.parse(argc, argv);
    if (train_cmd->parsed()) {
      apply_config(train_cmd, train.config);
      return cmd_train(train, train_cmd, out);
    }
    if (eval_cmd->parsed()) {
      apply_config(eval_cmd, ev.config);
      return cmd_eval(ev, eval_cmd, out);
    }
    if (sweep_cmd->parsed()) {
      apply_config(sweep_cmd, sw.config);
      return cmd_sweep(sw, sweep_cmd, out);
    }
    if (synth_cmd->parsed()) return cmd_synth(synth, out);
    if (enc_cmd->parsed()) return cmd_encode(enc, out);
    if (report_cmd->parsed()) return cmd_report(rep, out);
    return kUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ObjectiveIncreaseError& e) {
    err << "error: " << e.what() << '\n';
    return kObjectiveIncrease;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
}

}  // namespace xvh::cli
