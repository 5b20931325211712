#include "xvh/eval.hpp"

#include <algorithm>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "xvh/errors.hpp"
#include "xvh/random.hpp"

namespace xvh {

std::string to_string(Task task) { return task == Task::image_to_text ? "i2t" : "t2i"; }

std::string to_string(JudgeMode mode) { return mode == JudgeMode::single_label ? "single" : "multi"; }

Task parse_task(const std::string& text) {
  if (text == "i2t") return Task::image_to_text;
  if (text == "t2i") return Task::text_to_image;
  throw InputError("task must be i2t or t2i, got '" + text + "'");
}

JudgeMode parse_judge(const std::string& text) {
  if (text == "single") return JudgeMode::single_label;
  if (text == "multi") return JudgeMode::multi_label;
  throw InputError("judge must be single or multi, got '" + text + "'");
}

bool relevant(const RowVector& query_labels, const RowVector& item_labels, JudgeMode mode) {
  if (mode == JudgeMode::multi_label) return (query_labels.array() * item_labels.array()).sum() > 0.5;
  Index qa = 0, ia = 0;
  const double qmax = query_labels.maxCoeff(&qa);
  const double imax = item_labels.maxCoeff(&ia);
  return qmax > 0.5 && imax > 0.5 && qa == ia;
}

double average_precision(const std::vector<bool>& relevant_flags) {
  double sum = 0.0;
  Index hits = 0;
  for (std::size_t m = 0; m < relevant_flags.size(); ++m) {
    if (!relevant_flags[m]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(m + 1);
  }
  return hits == 0 ? 0.0 : sum / static_cast<double>(hits);
}

LabelMatrix view_truth(const SemiPairedDataset& ds, int view) {
  const Index rows = view == 1 ? ds.n1() : ds.n2();
  LabelMatrix out;
  out.mode = ds.truth.mode;
  out.values.resize(rows, ds.classes());
  out.labeled.resize(rows);
  for (Index r = 0; r < rows; ++r) {
    const Index g = view == 1 ? ds.global_of_view1(r) : ds.global_of_view2(r);
    out.values.row(r) = ds.truth.values.row(g);
    out.labeled[r] = ds.truth.labeled[g];
  }
  return out;
}

RetrievalResult evaluate_codes(const BinaryCodes& query_codes, const LabelMatrix& query_truth,
                               const BinaryCodes& database_codes, const LabelMatrix& database_truth, Task task,
                               Index cutoff, JudgeMode judge, unsigned workers) {
  if (query_codes.rows() != query_truth.rows() || database_codes.rows() != database_truth.rows())
    throw InputError("evaluate_codes: label rows do not match code rows");
  if (cutoff < 1) throw InputError("retrieval cutoff R must be >= 1");
  const Index top = std::min(cutoff, database_codes.rows());
  const Index nq = query_codes.rows();

  std::vector<double> ap(nq, -1.0);
  auto work = [&](Index begin, Index end) {
    for (Index q = begin; q < end; ++q) {
      if (!query_truth.labeled[q]) continue;
      const auto ranked = rank_by_hamming(query_codes.row(q), database_codes, top);
      std::vector<bool> flags(ranked.size());
      const RowVector ql = query_truth.values.row(q);
      for (std::size_t m = 0; m < ranked.size(); ++m) {
        const Index i = ranked[m];
        flags[m] = database_truth.labeled[i] && relevant(ql, database_truth.values.row(i), judge);
      }
      ap[q] = average_precision(flags);
    }
  };
  workers = std::max(1u, workers);
  if (workers == 1 || nq < 2) {
    work(0, nq);
  } else {
    std::vector<std::thread> threads;
    const Index chunk = (nq + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const Index b = std::min<Index>(nq, w * chunk), e = std::min<Index>(nq, b + chunk);
      if (b < e) threads.emplace_back(work, b, e);
    }
    for (auto& t : threads) t.join();
  }

  RetrievalResult res;
  res.task = task;
  res.cutoff = cutoff;
  res.judge = judge;
  double sum = 0.0;
  for (Index q = 0; q < nq; ++q) {
    if (!query_truth.labeled[q]) {
      ++res.excluded_queries;
      continue;
    }
    res.per_query_ap.push_back(ap[q]);
    sum += ap[q];
  }
  res.map = res.per_query_ap.empty() ? 0.0 : sum / static_cast<double>(res.per_query_ap.size());
  return res;
}

RetrievalResult run_cross_view_task(const HashModel& model, const SemiPairedDataset& queries,
                                    const SemiPairedDataset& database, Task task, Index cutoff, JudgeMode judge,
                                    unsigned workers) {
  const int qv = query_view(task);
  const int dv = database_view(task);
  const Matrix& qx = queries.view(qv);
  const Matrix& dx = database.view(dv);
  if (qx.rows() == 0) throw InputError("no query samples in view " + std::to_string(qv));
  if (dx.rows() == 0) throw InputError("no database samples in view " + std::to_string(dv));
  const BinaryCodes qc = encode(qx, model, qv);
  const BinaryCodes dc = encode(dx, model, dv);
  return evaluate_codes(qc, view_truth(queries, qv), dc, view_truth(database, dv), task, cutoff, judge, workers);
}

namespace {

RowVector view_mean(const SemiPairedDataset& ds, int view) {
  if (ds.centering.applied) return view == 1 ? ds.centering.mean1 : ds.centering.mean2;
  const Matrix& x = ds.view(view);
  return x.rows() > 0 ? RowVector(x.colwise().mean()) : RowVector::Zero(x.cols());
}

Matrix inverse_sqrt_spd(const Matrix& c) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(c);
  if (eig.info() != Eigen::Success) throw NumericalError("covariance eigendecomposition failed");
  const Vector vals = eig.eigenvalues();
  if (vals.minCoeff() <= 0.0) throw NumericalError("covariance block is not positive definite; increase the ridge");
  return eig.eigenvectors() * vals.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

HashModel baseline_random_projection(const SemiPairedDataset& ds, Index code_length, std::uint64_t seed) {
  if (code_length < 1) throw InputError("code length must be >= 1");
  Rng rng = make_rng(seed, Stream::baseline);
  HashModel m;
  m.code_length = code_length;
  for (int v = 1; v <= 2; ++v) {
    auto& h = m.views[v - 1];
    h.projection = gaussian_matrix(ds.view(v).cols(), code_length, rng);
    h.rotation = Matrix::Identity(code_length, code_length);
    h.mean = view_mean(ds, v);
  }
  return m;
}

CcaResult baseline_cca(const SemiPairedDataset& ds, Index code_length, double ridge) {
  if (ds.n0 < code_length)
    throw InputError("CCA needs at least r = " + std::to_string(code_length) + " pairs, have " + std::to_string(ds.n0));
  if (code_length > std::min(ds.d1(), ds.d2()))
    throw InputError("CCA code length exceeds min(d1, d2)");
  const Matrix p1 = ds.paired_view1();
  const Matrix p2 = ds.paired_view2();
  const RowVector mean1 = p1.colwise().mean();
  const RowVector mean2 = p2.colwise().mean();
  const Matrix c1 = p1.rowwise() - mean1;
  const Matrix c2 = p2.rowwise() - mean2;
  const double denom = std::max<double>(1.0, static_cast<double>(ds.n0 - 1));
  Matrix cxx = c1.transpose() * c1 / denom;
  Matrix cyy = c2.transpose() * c2 / denom;
  const Matrix cxy = c1.transpose() * c2 / denom;
  const double rx = ridge * std::max(cxx.diagonal().mean(), 1e-300);
  const double ry = ridge * std::max(cyy.diagonal().mean(), 1e-300);
  cxx.diagonal().array() += rx;
  cyy.diagonal().array() += ry;

  const Matrix wx = inverse_sqrt_spd(cxx);
  const Matrix wy = inverse_sqrt_spd(cyy);
  Eigen::JacobiSVD<Matrix> svd(wx * cxy * wy, Eigen::ComputeThinU | Eigen::ComputeThinV);

  CcaResult out;
  out.correlations = svd.singularValues().head(code_length);
  out.model.code_length = code_length;
  out.model.views[0] = {wx * svd.matrixU().leftCols(code_length), Matrix::Identity(code_length, code_length), mean1};
  out.model.views[1] = {wy * svd.matrixV().leftCols(code_length), Matrix::Identity(code_length, code_length), mean2};
  return out;
}

}  // namespace xvh
