#include "xvh/solver.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "csv.hpp"
#include "xvh/errors.hpp"
#include "xvh/log.hpp"
#include "xvh/random.hpp"

namespace xvh {

void SolverConfig::validate() const {
  if (code_length < 1) throw InputError("code length must be >= 1");
  if (!(beta >= 0.0) || !(gamma >= 0.0)) throw InputError("beta and gamma must be non-negative");
  if (!(lambda > 0.0)) throw InputError("lambda must be positive");
  if (!(u_large > 0.0)) throw InputError("u_large must be positive");
  if (!(ridge.epsilon >= 0.0)) throw InputError("ridge epsilon must be non-negative");
  if (max_iter < 0) throw InputError("max_iter must be non-negative");
  if (!(rel_tol > 0.0) || !(increase_tolerance > 0.0)) throw InputError("tolerances must be positive");
}

namespace {

std::string describe(const ObjectiveTerms& t) {
  std::ostringstream s;
  s.precision(17);
  s << "total=" << t.total() << " laplacian=" << t.laplacian << " label_fit=" << t.label_fit
    << " view_fit=" << t.view_fit << " w_reg=" << t.w_reg << " pair=" << t.pair << " theta_reg=" << t.theta_reg;
  return s.str();
}

void check_shapes(const ModelParams& p, const SemiPairedDataset& ds) {
  const Index r = p.w.rows();
  if (p.f.rows() != ds.size() || p.f.cols() != ds.classes() || p.w.cols() != ds.classes() || p.q1.rows() != ds.d1() ||
      p.q2.rows() != ds.d2() || p.q1.cols() != r || p.q2.cols() != r)
    throw InputError("model parameters do not match the dataset shape");
}

Matrix orthonormal_projection(Index d, Index r, Rng& rng) {
  if (d >= r) {
    const Matrix g = gaussian_matrix(d, r, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    return qr.householderQ() * Matrix::Identity(d, r);
  }
  const Matrix g = gaussian_matrix(r, d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  return (qr.householderQ() * Matrix::Identity(r, d)).transpose();
}

}  // namespace

ObjectiveIncreaseError::ObjectiveIncreaseError(int iteration, ObjectiveTerms before, ObjectiveTerms after)
    : std::runtime_error("objective increased at iteration " + std::to_string(iteration) + ": before [" +
                         describe(before) + "] after [" + describe(after) + "]"),
      iteration(iteration),
      before(before),
      after(after) {}

void ObjectiveTrace::write_csv(std::ostream& out) const {
  out << "iteration,total,laplacian,label_fit,view_fit,w_reg,pair,theta_reg,seconds\n";
  using detail::format_double;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& t = values[i];
    out << i << ',' << format_double(t.total()) << ',' << format_double(t.laplacian) << ','
        << format_double(t.label_fit) << ',' << format_double(t.view_fit) << ',' << format_double(t.w_reg) << ','
        << format_double(t.pair) << ',' << format_double(t.theta_reg) << ','
        << format_double(i < seconds.size() ? seconds[i] : 0.0) << '\n';
  }
}

ModelParams init_params(const SemiPairedDataset& ds, const AnchorGraph& graph, const SolverConfig& cfg) {
  cfg.validate();
  if (graph.samples() != ds.size()) throw InputError("graph and dataset disagree on the sample count");
  const Index r = cfg.code_length;
  if (r > std::min(ds.d1(), ds.d2()))
    warn("code length " + std::to_string(r) + " exceeds min(d1, d2) = " + std::to_string(std::min(ds.d1(), ds.d2())) +
         "; projections are rank-deficient");
  Rng rng = make_rng(cfg.seed, Stream::init);
  ModelParams p;
  p.f = ds.labels.values;
  p.w = Matrix::Zero(r, ds.classes());
  p.q1 = orthonormal_projection(ds.d1(), r, rng);
  p.q2 = orthonormal_projection(ds.d2(), r, rng);
  p.theta = {0.5, 0.5};
  // Projected samples start with unit mean squared norm, the scale of a label row.
  for (auto [q, x] : {std::pair{&p.q1, &ds.view1}, std::pair{&p.q2, &ds.view2}}) {
    const double ms = (*x * *q).squaredNorm() / static_cast<double>(std::max<Index>(1, x->rows()));
    if (ms > 0.0) *q /= std::sqrt(ms);
  }
  return p;
}

Matrix update_f(const ModelParams& p, const SemiPairedDataset& ds, const AnchorGraph& graph, const SolverConfig& cfg) {
  check_shapes(p, ds);
  const Index n = ds.size();
  const Index u1 = ds.unpaired1();

  Vector delta = Vector::Ones(n);
  Matrix rhs = Matrix::Zero(n, ds.classes());
  delta.head(ds.n1()).array() += p.theta[0];
  delta.tail(ds.n2()).array() += p.theta[1];
  rhs.topRows(ds.n1()) += p.theta[0] * (ds.view1 * p.q1 * p.w);
  rhs.middleRows(u1, ds.n2()) += p.theta[1] * (ds.view2 * p.q2 * p.w);
  for (Index i = 0; i < n; ++i)
    if (ds.labels.labeled[i]) {
      delta(i) += cfg.u_large;
      rhs.row(i) += cfg.u_large * ds.labels.values.row(i);
    }

  const Vector delta_inv = delta.cwiseInverse();
  const Matrix base = delta_inv.asDiagonal() * rhs;
  if (graph.anchors() == 0) return base;
  const Matrix z = Matrix(graph.z);
  Matrix inner = -(z.transpose() * delta_inv.asDiagonal() * z);
  inner.diagonal() += graph.lambda;
  const Matrix correction = spd_solve(inner, z.transpose() * base);
  return base + delta_inv.asDiagonal() * (z * correction);
}

Matrix update_w(const ModelParams& p, const SemiPairedDataset& ds, const SolverConfig& cfg) {
  check_shapes(p, ds);
  const Matrix v1 = ds.view1 * p.q1;
  const Matrix v2 = ds.view2 * p.q2;
  Matrix gram = p.theta[0] * (v1.transpose() * v1) + p.theta[1] * (v2.transpose() * v2);
  gram.diagonal().array() += cfg.beta;
  const Matrix rhs =
      p.theta[0] * (v1.transpose() * ds.select_view1(p.f)) + p.theta[1] * (v2.transpose() * ds.select_view2(p.f));
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() == Eigen::Success && llt.rcond() > 1e-12) return llt.solve(rhs);
  warn("classifier Gram matrix is singular; adding ridge " + detail::format_double(cfg.ridge.epsilon));
  gram.diagonal().array() += cfg.ridge.epsilon;
  return spd_solve(gram, rhs);
}

SylvesterSystem q_system(int view, const ModelParams& p, const SemiPairedDataset& ds, const SolverConfig& cfg) {
  check_shapes(p, ds);
  if (view != 1 && view != 2) throw InputError("view must be 1 or 2");
  const Matrix& x = ds.view(view);
  const Matrix paired_self = view == 1 ? Matrix(ds.paired_view1()) : Matrix(ds.paired_view2());
  const Matrix paired_other = view == 1 ? Matrix(ds.paired_view2()) : Matrix(ds.paired_view1());
  const Matrix& q_other = view == 1 ? p.q2 : p.q1;
  const Matrix fv = view == 1 ? Matrix(ds.select_view1(p.f)) : Matrix(ds.select_view2(p.f));
  const double theta = p.theta[view - 1];
  const Index d = x.cols();
  const Index r = p.w.rows();

  Matrix gram = x.transpose() * x;
  gram.diagonal().array() += cfg.ridge.epsilon;

  Matrix stacked(d, d + r);
  stacked.leftCols(d) = cfg.gamma * (paired_self.transpose() * paired_self);
  stacked.rightCols(r) = theta * (x.transpose() * fv * p.w.transpose()) +
                         cfg.gamma * (paired_self.transpose() * (paired_other * q_other));
  const Matrix solved = spd_solve(gram, stacked);

  SylvesterSystem sys;
  sys.a = solved.leftCols(d);
  sys.b = theta * (p.w * p.w.transpose());
  sys.c = solved.rightCols(r);
  return sys;
}

std::pair<Matrix, Matrix> update_q(const ModelParams& p, const SemiPairedDataset& ds, const SolverConfig& cfg) {
  ModelParams next = p;
  {
    const auto sys = q_system(1, next, ds, cfg);
    next.q1 = sylvester_solve(sys.a, sys.b, sys.c, ShiftPolicy::least_norm);
  }
  {
    const auto sys = q_system(2, next, ds, cfg);
    next.q2 = sylvester_solve(sys.a, sys.b, sys.c, ShiftPolicy::least_norm);
  }
  return {std::move(next.q1), std::move(next.q2)};
}

std::array<double, 2> view_residuals(const ModelParams& p, const SemiPairedDataset& ds) {
  check_shapes(p, ds);
  return {(ds.select_view1(p.f) - ds.view1 * p.q1 * p.w).squaredNorm(),
          (ds.select_view2(p.f) - ds.view2 * p.q2 * p.w).squaredNorm()};
}

std::array<double, 2> update_theta(const ModelParams& p, const SemiPairedDataset& ds, const SolverConfig& cfg) {
  return simplex_qp(view_residuals(p, ds), cfg.lambda);
}

ObjectiveTerms objective(const ModelParams& p, const SemiPairedDataset& ds, const AnchorGraph& graph,
                         const SolverConfig& cfg) {
  check_shapes(p, ds);
  ObjectiveTerms t;
  t.laplacian = laplacian_quadratic(graph, p.f);
  double label = 0.0;
  for (Index i = 0; i < ds.size(); ++i)
    if (ds.labels.labeled[i]) label += (p.f.row(i) - ds.labels.values.row(i)).squaredNorm();
  t.label_fit = cfg.u_large * label;
  const auto pi = view_residuals(p, ds);
  t.view_fit = p.theta[0] * pi[0] + p.theta[1] * pi[1];
  t.w_reg = cfg.beta * p.w.squaredNorm();
  t.pair = cfg.gamma * (ds.paired_view1() * p.q1 - ds.paired_view2() * p.q2).squaredNorm();
  t.theta_reg = cfg.lambda * (p.theta[0] * p.theta[0] + p.theta[1] * p.theta[1]);
  return t;
}

FitResult fit(const SemiPairedDataset& ds, const AnchorGraph& graph, const SolverConfig& cfg) {
  using clock = std::chrono::steady_clock;
  FitResult out;
  out.params = init_params(ds, graph, cfg);
  if (!ds.labels.uncovered_classes().empty())
    warn("some classes have no labeled training sample; their predictions rely on propagation only");
  auto& p = out.params;
  auto& trace = out.trace;
  trace.values.push_back(objective(p, ds, graph, cfg));
  trace.seconds.push_back(0.0);

  for (int it = 1; it <= cfg.max_iter; ++it) {
    const auto start = clock::now();
    p.f = update_f(p, ds, graph, cfg);
    p.w = update_w(p, ds, cfg);
    std::tie(p.q1, p.q2) = update_q(p, ds, cfg);
    p.theta = update_theta(p, ds, cfg);
    const ObjectiveTerms terms = objective(p, ds, graph, cfg);
    const double seconds = std::chrono::duration<double>(clock::now() - start).count();

    const ObjectiveTerms prev = trace.values.back();
    trace.values.push_back(terms);
    trace.seconds.push_back(seconds);
    if (!std::isfinite(terms.total())) throw NumericalError("objective became non-finite: " + describe(terms));
    const double scale = std::max(std::abs(prev.total()), 1e-300);
    const double change = terms.total() - prev.total();
    if (change > cfg.increase_tolerance * scale) throw ObjectiveIncreaseError(it, prev, terms);
    if (std::abs(change) <= cfg.rel_tol * scale) {
      trace.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace xvh
