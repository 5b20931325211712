#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iterator>
#include <numeric>

#include <Eigen/QR>
#include <unistd.h>

namespace xvh::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("xvh-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(uniform_real(rng, std::log(lo), std::log(hi)));
}

SemiPairedDataset random_dataset(Rng& rng, const TinyLimits& lim) {
  const Index c = uniform_int(rng, 2, static_cast<int>(lim.max_c));
  const Index d1 = uniform_int(rng, 2, static_cast<int>(lim.max_d));
  const Index d2 = uniform_int(rng, 2, static_cast<int>(lim.max_d));
  const Index min_pairs = lim.pairs_exceed_dims ? std::max(d1, d2) + 1 : 1;
  const Index n0 = uniform_int(rng, static_cast<int>(min_pairs), static_cast<int>(std::max(min_pairs, lim.max_n - 4)));
  const Index spare = lim.max_n - n0;
  const Index u1 = uniform_int(rng, 0, static_cast<int>(std::min<Index>(spare, 3)));
  const Index u2 = uniform_int(rng, 0, static_cast<int>(std::min<Index>(spare - u1, 3)));

  SemiPairedDataset ds;
  ds.n0 = n0;
  ds.view1 = gaussian_matrix(n0 + u1, d1, rng);
  ds.view2 = gaussian_matrix(n0 + u2, d2, rng);
  const Index n = ds.size();
  ds.truth.values = Matrix::Zero(n, c);
  ds.truth.labeled.assign(n, true);
  for (Index i = 0; i < n; ++i) ds.truth.values(i, uniform_int(rng, 0, static_cast<int>(c - 1))) = 1.0;
  ds.labels = ds.truth;
  std::vector<bool> keep(n, false);
  for (Index i = 0; i < n; ++i) keep[i] = uniform_int(rng, 0, 1) == 1;
  // One labeled representative for every class that occurs.
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < n; ++i)
      if (ds.truth.values(i, j) > 0.5) {
        keep[i] = true;
        break;
      }
  for (Index i = 0; i < n; ++i)
    if (!keep[i]) {
      ds.labels.values.row(i).setZero();
      ds.labels.labeled[i] = false;
    }
  return center_views(std::move(ds));
}

TinyInstance random_instance(Rng& rng, const TinyLimits& lim) {
  TinyInstance t;
  t.ds = random_dataset(rng, lim);
  const Index m0 = uniform_int(rng, 1, static_cast<int>(t.ds.n0));
  const Index k = uniform_int(rng, 1, static_cast<int>(m0));
  const AnchorSet anchors = select_anchors(t.ds, m0, rng());
  t.graph = build_anchor_graph(t.ds, anchors, k, {});

  t.cfg.code_length = uniform_int(rng, 1, static_cast<int>(lim.max_r));
  t.cfg.beta = log_uniform(rng, 0.01, 10.0);
  t.cfg.gamma = log_uniform(rng, 0.01, 10.0);
  t.cfg.lambda = log_uniform(rng, 0.1, 10.0);
  t.cfg.ridge.epsilon = 0.0;
  t.cfg.seed = rng();

  const Index r = t.cfg.code_length;
  t.params.f = gaussian_matrix(t.ds.size(), t.ds.classes(), rng);
  t.params.w = gaussian_matrix(r, t.ds.classes(), rng);
  t.params.q1 = gaussian_matrix(t.ds.d1(), r, rng);
  t.params.q2 = gaussian_matrix(t.ds.d2(), r, rng);
  const double th = uniform_real(rng, 0.1, 0.9);
  t.params.theta = {th, 1.0 - th};
  return t;
}

Matrix dense_pinv(const Matrix& a) { return Eigen::CompleteOrthogonalDecomposition<Matrix>(a).pseudoInverse(); }

Matrix selection_t(const SemiPairedDataset& ds, int view) {
  const Index n = ds.size();
  if (view == 1) {
    Matrix t = Matrix::Zero(ds.n1(), n);
    for (Index r = 0; r < ds.n1(); ++r) t(r, r) = 1.0;
    return t;
  }
  Matrix t = Matrix::Zero(ds.n2(), n);
  for (Index r = 0; r < ds.n2(); ++r) t(r, ds.n1() - ds.n0 + r) = 1.0;
  return t;
}

Matrix selection_m(const SemiPairedDataset& ds, int view) {
  if (view == 1) {
    Matrix m = Matrix::Zero(ds.n0, ds.n1());
    for (Index j = 0; j < ds.n0; ++j) m(j, ds.n1() - ds.n0 + j) = 1.0;
    return m;
  }
  Matrix m = Matrix::Zero(ds.n0, ds.n2());
  for (Index j = 0; j < ds.n0; ++j) m(j, j) = 1.0;
  return m;
}

Matrix dense_u(const SemiPairedDataset& ds, double u_large) {
  Matrix u = Matrix::Zero(ds.size(), ds.size());
  for (Index i = 0; i < ds.size(); ++i)
    if (ds.labels.labeled[i]) u(i, i) = u_large;
  return u;
}

Matrix dense_s_from_z(const Matrix& z) {
  const Vector colsum = z.colwise().sum().transpose();
  Matrix lam_inv = Matrix::Zero(z.cols(), z.cols());
  for (Index j = 0; j < z.cols(); ++j) lam_inv(j, j) = 1.0 / colsum(j);
  return z * lam_inv * z.transpose();
}

Matrix dense_laplacian(const Matrix& z) {
  const Matrix s = dense_s_from_z(z);
  return Matrix::Identity(s.rows(), s.cols()) - s;
}

Matrix reference_z(const SemiPairedDataset& ds, const AnchorSet& anchors, Index k, std::array<double, 2> sigma_sq) {
  const Index n = ds.size(), m = anchors.size();
  Matrix z = Matrix::Zero(n, m);
  for (Index i = 0; i < n; ++i) {
    std::vector<double> dist(m);
    for (Index j = 0; j < m; ++j) {
      const auto r1 = ds.view1_row(i);
      const auto r2 = ds.view2_row(i);
      double a = 0.0, b = 0.0;
      if (r1) a = (ds.view1.row(*r1) - anchors.anchors1.row(j)).squaredNorm() / sigma_sq[0];
      if (r2) b = (ds.view2.row(*r2) - anchors.anchors2.row(j)).squaredNorm() / sigma_sq[1];
      dist[j] = (r1 && r2) ? 0.5 * (a + b) : (r1 ? a : b);
    }
    std::vector<Index> order(m);
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return dist[x] < dist[y]; });
    double total = 0.0;
    for (Index t = 0; t < k; ++t) total += std::exp(-dist[order[t]]);
    for (Index t = 0; t < k; ++t) z(i, order[t]) = std::exp(-dist[order[t]]) / total;
  }
  return z;
}

double laplacian_double_sum(const Matrix& s, const Matrix& f) {
  double sum = 0.0;
  for (Index i = 0; i < s.rows(); ++i)
    for (Index j = 0; j < s.cols(); ++j) sum += s(i, j) * (f.row(i) - f.row(j)).squaredNorm();
  return 0.5 * sum;
}

namespace {

const Matrix& view_x(const SemiPairedDataset& ds, int v) { return v == 1 ? ds.view1 : ds.view2; }
const Matrix& view_q(const ModelParams& p, int v) { return v == 1 ? p.q1 : p.q2; }

double view_fit(const Matrix& f, const Matrix& w, const Matrix& q1, const Matrix& q2, const ModelParams& p,
                const SemiPairedDataset& ds) {
  return p.theta[0] * (selection_t(ds, 1) * f - ds.view1 * q1 * w).squaredNorm() +
         p.theta[1] * (selection_t(ds, 2) * f - ds.view2 * q2 * w).squaredNorm();
}

Matrix gram_inverse(const Matrix& x, double eps) {
  Matrix g = x.transpose() * x;
  if (eps == 0.0) return dense_pinv(g);
  g.diagonal().array() += eps;
  return g.inverse();
}

struct DenseSylvester {
  Matrix a, b, c;
};

DenseSylvester dense_q_equation(int view, const ModelParams& p, const SemiPairedDataset& ds,
                                const SolverConfig& cfg) {
  const int other = 3 - view;
  const Matrix& x = view_x(ds, view);
  const Matrix mself = selection_m(ds, view);
  const Matrix moth = selection_m(ds, other);
  const Matrix ginv = gram_inverse(x, cfg.ridge.epsilon);
  const double th = p.theta[view - 1];
  DenseSylvester e;
  e.a = cfg.gamma * ginv * x.transpose() * mself.transpose() * mself * x;
  e.b = th * p.w * p.w.transpose();
  e.c = ginv * (th * x.transpose() * selection_t(ds, view) * p.f * p.w.transpose() +
                cfg.gamma * x.transpose() * mself.transpose() * moth * view_x(ds, other) * view_q(p, other));
  return e;
}

}  // namespace

Matrix reference_update_f(const ModelParams& p, const SemiPairedDataset& ds, const Matrix& s,
                          const SolverConfig& cfg) {
  const Index n = ds.size();
  const Matrix l = Matrix::Identity(n, n) - s;
  const Matrix u = dense_u(ds, cfg.u_large);
  const Matrix t1 = selection_t(ds, 1), t2 = selection_t(ds, 2);
  const Matrix lhs = l + u + p.theta[0] * t1.transpose() * t1 + p.theta[1] * t2.transpose() * t2;
  const Matrix rhs = p.theta[0] * t1.transpose() * ds.view1 * p.q1 * p.w +
                     p.theta[1] * t2.transpose() * ds.view2 * p.q2 * p.w + u * ds.labels.values;
  return dense_pinv(lhs) * rhs;
}

Matrix reference_update_w(const ModelParams& p, const SemiPairedDataset& ds, const SolverConfig& cfg) {
  const Index r = p.w.rows();
  Matrix lhs = cfg.beta * Matrix::Identity(r, r);
  Matrix rhs = Matrix::Zero(r, p.f.cols());
  for (int v = 1; v <= 2; ++v) {
    const Matrix xq = view_x(ds, v) * view_q(p, v);
    lhs += p.theta[v - 1] * xq.transpose() * xq;
    rhs += p.theta[v - 1] * xq.transpose() * selection_t(ds, v) * p.f;
  }
  return dense_pinv(lhs) * rhs;
}

Matrix reference_update_q(int view, const ModelParams& p, const SemiPairedDataset& ds, const SolverConfig& cfg) {
  const DenseSylvester e = dense_q_equation(view, p, ds, cfg);
  const Index d = e.a.rows(), r = e.b.rows();
  Matrix kron = Matrix::Zero(d * r, d * r);
  for (Index j = 0; j < r; ++j) {
    kron.block(j * d, j * d, d, d) += e.a;
    for (Index i = 0; i < r; ++i) kron.block(j * d, i * d, d, d) += e.b(i, j) * Matrix::Identity(d, d);
  }
  const Vector vec_c = Eigen::Map<const Vector>(e.c.data(), d * r);
  const Vector vec_q = dense_pinv(kron) * vec_c;
  return Eigen::Map<const Matrix>(vec_q.data(), d, r);
}

std::array<double, 2> reference_theta(std::array<double, 2> pi, double lambda) {
  const double lo = kThetaFloor, hi = 1.0 - kThetaFloor;
  auto value = [&](double t1) { return t1 * pi[0] + (1 - t1) * pi[1] + lambda * (t1 * t1 + (1 - t1) * (1 - t1)); };
  // Setting the derivative along the simplex to zero.
  const double stationary = (pi[1] - pi[0] + 2 * lambda) / (4 * lambda);
  double best = lo;
  for (double cand : {lo, hi, stationary})
    if (cand >= lo && cand <= hi && value(cand) < value(best)) best = cand;
  return {best, 1.0 - best};
}

ReferenceTerms reference_objective(const ModelParams& p, const SemiPairedDataset& ds, const Matrix& s,
                                   const SolverConfig& cfg) {
  const Index n = ds.size();
  const Matrix l = Matrix::Identity(n, n) - s;
  const Matrix u = dense_u(ds, cfg.u_large);
  const Matrix diff = p.f - ds.labels.values;
  ReferenceTerms t{};
  t.laplacian = (p.f.transpose() * l * p.f).trace();
  t.label_fit = (diff.transpose() * u * diff).trace();
  t.view_fit = view_fit(p.f, p.w, p.q1, p.q2, p, ds);
  t.w_reg = cfg.beta * p.w.squaredNorm();
  t.pair = cfg.gamma *
           (selection_m(ds, 1) * ds.view1 * p.q1 - selection_m(ds, 2) * ds.view2 * p.q2).squaredNorm();
  t.theta_reg = cfg.lambda * (p.theta[0] * p.theta[0] + p.theta[1] * p.theta[1]);
  return t;
}

double f_subobjective(const Matrix& f, const ModelParams& p, const SemiPairedDataset& ds, const Matrix& s,
                      const SolverConfig& cfg) {
  const Index n = ds.size();
  const Matrix l = Matrix::Identity(n, n) - s;
  const Matrix diff = f - ds.labels.values;
  return (f.transpose() * l * f).trace() + (diff.transpose() * dense_u(ds, cfg.u_large) * diff).trace() +
         view_fit(f, p.w, p.q1, p.q2, p, ds);
}

double w_subobjective(const Matrix& w, const ModelParams& p, const SemiPairedDataset& ds, const SolverConfig& cfg) {
  return view_fit(p.f, w, p.q1, p.q2, p, ds) + cfg.beta * w.squaredNorm();
}

double q_subobjective(const Matrix& q1, const Matrix& q2, const ModelParams& p, const SemiPairedDataset& ds,
                      const SolverConfig& cfg) {
  return view_fit(p.f, p.w, q1, q2, p, ds) +
         cfg.gamma * (selection_m(ds, 1) * ds.view1 * q1 - selection_m(ds, 2) * ds.view2 * q2).squaredNorm();
}

double theta_subobjective(double theta1, const ModelParams& p, const SemiPairedDataset& ds, const SolverConfig& cfg) {
  const double pi1 = (selection_t(ds, 1) * p.f - ds.view1 * p.q1 * p.w).squaredNorm();
  const double pi2 = (selection_t(ds, 2) * p.f - ds.view2 * p.q2 * p.w).squaredNorm();
  const double theta2 = 1.0 - theta1;
  return theta1 * pi1 + theta2 * pi2 + cfg.lambda * (theta1 * theta1 + theta2 * theta2);
}

double q_equation_residual(int view, const ModelParams& p, const SemiPairedDataset& ds, const SolverConfig& cfg) {
  const DenseSylvester e = dense_q_equation(view, p, ds, cfg);
  const Matrix& q = view_q(p, view);
  return (e.a * q + q * e.b - e.c).norm() / std::max(e.c.norm(), 1e-30);
}

}  // namespace xvh::testing
