#include <doctest.h>

#include <limits>

#include <Eigen/QR>

#include "support.hpp"
#include "xvh/errors.hpp"
#include "xvh/linalg.hpp"
#include "xvh/quantize.hpp"

using namespace xvh;
using namespace xvh::testing;

namespace {

double rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

Matrix random_rank(Index p, Index q, Index rank, Rng& rng) {
  return gaussian_matrix(p, rank, rng) * gaussian_matrix(rank, q, rng);
}

Matrix random_psd(Index q, Rng& rng) {
  const Matrix g = gaussian_matrix(q, q, rng);
  return g * g.transpose();
}

}  // namespace

TEST_CASE("pinv examples") {
  CHECK(pinv(Matrix::Identity(3, 3)) == Matrix::Identity(3, 3));
  const Matrix d{{2.0, 0.0}, {0.0, 0.0}};
  const Matrix expected{{0.5, 0.0}, {0.0, 0.0}};
  CHECK((pinv(d) - expected).norm() <= 1e-15);
  Rng rng(1);
  const Matrix a = gaussian_matrix(5, 3, rng);
  CHECK((pinv(a) * a - Matrix::Identity(3, 3)).norm() <= 1e-10);
  Matrix bad = a;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(pinv(bad), NumericalError);
}

TEST_CASE("pinv satisfies the Penrose identities") {
  Rng rng(2);
  for (int t = 0; t < 60; ++t) {
    const Index p = uniform_int(rng, 1, 50), q = uniform_int(rng, 1, 50);
    const Index rank = uniform_int(rng, 1, static_cast<int>(std::min(p, q)));
    const Matrix a = random_rank(p, q, rank, rng);
    const Matrix x = pinv(a);
    CHECK(rel(a * x * a, a) <= 1e-8);
    CHECK(rel(x * a * x, x) <= 1e-8);
    CHECK(rel((a * x).transpose(), a * x) <= 1e-8);
    CHECK(rel((x * a).transpose(), x * a) <= 1e-8);
  }
}

TEST_CASE("sylvester examples") {
  Rng rng(3);
  const Matrix c = gaussian_matrix(3, 2, rng);
  CHECK((sylvester_solve(Matrix::Identity(3, 3), Matrix::Zero(2, 2), c) - c).norm() <= 1e-14);
  const Matrix x = sylvester_solve(Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 3.0), Matrix::Constant(1, 1, 10.0));
  CHECK(x(0, 0) == doctest::Approx(2.0));
  const Matrix a = gaussian_matrix(4, 4, rng);
  const Matrix b = random_psd(3, rng);
  const Matrix cc = gaussian_matrix(4, 3, rng);
  const Matrix sol = sylvester_solve(a, b, cc);
  CHECK((a * sol + sol * b - cc).norm() / cc.norm() <= 1e-10);
}

TEST_CASE("sylvester: residual and Kronecker agreement") {
  Rng rng(4);
  for (int t = 0; t < 80; ++t) {
    const Index p = uniform_int(rng, 1, 10), q = uniform_int(rng, 1, 10);
    // Diagonally dominant A keeps every shift well away from singular.
    Matrix a = gaussian_matrix(p, p, rng);
    a.diagonal().array() += 3.0 * static_cast<double>(p);
    const Matrix b = random_psd(q, rng);
    const Matrix c = gaussian_matrix(p, q, rng);
    const Matrix x = sylvester_solve(a, b, c);
    CHECK((a * x + x * b - c).norm() / std::max(c.norm(), 1e-30) < 1e-8);
    Matrix kron = Matrix::Zero(p * q, p * q);
    for (Index j = 0; j < q; ++j) {
      kron.block(j * p, j * p, p, p) += a;
      for (Index i = 0; i < q; ++i) kron.block(j * p, i * p, p, p) += b(i, j) * Matrix::Identity(p, p);
    }
    const Vector vx = kron.fullPivLu().solve(Eigen::Map<const Vector>(c.data(), p * q));
    CHECK((Eigen::Map<const Vector>(x.data(), p * q) - vx).norm() <= 1e-8 * std::max(1.0, vx.norm()));
  }
}

TEST_CASE("sylvester: singular shifts") {
  // A = -B makes every shifted system singular.
  const Matrix a = -Matrix::Identity(2, 2);
  const Matrix b = Matrix::Identity(2, 2);
  const Matrix c = Matrix::Ones(2, 2);
  CHECK_THROWS_WITH_AS(sylvester_solve(a, b, c), doctest::Contains("ill-posed Sylvester equation"), NumericalError);
  // Least-norm policy returns the minimum-norm solution instead: A = 0, B = 0.
  const Matrix z = sylvester_solve(Matrix::Zero(2, 2), Matrix::Zero(1, 1), Matrix::Zero(2, 1), ShiftPolicy::least_norm);
  CHECK(z.norm() == 0.0);
  CHECK_THROWS_AS(sylvester_solve(Matrix::Zero(2, 2), Matrix::Zero(1, 1), Matrix::Zero(3, 1)), InputError);
}

TEST_CASE("orthogonal_procrustes") {
  CHECK((orthogonal_procrustes(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)).norm() <= 1e-12);
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const Index r = uniform_int(rng, 1, 8);
    const Matrix o = random_rotation(r, rng);
    CHECK((orthogonal_procrustes(2.5 * o) - o).norm() <= 1e-10);
    const Matrix m = gaussian_matrix(r, r, rng);
    const Matrix rot = orthogonal_procrustes(m);
    CHECK((rot.transpose() * rot - Matrix::Identity(r, r)).norm() < 1e-10);
  }
  const Matrix m = gaussian_matrix(3, 3, rng);
  const double best = (orthogonal_procrustes(m).transpose() * m).trace();
  for (int t = 0; t < 1000; ++t) {
    const Matrix o = random_rotation(3, rng);
    CHECK(best >= (o.transpose() * m).trace() - 1e-12);
  }
  CHECK_THROWS_AS(orthogonal_procrustes(Matrix::Zero(2, 3)), InputError);
}

TEST_CASE("simplex_qp examples") {
  auto t = simplex_qp({2.0, 2.0}, 1.0);
  CHECK(t[0] == 0.5);
  CHECK(t[1] == 0.5);
  t = simplex_qp({1.0, 300.0}, 1e9);
  CHECK(std::abs(t[0] - 0.5) <= 1e-6);
  t = simplex_qp({1.0, 3.0}, 1.0);
  CHECK(t[0] == doctest::Approx(0.9999));
  CHECK(t[1] == doctest::Approx(0.0001));
  t = simplex_qp({1.0, 3.0}, 4.0);
  CHECK(t[0] == doctest::Approx(0.625));
  CHECK_THROWS_AS(simplex_qp({1.0, 1.0}, 0.0), InputError);
}

TEST_CASE("simplex_qp beats a fine grid") {
  Rng rng(6);
  for (int t = 0; t < 40; ++t) {
    const std::array<double, 2> pi{log_uniform(rng, 1e-3, 1e3), log_uniform(rng, 1e-3, 1e3)};
    const double lambda = log_uniform(rng, 1e-2, 1e3);
    const auto th = simplex_qp(pi, lambda);
    CHECK(th[0] + th[1] == 1.0);
    CHECK(th[0] >= kThetaFloor);
    CHECK(th[1] >= kThetaFloor - 1e-16);
    auto value = [&](double t1) {
      return t1 * pi[0] + (1 - t1) * pi[1] + lambda * (t1 * t1 + (1 - t1) * (1 - t1));
    };
    const double at = value(th[0]);
    for (int k = 0; k <= 100000; ++k) {
      const double g = kThetaFloor + (1.0 - 2 * kThetaFloor) * k / 100000.0;
      if (value(g) < at - 1e-9 * std::max(1.0, std::abs(at))) {
        FAIL("grid point beats the closed form: " << g);
        break;
      }
    }
  }
}

TEST_CASE("spd_solve") {
  Rng rng(7);
  const Matrix a = random_psd(5, rng) + Matrix::Identity(5, 5);
  const Matrix b = gaussian_matrix(5, 2, rng);
  CHECK((a * spd_solve(a, b) - b).norm() <= 1e-10 * b.norm());
  // Singular input falls back to the pseudoinverse.
  const Matrix s = random_rank(4, 4, 2, rng);
  const Matrix sym = s * s.transpose();
  const Matrix rhs = sym * gaussian_matrix(4, 1, rng);
  CHECK((sym * spd_solve(sym, rhs) - rhs).norm() <= 1e-8 * rhs.norm());
}
