#include <doctest.h>

#include <numbers>

#include "helpers.hpp"
#include "hsicnet/closed_form.hpp"
#include "hsicnet/errors.hpp"

using namespace hsicnet;
using namespace testing_util;

namespace {

Matrix symmetric(Eigen::Index n, std::mt19937_64& rng) {
  const Matrix a = random_matrix(n, n, rng);
  return 0.5 * (a + a.transpose());
}

// sum_ij psi_ij (x_i - x_j)(x_i - x_j)^T
Matrix brute_laplacian(const Matrix& psi, const Matrix& x) {
  Matrix out = Matrix::Zero(x.cols(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
      const Vector d = (x.row(i) - x.row(j)).transpose();
      out += psi(i, j) * d * d.transpose();
    }
  return out;
}

double objective(const Matrix& r, const Matrix& gamma, const Matrix& w, double sigma) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < r.rows(); ++i)
    for (Eigen::Index j = 0; j < r.rows(); ++j) {
      const Vector d = w.transpose() * (r.row(i) - r.row(j)).transpose();
      acc += gamma(i, j) * std::exp(-d.squaredNorm() / (2.0 * sigma * sigma));
    }
  return acc;
}

struct Instance {
  Matrix r;
  std::vector<int> labels;
  CenteredLabelKernel gamma;
};

Instance random_instance(int n, int q, int tau, std::mt19937_64& rng) {
  Instance in;
  in.r = random_matrix(n, q, rng);
  in.labels = random_labels(n, tau, rng);
  in.gamma = gamma_matrix(one_hot(in.labels, tau));
  return in;
}

// classes shifted apart along a random direction so the problem has signal
Instance shifted_instance(int n, int q, std::mt19937_64& rng, double shift = 1.5) {
  Instance in = random_instance(n, q, 2, rng);
  Vector dir = random_matrix(q, 1, rng).col(0).normalized();
  for (int i = 0; i < n; ++i) in.r.row(i) += (in.labels[i] == 0 ? -shift : shift) * dir.transpose();
  return in;
}

}  // namespace

TEST_CASE("kernel mean embedding weights") {
  Matrix r(4, 1);
  r << -1.0, -1.2, 1.0, 1.1;
  const std::vector<int> lab{0, 0, 1, 1};
  const Matrix w = kme_weights(r, lab, false);
  CHECK(w(0, 0) == doctest::Approx(-2.2));
  CHECK(w(0, 1) == doctest::Approx(2.1));

  Matrix one(2, 3);
  one << 1, 2, 3, -4, 5, 6;
  const Matrix w1 = kme_weights(one, std::vector<int>{0, 1}, true);
  const double zeta = std::sqrt(1 + 4 + 9 + 16 + 25 + 36.0);
  CHECK(w1(1, 0) == doctest::Approx(2.0 / zeta));
  CHECK(w1(0, 1) == doctest::Approx(-4.0 / zeta));
  CHECK(w1.norm() == doctest::Approx(1.0));

  CHECK_THROWS_AS(kme_weights(r, std::vector<int>{0, 0, 2, 2}), InvalidArgument);
  CHECK_THROWS_AS(kme_weights(r, std::vector<int>{0, 1}), InvalidArgument);
}

TEST_CASE("laplacian identity holds on random instances" * doctest::test_suite("properties")) {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + t % 7;
    const Matrix psi = symmetric(n, rng);
    const Matrix x = random_matrix(n, 1 + t % 4, rng);
    CHECK((laplacian_form(psi, x) - brute_laplacian(psi, x)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("ism_q matches the pairwise form and is symmetric") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const Instance in = random_instance(3 + t, 4, 2, rng);
    const Matrix w = random_matrix(4, 2, rng);
    const IsmState s = ism_q(in.r, in.gamma, w, 1.3);
    const Matrix expected = -0.5 * brute_laplacian(s.gamma_hat, in.r);
    CHECK((s.q - expected).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((s.q - s.q.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((s.gamma_hat - in.gamma.gamma.cwiseProduct(gaussian_kernel(in.r * w, 1.3))).cwiseAbs().maxCoeff() <= 1e-14);
  }
  const Instance in = random_instance(5, 2, 2, rng);
  CHECK_THROWS_AS(ism_q(in.r, in.gamma, Matrix::Identity(2, 2), 0.0), InvalidArgument);
}

TEST_CASE("ism_q vanishes when the projected kernel does") {
  // far-apart projections at tiny sigma: only the diagonal of Gamma_hat survives
  Matrix r(4, 1);
  r << 0.0, 10.0, 20.0, 30.0;
  const CenteredLabelKernel g = gamma_matrix(one_hot(std::vector<int>{0, 0, 1, 1}, 2));
  const IsmState s = ism_q(r, g, Matrix::Identity(1, 1), 1e-3);
  CHECK(s.q.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("eigh_topk") {
  Matrix s = Matrix::Zero(3, 3);
  s.diagonal() << 3.0, 1.0, 0.0;
  EigenPairs e = eigh_topk(s, 1e-6);
  REQUIRE(e.vectors.cols() == 2);
  CHECK(e.values(0) == doctest::Approx(3.0));
  CHECK(e.values(1) == doctest::Approx(1.0));
  CHECK((e.vectors.col(0) - Vector::Unit(3, 0)).norm() < 1e-12);
  CHECK((e.vectors.col(1) - Vector::Unit(3, 1)).norm() < 1e-12);

  const EigenPairs id = eigh_topk(Matrix::Identity(4, 4), 1e-6);
  CHECK(id.vectors.cols() == 4);
  CHECK((Matrix::Identity(4, 4) * id.vectors - id.vectors * id.values.asDiagonal()).norm() < 1e-12);

  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const Matrix m = symmetric(5, rng);
    const EigenPairs p = eigh_topk(m, 1e-6);
    CHECK((m * p.vectors - p.vectors * p.values.asDiagonal()).norm() <= 1e-8);
    CHECK((p.vectors.transpose() * p.vectors - Matrix::Identity(p.vectors.cols(), p.vectors.cols())).norm() <= 1e-8);
    for (Eigen::Index k = 1; k < p.values.size(); ++k) CHECK(p.values(k) <= p.values(k - 1));
    for (Eigen::Index k = 0; k < p.vectors.cols(); ++k) {
      Eigen::Index arg = 0;
      p.vectors.col(k).cwiseAbs().maxCoeff(&arg);
      CHECK(p.vectors(arg, k) > 0.0);
    }
  }

  const EigenPairs neg = eigh_topk(-Matrix::Identity(3, 3), 1e-6);
  CHECK(neg.vectors.cols() == 1);

  Matrix asym = Matrix::Identity(3, 3);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(eigh_topk(asym, 1e-6), InvalidArgument);
}

TEST_CASE("ism on two blobs aligns with the class-mean direction") {
  for (const std::uint64_t seed : {1, 2, 3}) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.5);
    const Vector dir = Vector(Eigen::Vector2d(std::cos(0.6), std::sin(0.6)));
    Matrix x(100, 2);
    std::vector<int> lab;
    for (int i = 0; i < 100; ++i) {
      const int c = i < 50 ? 0 : 1;
      x(i, 0) = noise(rng);
      x(i, 1) = noise(rng);
      x.row(i) += (c == 0 ? -1.5 : 1.5) * dir.transpose();
      lab.push_back(c);
    }
    const Vector means = (x.bottomRows(50).colwise().mean() - x.topRows(50).colwise().mean()).transpose().normalized();
    const CenteredLabelKernel g = gamma_matrix(one_hot(lab, 2));
    const double sigma = 2.0;
    const IsmResult res = ism_solve(x, g, sigma);
    const auto angle_deg = [](const Vector& a, const Vector& b) {
      return std::acos(std::min(1.0, std::abs(a.dot(b)))) * 180.0 / std::numbers::pi;
    };
    CHECK(angle_deg(res.w.col(0), means) <= 5.0);

    // brute-force oracle over unit directions
    double best = -std::numeric_limits<double>::infinity();
    Vector best_dir(2);
    for (int k = 0; k < 3600; ++k) {
      const double a = k * std::numbers::pi / 3600.0;
      Matrix w(2, 1);
      w << std::cos(a), std::sin(a);
      const double v = projected_hsic_raw(x, g, w, sigma);
      if (v > best) {
        best = v;
        best_dir = w.col(0);
      }
    }
    CHECK(angle_deg(res.w.col(0), best_dir) <= 1.0);
    CHECK((res.w.transpose() * res.w - Matrix::Identity(res.w.cols(), res.w.cols())).norm() <= 1e-8);
  }
}

TEST_CASE("ism stationarity and layer optimality" * doctest::test_suite("properties")) {
  std::mt19937_64 rng(19);
  int converged = 0;
  for (int t = 0; t < 20; ++t) {
    const Instance in = shifted_instance(24, 4, rng);
    const double sigma = 1.0;
    IsmOptions opts;
    opts.max_iter = 100;  // linear convergence is slow on some draws
    IsmResult res;
    try {
      res = ism_solve(in.r, in.gamma, sigma, opts);
      ++converged;
    } catch (const ConvergenceFailure& f) {
      res = f.best();
    }
    if (res.converged) {
      CHECK(res.state.stationarity_residual <= 10.0 * 1e-6);
      const IsmState s = ism_q(in.r, in.gamma, res.w, sigma);
      CHECK((s.q * res.w - res.w * (res.w.transpose() * s.q * res.w)).norm() <= 1e-5);
      CHECK(tangent_gradient_norm(in.r, in.gamma, res.w, sigma) <= 1e-5);
    }
    CHECK((res.w.transpose() * res.w - Matrix::Identity(res.w.cols(), res.w.cols())).norm() <= 1e-8);
    const Matrix ws = kme_weights(in.r, in.labels);
    CHECK(projected_hsic_raw(in.r, in.gamma, res.w, sigma) >= projected_hsic_raw(in.r, in.gamma, ws, sigma) - 1e-9);
  }
  CHECK(converged >= 18);
}

TEST_CASE("one-dimensional separable data" * doctest::test_suite("properties")) {
  Matrix r(6, 1);
  r << -2.0, -1.5, -1.0, 1.0, 1.4, 2.2;
  const std::vector<int> lab{0, 0, 0, 1, 1, 1};
  const CenteredLabelKernel g = gamma_matrix(one_hot(lab, 2));
  const IsmResult res = ism_solve(r, g, 0.8);
  CHECK(res.w.cols() >= 1);
  const Matrix ws = kme_weights(r, lab);
  CHECK(projected_hsic_raw(r, g, res.w, 0.8) >= projected_hsic_raw(r, g, ws, 0.8) - 1e-9);
}

TEST_CASE("ism rejects degenerate labels and reports non-convergence") {
  std::mt19937_64 rng(2);
  const Matrix r = random_matrix(5, 2, rng);
  const CenteredLabelKernel single = gamma_matrix(Matrix::Ones(5, 1));
  CHECK_THROWS_AS(ism_solve(r, single, 1.0), InvalidArgument);

  const Instance in = random_instance(30, 6, 3, rng);
  IsmOptions once;
  once.max_iter = 1;
  once.conv_tol = 1e-15;
  CHECK_THROWS_AS(ism_solve(in.r, in.gamma, 0.3, once), ConvergenceFailure);
  try {
    ism_solve(in.r, in.gamma, 0.3, once);
  } catch (const ConvergenceFailure& f) {
    CHECK(f.best().w.rows() == 6);
    CHECK_FALSE(f.best().converged);
  }
  const IsmResult fit = ism_fit(in.r, in.gamma, 0.3, once);
  CHECK_FALSE(fit.converged);
  CHECK(fit.w.rows() == 6);
}

TEST_CASE("hsic gradient matches central differences" * doctest::test_suite("properties")) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    const Instance in = random_instance(4 + t % 5, 3, 2, rng);
    const Matrix w = random_matrix(3, 2, rng, 0.7);
    const double sigma = 0.8 + 0.1 * (t % 4);
    const Matrix g = hsic_gradient(in.r, in.gamma, w, sigma);
    Matrix fd(3, 2);
    const double h = 1e-5;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 2; ++b) {
        Matrix wp = w, wm = w;
        wp(a, b) += h;
        wm(a, b) -= h;
        fd(a, b) = (objective(in.r, in.gamma.gamma, wp, sigma) - objective(in.r, in.gamma.gamma, wm, sigma)) / (2 * h);
      }
    CHECK((g - fd).norm() <= 1e-5 * std::max(1.0, fd.norm()));
  }
  const Instance in = random_instance(5, 3, 2, rng);
  const CenteredLabelKernel zero{Matrix::Zero(5, 5)};
  CHECK(hsic_gradient(in.r, zero, random_matrix(3, 2, rng), 1.0).norm() == 0.0);
  CHECK_THROWS_AS(hsic_gradient(in.r, in.gamma, random_matrix(3, 2, rng), -1.0), InvalidArgument);
}

TEST_CASE("class-sum weights are generally not stationary" * doctest::test_suite("properties")) {
  std::mt19937_64 rng(29);
  int nonstationary = 0;
  for (int t = 0; t < 20; ++t) {
    const Instance in = random_instance(20, 3, 2, rng);
    const Matrix ws = kme_weights(in.r, in.labels);
    bool found = false;
    for (const double sigma : {0.1, 0.3, 1.0, 3.0, 10.0}) {
      if (tangent_gradient_norm(in.r, in.gamma, ws, sigma) > 1e-3) found = true;
    }
    nonstationary += found ? 1 : 0;
  }
  CHECK(nonstationary >= 18);
}

TEST_CASE("penalty profile" * doctest::test_suite("properties")) {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 50; ++t) {
    const Instance in = random_instance(3 + t % 8, 3, 2 + t % 2, rng);
    const Matrix w = random_matrix(3, 1 + t % 3, rng);
    const PenaltyProfile p = penalty_profile(in.r, in.gamma, w, 0.5 + 0.05 * t);
    CHECK(std::abs(p.surrogate_value - p.expanded_value) <= 1e-10 * std::max(1.0, std::abs(p.surrogate_value)));
    CHECK(p.d.size() == in.r.rows());
  }

  SUBCASE("hand instance with n = 3") {
    Matrix r(3, 2);
    r << 0.0, 1.0, 0.5, -0.2, 1.0, 0.3;
    const CenteredLabelKernel g = gamma_matrix(one_hot(std::vector<int>{0, 0, 1}, 2));
    Matrix w(2, 1);
    w << 0.6, 0.8;
    const double sigma = 0.9;
    const PenaltyProfile p = penalty_profile(r, g, w, sigma);
    const std::vector<int> lab{0, 0, 1};
    for (int i = 0; i < 3; ++i) {
      double di = 0.0;
      for (int j = 0; j < 3; ++j) {
        const double k = std::exp(-std::pow((r.row(i) - r.row(j)).dot(w.col(0)), 2) / (2 * sigma * sigma));
        di += lab[i] == lab[j] ? g.gamma(i, j) * k : -std::abs(g.gamma(i, j)) * k;
      }
      CHECK(p.d(i) == doctest::Approx(di / (sigma * sigma)).epsilon(1e-12));
    }
    CHECK(p.surrogate_value == doctest::Approx(p.expanded_value).epsilon(1e-12));
  }

  SUBCASE("diagonal-only weighted kernel") {
    Matrix r(3, 1);
    r << 0.0, 100.0, 200.0;
    const CenteredLabelKernel g = gamma_matrix(one_hot(std::vector<int>{0, 1, 1}, 2));
    const PenaltyProfile p = penalty_profile(r, g, Matrix::Identity(1, 1), 1e-2);
    CHECK(std::abs(p.surrogate_value) < 1e-12);
    // exact cancellation up to rounding of terms of size d_i z_i^2
    const double scale = (p.d.array().abs() * r.col(0).array().square()).sum();
    CHECK(std::abs(p.expanded_value) <= 1e-14 * scale);
  }
}
