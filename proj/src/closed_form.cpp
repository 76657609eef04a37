#include "hsicnet/closed_form.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hsicnet/errors.hpp"

namespace hsicnet {

namespace {

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be positive and finite");
}

void check_shapes(const Matrix& r, const CenteredLabelKernel& gamma) {
  if (gamma.gamma.rows() != r.rows() || gamma.gamma.cols() != r.rows()) {
    throw InvalidArgument("gamma is " + std::to_string(gamma.gamma.rows()) + "x" + std::to_string(gamma.gamma.cols()) +
                          " but R has " + std::to_string(r.rows()) + " rows");
  }
}

void check_weights(const Matrix& r, const WeightMatrix& w) {
  if (w.rows() != r.cols()) throw InvalidArgument("weight rows do not match the input dimension");
  if (w.cols() < 1) throw InvalidArgument("weight matrix has no columns");
}

// R^T (G - Diag(G 1)) R
Matrix build_q(const Matrix& r, const Matrix& gh) {
  const Vector degree = gh.rowwise().sum();
  Matrix q = r.transpose() * (gh * r);
  q.noalias() -= r.transpose() * degree.asDiagonal() * r;
  return 0.5 * (q + q.transpose());
}

Matrix weighted_gamma(const Matrix& r, const CenteredLabelKernel& gamma, const WeightMatrix& w, double sigma) {
  return gamma.gamma.cwiseProduct(gaussian_kernel(r * w, sigma));
}

double projector_distance(const Matrix& a, const Matrix& b) {
  return (a * a.transpose() - b * b.transpose()).norm();
}

double stationarity(const Matrix& q, const Matrix& w) {
  const Matrix qw = q * w;
  const Matrix lambda = w.transpose() * qw;
  return (qw - w * lambda).norm();
}

IsmResult iterate(const Matrix& r, const CenteredLabelKernel& gamma, double sigma, const IsmOptions& opts) {
  check_sigma(sigma);
  check_shapes(r, gamma);
  if (r.rows() < 2) throw InvalidArgument("ISM needs at least two samples");
  if (opts.max_iter < 1) throw InvalidArgument("ism max_iter must be >= 1");
  if (gamma.gamma.cwiseAbs().maxCoeff() < 1e-12) throw InvalidArgument("ISM needs at least two classes");

  EigenPairs ep = eigh_topk(build_q(r, gamma.gamma), opts.rank_tol);
  Matrix w = ep.vectors;
  IsmResult best;
  double best_obj = -std::numeric_limits<double>::infinity();

  for (int it = 1; it <= opts.max_iter; ++it) {
    IsmState state;
    state.gamma_hat = weighted_gamma(r, gamma, w, sigma);
    state.q = build_q(r, state.gamma_hat);
    state.objective = state.gamma_hat.sum();
    state.iterations = it;
    state.stationarity_residual = stationarity(state.q, w);

    ep = eigh_topk(state.q, opts.rank_tol);
    const double step = projector_distance(ep.vectors, w);
    state.subspace_residual = step;
    state.eigenvalues = ep.values;
    // residual also checked in gradient units (grad = 2/sigma^2 Q W)
    const double grad_scale = std::max(1.0, 2.0 / (sigma * sigma));
    const bool done = step <= opts.conv_tol && grad_scale * state.stationarity_residual <= 10.0 * opts.conv_tol;

    if (done) return {w, std::move(state), true};
    if (state.objective > best_obj) {
      best_obj = state.objective;
      best = {w, state, false};
    }
    w = ep.vectors;
  }
  return best;
}

}  // namespace

WeightMatrix kme_weights(const Matrix& r, std::span<const int> labels, bool normalize) {
  if (static_cast<Eigen::Index>(labels.size()) != r.rows()) throw InvalidArgument("kme_weights: label count mismatch");
  const int classes = count_classes(labels);
  std::vector<int> counts(static_cast<std::size_t>(std::max(classes, 0)), 0);
  for (const int l : labels) ++counts[static_cast<std::size_t>(l)];
  for (int c = 0; c < classes; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) throw InvalidArgument("kme_weights: class " + std::to_string(c) + " is empty");
  }
  if (classes == 0) throw InvalidArgument("kme_weights: no samples");
  WeightMatrix w = Matrix::Zero(r.cols(), classes);
  for (Eigen::Index i = 0; i < r.rows(); ++i) w.col(labels[static_cast<std::size_t>(i)]) += r.row(i).transpose();
  if (normalize) {
    const double zeta = w.norm();
    if (!(zeta > 0.0)) throw DegenerateInput("kme_weights: class sums are all zero, cannot normalize");
    w /= zeta;
  }
  return w;
}

Matrix laplacian_form(const Matrix& psi, const Matrix& x) {
  if (psi.rows() != psi.cols() || psi.rows() != x.rows()) throw InvalidArgument("laplacian_form: shape mismatch");
  const Vector degree = psi.rowwise().sum();
  Matrix out = x.transpose() * degree.asDiagonal() * x;
  out.noalias() -= x.transpose() * psi * x;
  return 2.0 * out;
}

IsmState ism_q(const Matrix& r, const CenteredLabelKernel& gamma, const WeightMatrix& w, double sigma) {
  check_sigma(sigma);
  check_shapes(r, gamma);
  check_weights(r, w);
  IsmState state;
  state.gamma_hat = weighted_gamma(r, gamma, w, sigma);
  state.q = build_q(r, state.gamma_hat);
  state.objective = state.gamma_hat.sum();
  return state;
}

EigenPairs eigh_topk(const Matrix& s, double rank_tol, double abs_floor) {
  if (s.rows() != s.cols() || s.rows() == 0) throw InvalidArgument("eigh_topk: matrix must be square and nonempty");
  if (!s.allFinite()) throw InvalidArgument("eigh_topk: non-finite entry");
  const double asym = (s - s.transpose()).norm();
  if (asym > 1e-10 * std::max(1.0, s.norm())) throw InvalidArgument("eigh_topk: matrix is not symmetric");
  const Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (s + s.transpose()));
  if (solver.info() != Eigen::Success) throw DegenerateInput("eigh_topk: eigensolver failed");
  const Vector& vals = solver.eigenvalues();
  const Eigen::Index q = s.rows();
  const double top = vals(q - 1);
  const double threshold = rank_tol * std::max(top, abs_floor);
  Eigen::Index keep = 0;
  while (keep < q && vals(q - 1 - keep) > 0.0 && vals(q - 1 - keep) > threshold) ++keep;
  keep = std::max<Eigen::Index>(keep, 1);

  EigenPairs out;
  out.vectors.resize(q, keep);
  out.values.resize(keep);
  for (Eigen::Index k = 0; k < keep; ++k) {
    Vector v = solver.eigenvectors().col(q - 1 - k);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    out.vectors.col(k) = v;
    out.values(k) = vals(q - 1 - k);
  }
  return out;
}

IsmResult ism_fit(const Matrix& r, const CenteredLabelKernel& gamma, double sigma, const IsmOptions& opts) {
  return iterate(r, gamma, sigma, opts);
}

IsmResult ism_solve(const Matrix& r, const CenteredLabelKernel& gamma, double sigma, const IsmOptions& opts) {
  IsmResult res = iterate(r, gamma, sigma, opts);
  if (!res.converged) {
    throw ConvergenceFailure("ISM did not converge in " + std::to_string(opts.max_iter) + " iterations", std::move(res));
  }
  return res;
}

Matrix hsic_gradient(const Matrix& r, const CenteredLabelKernel& gamma, const WeightMatrix& w, double sigma) {
  const IsmState s = ism_q(r, gamma, w, sigma);
  // sum_ij Gamma_hat_ij A_ij = -2 Q
  return (2.0 / (sigma * sigma)) * s.q * w;
}

double tangent_gradient_norm(const Matrix& r, const CenteredLabelKernel& gamma, const WeightMatrix& w, double sigma) {
  check_weights(r, w);
  const Eigen::HouseholderQR<Matrix> qr(w);
  const Matrix basis = qr.householderQ() * Matrix::Identity(w.rows(), w.cols());
  const Matrix g = hsic_gradient(r, gamma, basis, sigma);
  return (g - basis * (basis.transpose() * g)).norm();
}

double projected_hsic_raw(const Matrix& r, const CenteredLabelKernel& gamma, const WeightMatrix& w, double sigma) {
  check_sigma(sigma);
  check_shapes(r, gamma);
  check_weights(r, w);
  return weighted_gamma(r, gamma, w, sigma).sum();
}

PenaltyProfile penalty_profile(const Matrix& r, const CenteredLabelKernel& gamma, const WeightMatrix& w, double sigma) {
  const IsmState s = ism_q(r, gamma, w, sigma);
  const double inv = 1.0 / (sigma * sigma);
  PenaltyProfile p;
  p.d = inv * s.gamma_hat.rowwise().sum();
  p.surrogate_value = inv * (w.transpose() * s.q * w).trace();
  const Matrix z = r * w;
  const Matrix zzt = z * z.transpose();
  p.expanded_value = inv * s.gamma_hat.cwiseProduct(zzt).sum() - p.d.dot(z.rowwise().squaredNorm());
  return p;
}

}  // namespace hsicnet
