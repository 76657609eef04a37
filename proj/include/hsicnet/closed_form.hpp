#pragma once

// Closed-form layer weights: the kernel mean embedding W_s and the iterative
// spectral (ISM) fixed point W*, plus the analytic HSIC gradient and the
// per-sample penalty profile of the surrogate objective.

#include <span>
#include <stdexcept>
#include <string>

#include "hsicnet/kernel_core.hpp"

namespace hsicnet {

// q x beta; one column per class for W_s, orthonormal columns for W*.
using WeightMatrix = Matrix;

struct IsmState {
  Matrix q;            // R^T (Gamma_hat - Diag(Gamma_hat 1)) R
  Matrix gamma_hat;    // Gamma o K(RW, sigma)
  Vector eigenvalues;  // retained, descending
  int iterations = 0;
  double subspace_residual = 0.0;      // projector distance of the last step
  double stationarity_residual = 0.0;  // ||Q(W) W - W Lambda||_F
  double objective = 0.0;              // sum of Gamma_hat = Tr(Gamma K)
};

struct IsmResult {
  WeightMatrix w;
  IsmState state;
  bool converged = false;
};

// Thrown by ism_solve; carries the best iterate found.
class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& what, IsmResult best)
      : std::runtime_error(what), best_(std::move(best)) {}
  [[nodiscard]] const IsmResult& best() const { return best_; }

 private:
  IsmResult best_;
};

struct IsmOptions {
  double rank_tol = 1e-6;
  double conv_tol = 1e-6;
  int max_iter = 30;
};

struct EigenPairs {
  Matrix vectors;  // q x beta, orthonormal
  Vector values;   // beta, descending
};

struct PenaltyProfile {
  Vector d;
  double surrogate_value = 0.0;
  double expanded_value = 0.0;
};

/// Columns are per-class sums of the rows of R; with normalize the whole
/// matrix is scaled to unit Frobenius norm.
WeightMatrix kme_weights(const Matrix& r, std::span<const int> labels, bool normalize = true);

/// 2 X^T (D_psi - psi) X, which equals sum_ij psi_ij (x_i - x_j)(x_i - x_j)^T.
Matrix laplacian_form(const Matrix& psi, const Matrix& x);

IsmState ism_q(const Matrix& r, const CenteredLabelKernel& gamma, const WeightMatrix& w, double sigma);

/// Eigenpairs with lambda_k > rank_tol * max(lambda_1, abs_floor) and lambda_k > 0,
/// descending. When no eigenvalue is positive the leading pair is kept so the
/// result always has at least one column. The largest-magnitude entry of
/// each vector is made positive.
EigenPairs eigh_topk(const Matrix& s, double rank_tol, double abs_floor = 1e-300);

/// Fixed-point iteration from Gamma_hat = Gamma. Never throws on
/// non-convergence: returns the iterate with the largest Tr(Gamma K) and
/// converged = false.
IsmResult ism_fit(const Matrix& r, const CenteredLabelKernel& gamma, double sigma, const IsmOptions& opts = {});

/// Same iteration, but throws ConvergenceFailure (carrying the best iterate)
/// when max_iter is exhausted.
IsmResult ism_solve(const Matrix& r, const CenteredLabelKernel& gamma, double sigma, const IsmOptions& opts = {});

/// d/dW of sum_ij Gamma_ij exp(-tr(W^T A_ij W) / 2 sigma^2), A_ij = (r_i - r_j)(r_i - r_j)^T.
Matrix hsic_gradient(const Matrix& r, const CenteredLabelKernel& gamma, const WeightMatrix& w, double sigma);

/// ||(I - W W^T) grad||_F after orthonormalizing the columns of W.
double tangent_gradient_norm(const Matrix& r, const CenteredLabelKernel& gamma, const WeightMatrix& w, double sigma);

/// sum_ij Gamma_ij exp(-||W^T (r_i - r_j)||^2 / 2 sigma^2).
double projected_hsic_raw(const Matrix& r, const CenteredLabelKernel& gamma, const WeightMatrix& w, double sigma);

PenaltyProfile penalty_profile(const Matrix& r, const CenteredLabelKernel& gamma, const WeightMatrix& w, double sigma);

}  // namespace hsicnet
