#pragma once

// Gaussian kernels, label centering, HSIC, random Fourier features and the
// geometric convergence metrics (scatter trace ratio, cosine similarity ratio).
//
// Samples are rows throughout: an n x q matrix holds n samples of dimension q.

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace hsicnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Gamma = H Y Y^T H. Positive on same-class pairs, negative across classes,
// rows sum to zero.
struct CenteredLabelKernel {
  Matrix gamma;
};

// Unordered index pairs i < j split by label agreement.
struct PairSets {
  std::vector<std::pair<int, int>> same_class;
  std::vector<std::pair<int, int>> diff_class;
};

PairSets make_pair_sets(std::span<const int> labels);

/// H = I - (1/n) 1 1^T.
Matrix centering_matrix(Eigen::Index n);

/// Gamma = H Y Y^T H for a one-hot label matrix. Throws InvalidArgument on a
/// row that is not one-hot or on an empty class column.
CenteredLabelKernel gamma_matrix(const Matrix& y_onehot);

/// K_ij = exp(-||r_i - r_j||^2 / (2 sigma^2)).
Matrix gaussian_kernel(const Matrix& r, double sigma);
Matrix gaussian_cross_kernel(const Matrix& a, const Matrix& b, double sigma);

/// Tr(Gamma K).
double hsic_raw(const Matrix& k, const CenteredLabelKernel& gamma);

// Centered reference kernel, precomputed once when the same K_Y is compared
// against many candidate kernels.
struct HsicReference {
  Matrix centered;
  double norm = 0.0;
};

HsicReference make_hsic_reference(const Matrix& k);

/// Tr(H Kx H Ky) / sqrt(Tr(H Kx H Kx) Tr(H Ky H Ky)), in [-1, 1]. Throws
/// DegenerateInput when either kernel is constant after centering.
double hsic_normalized(const Matrix& kx, const Matrix& ky);
double hsic_normalized(const Matrix& kx, const HsicReference& ky);

// Random Fourier feature map for the Gaussian kernel:
// phi(r) = sqrt(2/D) cos(r^T Omega + b), Omega ~ N(0, 1/sigma^2), b ~ U[0, 2 pi).
struct RffMap {
  Matrix frequencies;  // q x D, already divided by sigma
  Vector phases;       // D
  double sigma = 1.0;
  std::uint64_t seed = 0;

  [[nodiscard]] Eigen::Index width() const { return frequencies.cols(); }
  [[nodiscard]] Eigen::Index input_dim() const { return frequencies.rows(); }
};

/// Deterministic in (q, width, seed); sigma only rescales the frequencies, so
/// maps sampled with the same seed at different bandwidths share their draws.
RffMap rff_sample(Eigen::Index input_dim, double sigma, Eigen::Index width, std::uint64_t seed);
Matrix rff_apply(const RffMap& map, const Matrix& r);

/// Tr(S_w) / Tr(S_b) over same-class / cross-class sample pairs (i != j).
double scatter_trace_ratio(const Matrix& z, std::span<const int> labels);

/// Summed cross-class inner products over summed same-class inner products.
double cosine_similarity_ratio(const Matrix& phi, const PairSets& pairs);
/// Same ratio from a precomputed Gram matrix of the activations.
double cosine_similarity_ratio_from_gram(const Matrix& gram, std::span<const int> labels);

/// Median of ||r_i - r_j|| over i < j (lower median); 0 when n < 2.
double median_pairwise_distance(const Matrix& r);

int count_classes(std::span<const int> labels);
Matrix one_hot(std::span<const int> labels, int num_classes);

}  // namespace hsicnet
