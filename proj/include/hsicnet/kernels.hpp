#pragma once

// Dense O(n^2) building blocks shared by every module.
//
// Each routine exists twice: a plain serial reference in `serial::` and an
// OpenMP version in `omp::`. Both produce bit-identical results for any
// thread count (reductions are done per row, then summed in row order), so
// the serial variants double as test oracles and benchmark baselines. The
// rest of the library calls the unqualified names below, which forward to
// the OpenMP variants.

#include <Eigen/Dense>

#include <span>

namespace hsicnet::kernels {

struct PairSums {
  double same = 0.0;  // sum over ordered pairs i != j with equal labels
  double diff = 0.0;  // sum over ordered pairs with different labels
};

namespace serial {

// ||a_i - a_j||^2 for all row pairs; exact zeros on the diagonal.
Eigen::MatrixXd sq_dists(const Eigen::MatrixXd& a);
Eigen::MatrixXd cross_sq_dists(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
// exp(-d2 / (2 sigma^2)) elementwise.
Eigen::MatrixXd gaussian_from_sq(const Eigen::MatrixXd& d2, double sigma);
// scale * cos(proj + phases^T) elementwise, phases broadcast over rows.
Eigen::MatrixXd cos_features(const Eigen::MatrixXd& proj, const Eigen::VectorXd& phases,
                             double scale);
PairSums pair_sums(const Eigen::MatrixXd& m, std::span<const int> labels);

}  // namespace serial

namespace omp {

Eigen::MatrixXd sq_dists(const Eigen::MatrixXd& a);
Eigen::MatrixXd cross_sq_dists(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
Eigen::MatrixXd gaussian_from_sq(const Eigen::MatrixXd& d2, double sigma);
Eigen::MatrixXd cos_features(const Eigen::MatrixXd& proj, const Eigen::VectorXd& phases,
                             double scale);
PairSums pair_sums(const Eigen::MatrixXd& m, std::span<const int> labels);

}  // namespace omp

inline Eigen::MatrixXd sq_dists(const Eigen::MatrixXd& a) { return omp::sq_dists(a); }
inline Eigen::MatrixXd cross_sq_dists(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return omp::cross_sq_dists(a, b);
}
inline Eigen::MatrixXd gaussian_from_sq(const Eigen::MatrixXd& d2, double sigma) {
  return omp::gaussian_from_sq(d2, sigma);
}
inline Eigen::MatrixXd cos_features(const Eigen::MatrixXd& proj, const Eigen::VectorXd& phases,
                                    double scale) {
  return omp::cos_features(proj, phases, scale);
}
inline PairSums pair_sums(const Eigen::MatrixXd& m, std::span<const int> labels) {
  return omp::pair_sums(m, labels);
}

// Number of threads the OpenMP variants will use (1 without OpenMP).
int max_threads();

}  // namespace hsicnet::kernels
