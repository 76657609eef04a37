#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "hsicnet/kernel_core.hpp"

namespace testing_util {

using hsicnet::Matrix;
using hsicnet::Vector;

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = g(rng);
  return m;
}

// Labels 0..tau-1 with every class present.
inline std::vector<int> random_labels(int n, int tau, std::mt19937_64& rng) {
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i % tau;
  std::shuffle(labels.begin(), labels.end(), rng);
  return labels;
}

inline double brute_kernel(const Matrix& r, Eigen::Index i, Eigen::Index j, double sigma) {
  return std::exp(-(r.row(i) - r.row(j)).squaredNorm() / (2.0 * sigma * sigma));
}

// Two Gaussian blobs in 2-D, centers at -c and +c on the first axis.
inline std::pair<Matrix, std::vector<int>> blobs(int per_class, double c, std::mt19937_64& rng) {
  Matrix x = random_matrix(2 * per_class, 2, rng, 0.3);
  std::vector<int> labels;
  for (int i = 0; i < 2 * per_class; ++i) {
    const int lab = i < per_class ? 0 : 1;
    x(i, 0) += lab == 0 ? -c : c;
    labels.push_back(lab);
  }
  return {x, labels};
}

}  // namespace testing_util
