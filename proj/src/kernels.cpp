#include "hsicnet/kernels.hpp"

#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hsicnet::kernels {

namespace {

inline double column_sq_dist(const Eigen::MatrixXd& t, Eigen::Index i, const Eigen::MatrixXd& u,
                             Eigen::Index j) {
  const double* x = t.col(i).data();
  const double* y = u.col(j).data();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < t.rows(); ++k) {
    const double d = x[k] - y[k];
    acc += d * d;
  }
  return acc;
}

inline void row_pair_sums(const Eigen::MatrixXd& m, std::span<const int> labels, Eigen::Index i,
                          double& same, double& diff) {
  same = 0.0;
  diff = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (j == i) continue;
    if (labels[i] == labels[j]) {
      same += m(i, j);
    } else {
      diff += m(i, j);
    }
  }
}

}  // namespace

namespace serial {

Eigen::MatrixXd sq_dists(const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd t = a.transpose();
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = column_sq_dist(t, i, t, j);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

Eigen::MatrixXd cross_sq_dists(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd ta = a.transpose();
  const Eigen::MatrixXd tb = b.transpose();
  Eigen::MatrixXd d(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) d(i, j) = column_sq_dist(ta, i, tb, j);
  }
  return d;
}

Eigen::MatrixXd gaussian_from_sq(const Eigen::MatrixXd& d2, double sigma) {
  const double scale = -1.0 / (2.0 * sigma * sigma);
  Eigen::MatrixXd k(d2.rows(), d2.cols());
  for (Eigen::Index j = 0; j < d2.cols(); ++j) {
    for (Eigen::Index i = 0; i < d2.rows(); ++i) k(i, j) = std::exp(d2(i, j) * scale);
  }
  return k;
}

Eigen::MatrixXd cos_features(const Eigen::MatrixXd& proj, const Eigen::VectorXd& phases,
                             double scale) {
  Eigen::MatrixXd out(proj.rows(), proj.cols());
  for (Eigen::Index j = 0; j < proj.cols(); ++j) {
    for (Eigen::Index i = 0; i < proj.rows(); ++i) {
      out(i, j) = scale * std::cos(proj(i, j) + phases(j));
    }
  }
  return out;
}

PairSums pair_sums(const Eigen::MatrixXd& m, std::span<const int> labels) {
  PairSums total;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double same = 0.0;
    double diff = 0.0;
    row_pair_sums(m, labels, i, same, diff);
    total.same += same;
    total.diff += diff;
  }
  return total;
}

}  // namespace serial

namespace omp {

Eigen::MatrixXd sq_dists(const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd t = a.transpose();
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = column_sq_dist(t, i, t, j);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

Eigen::MatrixXd cross_sq_dists(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd ta = a.transpose();
  const Eigen::MatrixXd tb = b.transpose();
  Eigen::MatrixXd d(a.rows(), b.rows());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) d(i, j) = column_sq_dist(ta, i, tb, j);
  }
  return d;
}

Eigen::MatrixXd gaussian_from_sq(const Eigen::MatrixXd& d2, double sigma) {
  const double scale = -1.0 / (2.0 * sigma * sigma);
  Eigen::MatrixXd k(d2.rows(), d2.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < d2.cols(); ++j) {
    for (Eigen::Index i = 0; i < d2.rows(); ++i) k(i, j) = std::exp(d2(i, j) * scale);
  }
  return k;
}

Eigen::MatrixXd cos_features(const Eigen::MatrixXd& proj, const Eigen::VectorXd& phases,
                             double scale) {
  Eigen::MatrixXd out(proj.rows(), proj.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < proj.cols(); ++j) {
    for (Eigen::Index i = 0; i < proj.rows(); ++i) {
      out(i, j) = scale * std::cos(proj(i, j) + phases(j));
    }
  }
  return out;
}

PairSums pair_sums(const Eigen::MatrixXd& m, std::span<const int> labels) {
  const Eigen::Index n = m.rows();
  std::vector<double> same(static_cast<std::size_t>(n));
  std::vector<double> diff(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    row_pair_sums(m, labels, i, same[static_cast<std::size_t>(i)],
                  diff[static_cast<std::size_t>(i)]);
  }
  PairSums total;
  for (std::size_t i = 0; i < same.size(); ++i) {
    total.same += same[i];
    total.diff += diff[i];
  }
  return total;
}

}  // namespace omp

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace hsicnet::kernels
