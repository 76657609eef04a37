#include "hsicnet/kernel_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "hsicnet/errors.hpp"
#include "hsicnet/kernels.hpp"

namespace hsicnet {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite entry");
}

void require_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("sigma must be positive and finite, got " + std::to_string(sigma));
  }
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) throw InvalidArgument(std::string(what) + ": matrix is not square");
}

// H M H without forming H.
Matrix double_center(const Matrix& m) {
  const Vector row_mean = m.rowwise().mean();
  const Eigen::RowVectorXd col_mean = m.colwise().mean();
  const double grand = m.mean();
  Matrix c = m;
  c.colwise() -= row_mean;
  c.rowwise() -= col_mean;
  c.array() += grand;
  return c;
}

double centered_tolerance(Eigen::Index n) { return 1e-12 * static_cast<double>(std::max<Eigen::Index>(n, 1)); }

}  // namespace

PairSets make_pair_sets(std::span<const int> labels) {
  PairSets sets;
  const int n = static_cast<int>(labels.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (labels[i] == labels[j]) {
        sets.same_class.emplace_back(i, j);
      } else {
        sets.diff_class.emplace_back(i, j);
      }
    }
  }
  return sets;
}

Matrix centering_matrix(Eigen::Index n) {
  if (n < 1) throw InvalidArgument("centering_matrix: n must be >= 1");
  Matrix h = Matrix::Constant(n, n, -1.0 / static_cast<double>(n));
  h.diagonal().array() += 1.0;
  return h;
}

CenteredLabelKernel gamma_matrix(const Matrix& y) {
  if (y.rows() < 1 || y.cols() < 1) throw InvalidArgument("gamma_matrix: empty label matrix");
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    int ones = 0;
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
      const double v = y(i, c);
      if (v == 1.0) {
        ++ones;
      } else if (v != 0.0) {
        ones = -1;
        break;
      }
    }
    if (ones != 1) throw InvalidArgument("gamma_matrix: row " + std::to_string(i) + " is not one-hot");
  }
  const Eigen::RowVectorXd counts = y.colwise().sum();
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    if (counts(c) == 0.0) throw InvalidArgument("gamma_matrix: class " + std::to_string(c) + " is empty");
  }
  // H Y Y^T H = (Y - 1 mean^T)(Y - 1 mean^T)^T
  Matrix yc = y;
  yc.rowwise() -= y.colwise().mean();
  Matrix g = yc * yc.transpose();
  g = 0.5 * (g + g.transpose());
  return {std::move(g)};
}

Matrix gaussian_kernel(const Matrix& r, double sigma) {
  require_sigma(sigma);
  require_finite(r, "gaussian_kernel");
  return kernels::gaussian_from_sq(kernels::sq_dists(r), sigma);
}

Matrix gaussian_cross_kernel(const Matrix& a, const Matrix& b, double sigma) {
  require_sigma(sigma);
  require_finite(a, "gaussian_cross_kernel");
  require_finite(b, "gaussian_cross_kernel");
  if (a.cols() != b.cols()) throw InvalidArgument("gaussian_cross_kernel: column count mismatch");
  return kernels::gaussian_from_sq(kernels::cross_sq_dists(a, b), sigma);
}

double hsic_raw(const Matrix& k, const CenteredLabelKernel& gamma) {
  if (k.rows() != gamma.gamma.rows() || k.cols() != gamma.gamma.cols()) {
    throw InvalidArgument("hsic_raw: kernel and gamma shapes differ");
  }
  // Tr(Gamma K) = sum_ij Gamma_ij K_ji
  return gamma.gamma.cwiseProduct(k.transpose()).sum();
}

HsicReference make_hsic_reference(const Matrix& k) {
  require_square(k, "hsic reference");
  HsicReference ref;
  ref.centered = double_center(k);
  ref.norm = ref.centered.norm();
  if (!(ref.norm > centered_tolerance(k.rows()))) {
    throw DegenerateInput("hsic_normalized: reference kernel is constant after centering");
  }
  return ref;
}

double hsic_normalized(const Matrix& kx, const HsicReference& ky) {
  require_square(kx, "hsic_normalized");
  if (kx.rows() != ky.centered.rows()) throw InvalidArgument("hsic_normalized: kernel sizes differ");
  const Matrix cx = double_center(kx);
  const double nx = cx.norm();
  if (!(nx > centered_tolerance(kx.rows()))) {
    throw DegenerateInput("hsic_normalized: kernel is constant after centering");
  }
  return cx.cwiseProduct(ky.centered).sum() / (nx * ky.norm);
}

double hsic_normalized(const Matrix& kx, const Matrix& ky) {
  return hsic_normalized(kx, make_hsic_reference(ky));
}

RffMap rff_sample(Eigen::Index input_dim, double sigma, Eigen::Index width, std::uint64_t seed) {
  require_sigma(sigma);
  if (width < 1) throw InvalidArgument("rff_sample: width must be >= 1");
  if (input_dim < 1) throw InvalidArgument("rff_sample: input dimension must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
  RffMap map;
  map.sigma = sigma;
  map.seed = seed;
  map.frequencies.resize(input_dim, width);
  for (Eigen::Index j = 0; j < width; ++j) {
    for (Eigen::Index i = 0; i < input_dim; ++i) map.frequencies(i, j) = normal(rng) / sigma;
  }
  map.phases.resize(width);
  for (Eigen::Index j = 0; j < width; ++j) map.phases(j) = uniform(rng);
  return map;
}

Matrix rff_apply(const RffMap& map, const Matrix& r) {
  if (r.cols() != map.input_dim()) {
    throw InvalidArgument("rff_apply: input has " + std::to_string(r.cols()) + " columns, map expects " +
                          std::to_string(map.input_dim()));
  }
  const double scale = std::sqrt(2.0 / static_cast<double>(map.width()));
  const Matrix proj = r * map.frequencies;
  return kernels::cos_features(proj, map.phases, scale);
}

double scatter_trace_ratio(const Matrix& z, std::span<const int> labels) {
  if (static_cast<Eigen::Index>(labels.size()) != z.rows()) {
    throw InvalidArgument("scatter_trace_ratio: label count differs from row count");
  }
  const int classes = count_classes(labels);
  // Sum over ordered same-class pairs of ||z_i - z_j||^2 = sum_c 2 n_c sum_{i in c} ||z_i - mu_c||^2;
  // the total over all ordered pairs is 2 n sum_i ||z_i - mu||^2.
  std::vector<int> counts(static_cast<std::size_t>(classes), 0);
  Matrix means = Matrix::Zero(classes, z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    means.row(labels[i]) += z.row(i);
    ++counts[static_cast<std::size_t>(labels[i])];
  }
  int present = 0;
  for (int c = 0; c < classes; ++c) {
    if (counts[static_cast<std::size_t>(c)] > 0) {
      means.row(c) /= counts[static_cast<std::size_t>(c)];
      ++present;
    }
  }
  if (present < 2) throw InvalidArgument("scatter_trace_ratio: need at least two classes");
  const Eigen::RowVectorXd mu = z.colwise().mean();
  double within = 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    within += 2.0 * counts[static_cast<std::size_t>(labels[i])] * (z.row(i) - means.row(labels[i])).squaredNorm();
    total += 2.0 * static_cast<double>(z.rows()) * (z.row(i) - mu).squaredNorm();
  }
  const double between = total - within;
  if (!(between > 1e-300) || !(between > 1e-14 * total)) {
    throw DegenerateInput("scatter_trace_ratio: between-class scatter is zero");
  }
  return within / between;
}

double cosine_similarity_ratio(const Matrix& phi, const PairSets& pairs) {
  const auto in_range = [&](const auto& set) {
    return std::all_of(set.begin(), set.end(), [&](const auto& p) {
      return static_cast<Eigen::Index>(std::max(p.first, p.second)) < phi.rows();
    });
  };
  if (!in_range(pairs.same_class) || !in_range(pairs.diff_class)) {
    throw InvalidArgument("cosine_similarity_ratio: pair index exceeds row count");
  }
  double same = 0.0;
  for (const auto& [i, j] : pairs.same_class) same += phi.row(i).dot(phi.row(j));
  double diff = 0.0;
  for (const auto& [i, j] : pairs.diff_class) diff += phi.row(i).dot(phi.row(j));
  if (same == 0.0) throw DegenerateInput("cosine_similarity_ratio: same-class inner products sum to zero");
  return diff / same;
}

double cosine_similarity_ratio_from_gram(const Matrix& gram, std::span<const int> labels) {
  require_square(gram, "cosine_similarity_ratio_from_gram");
  if (static_cast<Eigen::Index>(labels.size()) != gram.rows()) {
    throw InvalidArgument("cosine_similarity_ratio_from_gram: label count differs from gram size");
  }
  const auto sums = kernels::pair_sums(gram, labels);
  if (sums.same == 0.0) throw DegenerateInput("cosine_similarity_ratio: same-class inner products sum to zero");
  return sums.diff / sums.same;
}

double median_pairwise_distance(const Matrix& r) {
  const Eigen::Index n = r.rows();
  if (n < 2) return 0.0;
  const Matrix d2 = kernels::sq_dists(r);
  std::vector<double> upper;
  upper.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) upper.push_back(d2(i, j));
  }
  const auto mid = upper.begin() + static_cast<std::ptrdiff_t>((upper.size() - 1) / 2);
  std::nth_element(upper.begin(), mid, upper.end());
  return std::sqrt(*mid);
}

int count_classes(std::span<const int> labels) {
  int top = -1;
  for (const int l : labels) {
    if (l < 0) throw InvalidArgument("labels must be non-negative");
    top = std::max(top, l);
  }
  return top + 1;
}

Matrix one_hot(std::span<const int> labels, int num_classes) {
  Matrix y = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) throw InvalidArgument("one_hot: label out of range");
    y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return y;
}

}  // namespace hsicnet
