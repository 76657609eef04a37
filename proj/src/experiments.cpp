#include "hsicnet/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hsicnet/errors.hpp"
#include "hsicnet/kernels.hpp"

namespace hsicnet {

RunConfig monotone_simulation_config(std::uint64_t seed) {
  RunConfig c;
  c.solver = Solver::Ws;
  c.rff_width = 0;
  c.sigma_strategy = SigmaStrategy::Decay;
  c.hsic_threshold = 0.99;
  c.max_layers = 30;
  c.seed = seed;
  return c;
}

RunConfig two_layer_config(double sigma, int rff_width) {
  RunConfig c;
  c.solver = Solver::Ws;
  c.rff_width = rff_width;
  c.sigma_strategy = SigmaStrategy::Fixed;
  c.fixed_sigma = sigma;
  c.hsic_threshold = 1.0;
  c.max_layers = 2;
  return c;
}

Vector centroid_line_projection(const Matrix& z, std::span<const int> labels) {
  if (static_cast<Eigen::Index>(labels.size()) != z.rows()) throw InvalidArgument("projection: label count mismatch");
  Eigen::RowVectorXd m0 = Eigen::RowVectorXd::Zero(z.cols());
  Eigen::RowVectorXd m1 = Eigen::RowVectorXd::Zero(z.cols());
  int n0 = 0;
  int n1 = 0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    if (labels[static_cast<std::size_t>(i)] == 0) {
      m0 += z.row(i);
      ++n0;
    } else if (labels[static_cast<std::size_t>(i)] == 1) {
      m1 += z.row(i);
      ++n1;
    }
  }
  if (n0 == 0 || n1 == 0) throw InvalidArgument("projection needs samples from classes 0 and 1");
  m0 /= n0;
  m1 /= n1;
  const Eigen::RowVectorXd dir = m1 - m0;
  const double len = dir.norm();
  if (!(len > 0.0)) throw DegenerateInput("class centroids coincide; no projection direction");
  const Eigen::RowVectorXd mid = 0.5 * (m0 + m1);
  return ((z.rowwise() - mid) * dir.transpose()) / len;
}

bool separable_1d(const Vector& p, std::span<const int> labels) {
  double lo0 = std::numeric_limits<double>::infinity();
  double hi0 = -lo0;
  double lo1 = lo0;
  double hi1 = -lo0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (labels[static_cast<std::size_t>(i)] == 0) {
      lo0 = std::min(lo0, p(i));
      hi0 = std::max(hi0, p(i));
    } else {
      lo1 = std::min(lo1, p(i));
      hi1 = std::max(hi1, p(i));
    }
  }
  return hi0 < lo1 || hi1 < lo0;
}

std::vector<int> class_contiguous_order(std::span<const int> labels) {
  std::vector<int> order(labels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return labels[static_cast<std::size_t>(a)] < labels[static_cast<std::size_t>(b)];
  });
  return order;
}

Matrix layer_kernel(const Network& net, const Matrix& x, int layer) {
  if (layer < 0 || layer > static_cast<int>(net.layers.size())) {
    throw InvalidArgument("layer " + std::to_string(layer) + " out of range 0.." + std::to_string(net.layers.size()));
  }
  if (layer == 0) return gaussian_kernel(x, default_bracket(x).lo * 100.0);
  const auto outs = forward(net, x);
  return activation_gram(net.layers[static_cast<std::size_t>(layer - 1)], outs[static_cast<std::size_t>(layer - 1)]);
}

std::pair<double, double> block_means(const Matrix& kernel, std::span<const int> labels) {
  const auto sums = kernels::pair_sums(kernel, labels);
  double same = 0.0;
  double diff = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (i == j) continue;
      (labels[i] == labels[j] ? same : diff) += 1.0;
    }
  }
  return {same > 0 ? sums.same / same : 0.0, diff > 0 ? sums.diff / diff : 0.0};
}

std::string kernel_csv(const Matrix& kernel) {
  std::ostringstream out;
  out.precision(17);
  for (Eigen::Index i = 0; i < kernel.rows(); ++i) {
    for (Eigen::Index j = 0; j < kernel.cols(); ++j) {
      if (j) out << ',';
      out << kernel(i, j);
    }
    out << '\n';
  }
  return out.str();
}

std::string kernel_pgm(const Matrix& kernel) {
  std::ostringstream out;
  out << "P5\n" << kernel.cols() << ' ' << kernel.rows() << "\n255\n";
  for (Eigen::Index i = 0; i < kernel.rows(); ++i) {
    for (Eigen::Index j = 0; j < kernel.cols(); ++j) {
      const double v = std::clamp(kernel(i, j), 0.0, 1.0);
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * (1.0 - v)))));
    }
  }
  return out.str();
}

bool single_peak(const std::vector<double>& values, double tol) {
  int prev = 0;
  int ups_to_downs = 0;
  int downs_to_ups = 0;
  bool rose = false;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    const int sign = d > tol ? 1 : (d < -tol ? -1 : 0);
    if (sign == 0) continue;
    if (sign == 1) rose = true;
    if (prev == 1 && sign == -1) ++ups_to_downs;
    if (prev == -1 && sign == 1) ++downs_to_ups;
    prev = sign;
  }
  return rose && ups_to_downs == 1 && downs_to_ups == 0;
}

double first_layer_hsic(const Dataset& data, const RunConfig& config, double sigma) {
  const HsicReference ky = make_hsic_reference(data.y * data.y.transpose());
  Matrix w;
  if (config.solver == Solver::WStar) {
    const CenteredLabelKernel gamma = gamma_matrix(data.y);
    w = ism_fit(data.x, gamma, sigma, {config.rank_tol, config.conv_tol, config.ism_max_iter}).w;
  } else {
    w = kme_weights(data.x, data.labels, config.normalize_ws);
  }
  try {
    return hsic_normalized(gaussian_kernel(data.x * w, sigma), ky);
  } catch (const DegenerateInput&) {
    return -std::numeric_limits<double>::infinity();
  }
}

SigmaSweep sigma_sweep(const Dataset& data, const RunConfig& config, int points) {
  const Bracket bracket = default_bracket(data.x);
  SigmaSweep sweep;
  std::vector<double> sep;
  std::vector<double> hs;
  for (const double s : log_grid(bracket, points)) {
    SweepRow row{s, separation_objective(data.x, data.pair_sets, s), first_layer_hsic(data, config, s)};
    sep.push_back(row.separation);
    hs.push_back(row.hsic);
    sweep.rows.push_back(row);
  }
  sweep.separation_opt = optimize_sigma_separation(data.x, data.pair_sets, bracket);
  sweep.hsic_opt =
      maximize_on_log_scale([&](double s) { return first_layer_hsic(data, config, s); }, bracket, config.sigma_grid);
  sweep.separation_single_peak = single_peak(sep);
  sweep.hsic_single_peak = single_peak(hs);
  return sweep;
}

}  // namespace hsicnet
