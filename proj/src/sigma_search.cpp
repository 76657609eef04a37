#include "hsicnet/sigma_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hsicnet/errors.hpp"
#include "hsicnet/kernels.hpp"

namespace hsicnet {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct PairDistances {
  std::vector<double> same;
  std::vector<double> diff;
};

PairDistances pair_distances(const Matrix& r, const PairSets& pairs) {
  if (pairs.same_class.empty() || pairs.diff_class.empty()) {
    throw InvalidArgument("separation objective needs nonempty same-class and cross-class pair sets");
  }
  const Matrix d2 = kernels::sq_dists(r);
  PairDistances out;
  out.same.reserve(pairs.same_class.size());
  out.diff.reserve(pairs.diff_class.size());
  for (const auto& [i, j] : pairs.same_class) out.same.push_back(d2(i, j));
  for (const auto& [i, j] : pairs.diff_class) out.diff.push_back(d2(i, j));
  return out;
}

double mean_kernel(const std::vector<double>& d2, double sigma) {
  const double scale = -1.0 / (2.0 * sigma * sigma);
  double acc = 0.0;
  for (const double v : d2) acc += std::exp(v * scale);
  return acc / static_cast<double>(d2.size());
}

double separation_from(const PairDistances& pd, double sigma) {
  return mean_kernel(pd.same, sigma) - mean_kernel(pd.diff, sigma);
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be positive and finite");
}

}  // namespace

double separation_objective(const Matrix& r, const PairSets& pairs, double sigma) {
  check_sigma(sigma);
  return separation_from(pair_distances(r, pairs), sigma);
}

Bracket default_bracket(const Matrix& r) {
  double m = median_pairwise_distance(r);
  if (!(m > 0.0)) {
    const Matrix d2 = kernels::sq_dists(r);
    m = d2.size() > 0 ? std::sqrt(d2.maxCoeff()) : 0.0;
  }
  if (!(m > 0.0)) throw DegenerateInput("all samples are identical; no bandwidth scale");
  return {1e-2 * m, 1e2 * m};
}

std::vector<double> log_grid(const Bracket& bracket, int points) {
  if (!(bracket.lo > 0.0) || !(bracket.hi > bracket.lo)) throw InvalidArgument("bracket must satisfy 0 < lo < hi");
  if (points < 2) throw InvalidArgument("grid needs at least two points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double a = std::log(bracket.lo);
  const double b = std::log(bracket.hi);
  for (int k = 0; k < points; ++k) grid[static_cast<std::size_t>(k)] = std::exp(a + (b - a) * k / (points - 1));
  grid.front() = bracket.lo;
  grid.back() = bracket.hi;
  return grid;
}

SigmaSearchResult maximize_on_log_scale(const std::function<double(double)>& objective, const Bracket& bracket,
                                        int grid_points, double log_tol) {
  const std::vector<double> grid = log_grid(bracket, grid_points);
  SigmaSearchResult res;
  res.lo = bracket.lo;
  res.hi = bracket.hi;
  res.objective = kNegInf;
  std::size_t arg = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double v = objective(grid[k]);
    ++res.evaluations;
    if (v > res.objective) {
      res.objective = v;
      res.sigma = grid[k];
      arg = k;
    }
  }
  if (res.objective == kNegInf) throw DegenerateInput("objective undefined at every grid bandwidth");

  double a = std::log(grid[arg == 0 ? 0 : arg - 1]);
  double b = std::log(grid[std::min(arg + 1, grid.size() - 1)]);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto eval = [&](double u) {
    const double s = std::exp(u);
    const double v = objective(s);
    ++res.evaluations;
    if (v > res.objective) {
      res.objective = v;
      res.sigma = s;
    }
    return v;
  };
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > log_tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }
  const double span = std::log(bracket.hi) - std::log(bracket.lo);
  const double u = std::log(res.sigma) - std::log(bracket.lo);
  res.at_boundary = u <= 1e-9 * span || u >= (1.0 - 1e-9) * span;
  return res;
}

SigmaSearchResult optimize_sigma_separation(const Matrix& r, const PairSets& pairs, const Bracket& bracket,
                                            int grid_points) {
  const PairDistances pd = pair_distances(r, pairs);
  if (*std::max_element(pd.same.begin(), pd.same.end()) == 0.0) {
    throw DegenerateInput("every class is a single repeated point; separation has no interior optimum");
  }
  if (*std::max_element(pd.diff.begin(), pd.diff.end()) == 0.0) {
    throw DegenerateInput("all samples are identical");
  }
  return maximize_on_log_scale([&](double s) { return separation_from(pd, s); }, bracket, grid_points);
}

SigmaSearchResult optimize_sigma_separation(const Matrix& r, const PairSets& pairs, int grid_points) {
  return optimize_sigma_separation(r, pairs, default_bracket(r), grid_points);
}

SigmaSearchResult optimize_sigma_hsic(const Matrix& r, const HsicReference& label_kernel, const WeightRule& rule,
                                      const Bracket& bracket, int grid_points) {
  auto objective = [&](double sigma) {
    const Matrix w = rule(sigma);
    try {
      return hsic_normalized(gaussian_kernel(r * w, sigma), label_kernel);
    } catch (const DegenerateInput&) {
      return kNegInf;
    }
  };
  return maximize_on_log_scale(objective, bracket, grid_points);
}

SigmaSearchResult next_sigma_for_ws(double anchor, double h_prev, const std::function<double(double)>& layer_hsic,
                                    const DecaySchedule& schedule) {
  check_sigma(anchor);
  if (!(schedule.decay > 0.0 && schedule.decay < 1.0)) throw InvalidArgument("decay must lie in (0, 1)");
  if (schedule.max_steps < 0) throw InvalidArgument("max_steps must be >= 0");
  SigmaSearchResult res;
  res.objective = kNegInf;
  res.hi = anchor;
  res.lo = anchor;
  for (int k = 0; k <= schedule.max_steps; ++k) {
    const double sigma = anchor * std::pow(schedule.decay, k);
    res.lo = sigma;
    double h = kNegInf;
    try {
      h = layer_hsic(sigma);
    } catch (const DegenerateInput&) {
    }
    ++res.evaluations;
    if (h > res.objective) {
      res.objective = h;
      res.sigma = sigma;
      res.steps = k;
    }
    if (schedule.first_improvement && h > h_prev) break;
  }
  if (res.objective == kNegInf) throw DegenerateInput("layer HSIC undefined at every bandwidth of the ladder");
  res.improved = res.objective > h_prev;
  res.at_boundary = res.steps == 0 || res.steps == schedule.max_steps;
  return res;
}

}  // namespace hsicnet
