#pragma once

// Bandwidth selection: maximum kernel separation, maximum HSIC, and the
// decreasing ladder used by W_s layers.

#include <functional>
#include <span>
#include <vector>

#include "hsicnet/kernel_core.hpp"

namespace hsicnet {

struct SigmaSearchResult {
  double sigma = 0.0;
  double objective = 0.0;
  int evaluations = 0;
  double lo = 0.0;
  double hi = 0.0;
  bool at_boundary = false;  // argmax sits on a bracket end
  bool improved = true;      // ladder search only
  int steps = 0;             // ladder search only: k in anchor * decay^k
};

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

/// Mean same-class kernel minus mean cross-class kernel, i != j.
double separation_objective(const Matrix& r, const PairSets& pairs, double sigma);

/// Log-spaced grid over [1e-2 m, 1e2 m] around the median pairwise distance m.
Bracket default_bracket(const Matrix& r);

std::vector<double> log_grid(const Bracket& bracket, int points);

/// Grid scan on log sigma followed by golden-section refinement between the
/// neighbours of the grid argmax. The result is never worse than the grid best.
SigmaSearchResult maximize_on_log_scale(const std::function<double(double)>& objective, const Bracket& bracket,
                                        int grid_points, double log_tol = 1e-3);

SigmaSearchResult optimize_sigma_separation(const Matrix& r, const PairSets& pairs, const Bracket& bracket,
                                            int grid_points = 64);
SigmaSearchResult optimize_sigma_separation(const Matrix& r, const PairSets& pairs, int grid_points = 64);

// Weights for a candidate sigma; W_s ignores sigma, W* runs the ISM.
using WeightRule = std::function<Matrix(double sigma)>;

/// Normalized HSIC between K(R W(sigma), sigma) and the label kernel,
/// maximized with the same grid plus golden-section scheme.
SigmaSearchResult optimize_sigma_hsic(const Matrix& r, const HsicReference& label_kernel, const WeightRule& rule,
                                      const Bracket& bracket, int grid_points);

struct DecaySchedule {
  double decay = 0.9;
  int max_steps = 100;
  // true: stop at the first sigma that beats h_prev. false: scan the whole
  // ladder and keep the best.
  bool first_improvement = false;
};

/// Evaluates layer_hsic at anchor * decay^k, k = 0..max_steps.
SigmaSearchResult next_sigma_for_ws(double anchor, double h_prev, const std::function<double(double)>& layer_hsic,
                                    const DecaySchedule& schedule);

}  // namespace hsicnet
