#pragma once

// Building blocks for the CLI experiments: the monotone-HSIC simulation,
// per-layer kernel dumps and bandwidth sweeps.

#include <string>
#include <utility>
#include <vector>

#include "hsicnet/data.hpp"
#include "hsicnet/network.hpp"

namespace hsicnet {

/// W_s, decay schedule, exact Gaussian feature map, threshold 0.99, 30 layers.
RunConfig monotone_simulation_config(std::uint64_t seed = 0);
/// W_s, two layers, fixed bandwidth, exact feature map unless rff_width > 0.
RunConfig two_layer_config(double sigma = 1e-5, int rff_width = 0);

/// Projection of each row onto the line through the first two class centroids,
/// centered at their midpoint.
Vector centroid_line_projection(const Matrix& z, std::span<const int> labels);
/// True when the two classes occupy disjoint intervals of the line.
bool separable_1d(const Vector& projection, std::span<const int> labels);

/// Rows grouped by class, stable within a class.
std::vector<int> class_contiguous_order(std::span<const int> labels);

/// Kernel of `layer` on the rows of x: 0 is the input Gaussian kernel at the
/// median bandwidth, l >= 1 the activation kernel of layer l.
Matrix layer_kernel(const Network& net, const Matrix& x, int layer);

/// (mean within-class entry, mean cross-class entry), diagonal excluded.
std::pair<double, double> block_means(const Matrix& kernel, std::span<const int> labels);

std::string kernel_csv(const Matrix& kernel);
/// Binary PGM (P5); entry 1 maps to 0 (dark), entry 0 to 255.
std::string kernel_pgm(const Matrix& kernel);

struct SweepRow {
  double sigma = 0.0;
  double separation = 0.0;
  double hsic = 0.0;
};

struct SigmaSweep {
  std::vector<SweepRow> rows;
  SigmaSearchResult separation_opt;
  SigmaSearchResult hsic_opt;
  bool separation_single_peak = false;
  bool hsic_single_peak = false;
};

/// Dense log grid of both bandwidth objectives on the first layer, plus the
/// grid-and-golden-section optimizer results.
SigmaSweep sigma_sweep(const Dataset& data, const RunConfig& config, int points);

/// Rising then falling: exactly one sign change (+ to -) in the differences
/// whose magnitude exceeds tol.
bool single_peak(const std::vector<double>& values, double tol = 1e-9);

/// Normalized HSIC of the first layer at sigma for the configured solver.
double first_layer_hsic(const Dataset& data, const RunConfig& config, double sigma);

}  // namespace hsicnet
