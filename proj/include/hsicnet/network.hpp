#pragma once

// Greedy layer-wise kernel network: training, forward replay, prediction,
// realignment metrics and (de)serialization.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsicnet/closed_form.hpp"
#include "hsicnet/data.hpp"
#include "hsicnet/sigma_search.hpp"

namespace hsicnet {

enum class Solver { Ws, WStar };
enum class SigmaStrategy { MaxHsic, MaxSeparation, Decay, Fixed };

struct RunConfig {
  Solver solver = Solver::WStar;
  // 0 selects the exact Gaussian feature map, represented through kernel
  // expansions over the training set. Only valid with the W_s solver.
  int rff_width = 300;
  double hsic_threshold = 0.99;
  int max_layers = 30;
  SigmaStrategy sigma_strategy = SigmaStrategy::MaxHsic;
  DecaySchedule decay{};
  double fixed_sigma = 1.0;
  int sigma_grid = 16;
  // Kernel scored during the max-HSIC search: the layer's own activation
  // kernel (RFF when rff_width > 0) or the exact Gaussian kernel of the
  // projected rows.
  bool search_on_activation = true;
  double rank_tol = 1e-6;
  double conv_tol = 1e-6;
  int ism_max_iter = 30;
  bool normalize_ws = true;
  double ce_clamp = 1e-12;
  std::uint64_t seed = 0;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

std::string to_string(Solver s);
std::string to_string(SigmaStrategy s);
Solver parse_solver(const std::string& s);
SigmaStrategy parse_sigma_strategy(const std::string& s);

struct Layer {
  // Explicit layers: preactivation = input activation * weights.
  Matrix weights;
  // Kernel-expanded layers (exact feature map): preactivation =
  // K(previous preactivation, support; support_sigma) * coefficients.
  Matrix support;
  double support_sigma = 0.0;
  Matrix coefficients;

  double sigma = 1.0;
  std::optional<RffMap> rff;  // absent for the exact feature map

  [[nodiscard]] bool kernel_expanded() const { return weights.size() == 0; }
  [[nodiscard]] Eigen::Index beta() const { return kernel_expanded() ? coefficients.cols() : weights.cols(); }
  [[nodiscard]] Eigen::Index out_dim() const { return rff ? rff->width() : 0; }
};

struct LayerOutput {
  Matrix preactivation;  // n x beta
  Matrix activation;     // n x D; zero columns for the exact feature map
};

struct MetricsRecord {
  int layer = 0;
  double sigma = 0.0;
  int width = 0;  // beta
  std::optional<double> hsic;
  std::optional<double> scatter_ratio;
  std::optional<double> csr;
  std::optional<double> mse;
  std::optional<double> ce;
  double train_accuracy = 0.0;
  bool improved = true;
  int sigma_steps = 0;
  bool ism_converged = true;
  double within_kernel = 0.0;  // mean activation kernel over same-class pairs
  double cross_kernel = 0.0;   // mean over cross-class pairs
};

struct Network {
  RunConfig config;
  int input_dim = 0;
  int num_classes = 0;
  double input_hsic = 0.0;  // normalized HSIC of the input Gaussian kernel at the median bandwidth
  std::vector<Layer> layers;
  Matrix centroids;             // tau x beta_L
  Matrix basis_preactivation;   // tau x beta_L, final preactivation of each class medoid
  std::vector<MetricsRecord> history;
};

// Called after every layer; used by the CLI for progress output.
using LayerCallback = std::function<void(const MetricsRecord&)>;

Network train(const Dataset& data, const RunConfig& config, const LayerCallback& on_layer = {});

std::vector<LayerOutput> forward(const Network& net, const Matrix& x);
std::vector<int> predict(const Network& net, const Matrix& x);
std::vector<int> nearest_centroid(const Matrix& z, const Matrix& centroids);

/// Kernel between final activations: rows of a against rows of b.
Matrix activation_kernel(const Layer& layer, const LayerOutput& a, const LayerOutput& b);
Matrix activation_gram(const Layer& layer, const LayerOutput& out);

/// Mean squared distance of each preactivation to its class centroid.
double realigned_mse(const Matrix& z, std::span<const int> labels, int num_classes);

/// similarity: n x tau inner products with the class representatives.
double realigned_ce(const Matrix& similarity, std::span<const int> labels, double clamp_eps);

/// H, T, C, MSE, CE and accuracy for one layer output on labelled data.
MetricsRecord layer_metrics(const Matrix& z, const Matrix& gram, std::span<const int> labels, int num_classes,
                            const HsicReference& label_kernel, double ce_clamp);

double accuracy(std::span<const int> predicted, std::span<const int> truth);

std::string network_to_json(const Network& net);
Network network_from_json(const std::string& text);
void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

}  // namespace hsicnet
