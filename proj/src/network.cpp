#include "hsicnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hsicnet/errors.hpp"
#include "hsicnet/kernels.hpp"
#include "hsicnet/seeding.hpp"

namespace hsicnet {

using nlohmann::json;

void RunConfig::validate() const {
  if (!(hsic_threshold > 0.0 && hsic_threshold <= 1.0)) throw ConfigError("hsic_threshold must lie in (0, 1]");
  if (max_layers < 1) throw ConfigError("max_layers must be >= 1");
  if (rff_width < 0) throw ConfigError("rff_width must be >= 0");
  if (rff_width == 0 && solver == Solver::WStar) {
    throw ConfigError("rff_width = 0 (exact feature map) is only supported with solver = ws");
  }
  if (!(decay.decay > 0.0 && decay.decay < 1.0)) throw ConfigError("decay must lie in (0, 1)");
  if (decay.max_steps < 0) throw ConfigError("decay_steps must be >= 0");
  if (sigma_strategy == SigmaStrategy::Fixed && !(fixed_sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (sigma_grid < 2) throw ConfigError("sigma_grid must be >= 2");
  if (!(rank_tol >= 0.0)) throw ConfigError("rank_tol must be >= 0");
  if (!(conv_tol > 0.0)) throw ConfigError("conv_tol must be positive");
  if (ism_max_iter < 1) throw ConfigError("ism_max_iter must be >= 1");
  if (!(ce_clamp > 0.0 && ce_clamp < 0.1)) throw ConfigError("ce_clamp must lie in (0, 0.1)");
}

std::string to_string(Solver s) { return s == Solver::Ws ? "ws" : "wstar"; }

std::string to_string(SigmaStrategy s) {
  switch (s) {
    case SigmaStrategy::MaxHsic: return "max_hsic";
    case SigmaStrategy::MaxSeparation: return "max_separation";
    case SigmaStrategy::Decay: return "decay";
    case SigmaStrategy::Fixed: return "fixed";
  }
  return "max_hsic";
}

Solver parse_solver(const std::string& s) {
  if (s == "ws") return Solver::Ws;
  if (s == "wstar") return Solver::WStar;
  throw ConfigError("unknown solver '" + s + "' (expected ws or wstar)");
}

SigmaStrategy parse_sigma_strategy(const std::string& s) {
  if (s == "max_hsic") return SigmaStrategy::MaxHsic;
  if (s == "max_separation") return SigmaStrategy::MaxSeparation;
  if (s == "decay") return SigmaStrategy::Decay;
  if (s == "fixed") return SigmaStrategy::Fixed;
  throw ConfigError("unknown sigma_strategy '" + s + "' (expected max_hsic, max_separation, decay or fixed)");
}

namespace {

LayerOutput apply_layer(const Layer& layer, const LayerOutput& input) {
  LayerOutput out;
  if (layer.kernel_expanded()) {
    if (input.preactivation.cols() != layer.support.cols()) {
      throw InvalidArgument("kernel-expanded layer expects a previous preactivation of width " +
                            std::to_string(layer.support.cols()));
    }
    out.preactivation =
        gaussian_cross_kernel(input.preactivation, layer.support, layer.support_sigma) * layer.coefficients;
  } else {
    if (input.activation.cols() != layer.weights.rows()) {
      throw InvalidArgument("layer expects input width " + std::to_string(layer.weights.rows()) + ", got " +
                            std::to_string(input.activation.cols()));
    }
    out.preactivation = input.activation * layer.weights;
  }
  out.activation = layer.rff ? rff_apply(*layer.rff, out.preactivation) : Matrix(out.preactivation.rows(), 0);
  return out;
}

std::vector<int> class_medoids(const Matrix& gram, std::span<const int> labels, int num_classes) {
  std::vector<int> best(static_cast<std::size_t>(num_classes), -1);
  std::vector<double> score(static_cast<std::size_t>(num_classes), -std::numeric_limits<double>::infinity());
  const Eigen::Index n = gram.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = labels[static_cast<std::size_t>(i)];
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (labels[static_cast<std::size_t>(j)] == c) acc += gram(i, j);
    }
    if (acc > score[static_cast<std::size_t>(c)]) {
      score[static_cast<std::size_t>(c)] = acc;
      best[static_cast<std::size_t>(c)] = static_cast<int>(i);
    }
  }
  return best;
}

Matrix class_means(const Matrix& z, std::span<const int> labels, int num_classes) {
  Matrix means = Matrix::Zero(num_classes, z.cols());
  std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    means.row(labels[static_cast<std::size_t>(i)]) += z.row(i);
    ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
  }
  for (int c = 0; c < num_classes; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) throw InvalidArgument("class " + std::to_string(c) + " has no samples");
    means.row(c) /= counts[static_cast<std::size_t>(c)];
  }
  return means;
}

template <class F>
std::optional<double> guarded(F&& f) {
  try {
    const double v = f();
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const DegenerateInput&) {
    return std::nullopt;
  }
}

// median pairwise distance, or the largest distance when the median is 0
double bandwidth_scale(const Matrix& z) { return default_bracket(z).lo * 100.0; }

}  // namespace

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw InvalidArgument("accuracy: size mismatch");
  if (truth.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

std::vector<int> nearest_centroid(const Matrix& z, const Matrix& centroids) {
  if (z.cols() != centroids.cols()) throw InvalidArgument("preactivation width differs from centroid width");
  const Matrix d2 = kernels::cross_sq_dists(z, centroids);
  std::vector<int> out(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    Eigen::Index arg = 0;
    for (Eigen::Index c = 1; c < d2.cols(); ++c) {
      if (d2(i, c) < d2(i, arg)) arg = c;
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  return out;
}

Matrix activation_kernel(const Layer& layer, const LayerOutput& a, const LayerOutput& b) {
  if (layer.rff) return a.activation * b.activation.transpose();
  return gaussian_cross_kernel(a.preactivation, b.preactivation, layer.sigma);
}

Matrix activation_gram(const Layer& layer, const LayerOutput& out) {
  if (layer.rff) return out.activation * out.activation.transpose();
  return gaussian_kernel(out.preactivation, layer.sigma);
}

double realigned_mse(const Matrix& z, std::span<const int> labels, int num_classes) {
  if (static_cast<Eigen::Index>(labels.size()) != z.rows()) throw InvalidArgument("realigned_mse: label count mismatch");
  if (z.rows() == 0) throw InvalidArgument("realigned_mse: no samples");
  const Matrix means = class_means(z, labels, num_classes);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) acc += (z.row(i) - means.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  return acc / static_cast<double>(z.rows());
}

double realigned_ce(const Matrix& similarity, std::span<const int> labels, double clamp_eps) {
  if (!(clamp_eps > 0.0 && clamp_eps < 0.1)) throw InvalidArgument("clamp_eps must lie in (0, 0.1)");
  if (static_cast<Eigen::Index>(labels.size()) != similarity.rows()) throw InvalidArgument("realigned_ce: label count mismatch");
  if (similarity.rows() == 0) throw InvalidArgument("realigned_ce: no samples");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < similarity.rows(); ++i) {
    const Eigen::RowVectorXd p = similarity.row(i).array().max(clamp_eps).min(1.0).matrix();
    const int c = labels[static_cast<std::size_t>(i)];
    if (c < 0 || c >= similarity.cols()) throw InvalidArgument("realigned_ce: label out of range");
    acc -= std::log(p(c) / p.sum());
  }
  return acc / static_cast<double>(similarity.rows());
}

MetricsRecord layer_metrics(const Matrix& z, const Matrix& gram, std::span<const int> labels, int num_classes,
                            const HsicReference& label_kernel, double ce_clamp) {
  MetricsRecord m;
  m.width = static_cast<int>(z.cols());
  m.hsic = guarded([&] { return hsic_normalized(gram, label_kernel); });
  m.scatter_ratio = guarded([&] { return scatter_trace_ratio(z, labels); });
  m.csr = guarded([&] { return cosine_similarity_ratio_from_gram(gram, labels); });
  m.mse = guarded([&] { return realigned_mse(z, labels, num_classes); });
  const std::vector<int> medoids = class_medoids(gram, labels, num_classes);
  Matrix sim(gram.rows(), num_classes);
  for (int c = 0; c < num_classes; ++c) sim.col(c) = gram.col(medoids[static_cast<std::size_t>(c)]);
  m.ce = guarded([&] { return realigned_ce(sim, labels, ce_clamp); });
  const Matrix centroids = class_means(z, labels, num_classes);
  m.train_accuracy = accuracy(nearest_centroid(z, centroids), labels);

  const auto sums = kernels::pair_sums(gram, labels);
  std::vector<double> counts(static_cast<std::size_t>(num_classes), 0.0);
  for (const int l : labels) counts[static_cast<std::size_t>(l)] += 1.0;
  double same_pairs = 0.0;
  for (const double c : counts) same_pairs += c * (c - 1.0);
  const double n = static_cast<double>(labels.size());
  const double diff_pairs = n * (n - 1.0) - same_pairs;
  m.within_kernel = same_pairs > 0 ? sums.same / same_pairs : 0.0;
  m.cross_kernel = diff_pairs > 0 ? sums.diff / diff_pairs : 0.0;
  return m;
}

Network train(const Dataset& data, const RunConfig& cfg, const LayerCallback& on_layer) {
  cfg.validate();
  const Eigen::Index n = data.size();
  if (n < 2) throw InvalidArgument("training needs at least two samples");
  const int tau = data.num_classes;
  const std::span<const int> labels(data.labels);
  {
    std::vector<int> counts(static_cast<std::size_t>(tau), 0);
    for (const int l : labels) ++counts[static_cast<std::size_t>(l)];
    if (std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }) < 2) {
      throw DegenerateInput("training data contains a single class");
    }
    if (std::find(counts.begin(), counts.end(), 0) != counts.end()) {
      throw InvalidArgument("every class must have at least one training sample");
    }
  }

  const CenteredLabelKernel gamma = gamma_matrix(data.y);
  const HsicReference label_kernel = make_hsic_reference(data.y * data.y.transpose());
  const IsmOptions ism{cfg.rank_tol, cfg.conv_tol, cfg.ism_max_iter};
  const bool exact = cfg.rff_width == 0;

  Network net;
  net.config = cfg;
  net.input_dim = static_cast<int>(data.dim());
  net.num_classes = tau;
  net.input_hsic = guarded([&] { return hsic_normalized(gaussian_kernel(data.x, bandwidth_scale(data.x)), label_kernel); })
                       .value_or(0.0);

  LayerOutput cur{data.x, data.x};
  double h_prev = net.input_hsic;
  Matrix gram;

  for (int l = 1; l <= cfg.max_layers; ++l) {
    const std::uint64_t layer_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(l));
    Layer layer;
    SigmaSearchResult choice;
    bool ism_converged = true;

    auto gram_at = [&](const Matrix& z, double s) -> Matrix {
      if (exact) return gaussian_kernel(z, s);
      const Matrix phi = rff_apply(rff_sample(z.cols(), s, cfg.rff_width, layer_seed), z);
      return phi * phi.transpose();
    };
    auto h_at = [&](const Matrix& z, double s) { return hsic_normalized(gram_at(z, s), label_kernel); };

    if (cfg.solver == Solver::Ws) {
      if (exact && l > 1) {
        const Layer& prev = net.layers.back();
        const Matrix k = gaussian_kernel(cur.preactivation, prev.sigma);
        Matrix a = data.y;
        if (cfg.normalize_ws) a /= std::sqrt((data.y.transpose() * k * data.y).trace());
        layer.support = cur.preactivation;
        layer.support_sigma = prev.sigma;
        layer.coefficients = std::move(a);
      } else {
        layer.weights = kme_weights(cur.activation, labels, cfg.normalize_ws);
      }
      const Matrix z = apply_layer(layer, cur).preactivation;
      switch (cfg.sigma_strategy) {
        case SigmaStrategy::Fixed:
          choice.sigma = cfg.fixed_sigma;
          break;
        case SigmaStrategy::MaxSeparation:
          choice = optimize_sigma_separation(z, data.pair_sets);
          break;
        case SigmaStrategy::MaxHsic:
          choice = maximize_on_log_scale(
              [&](double s) {
                return guarded([&] {
                         return cfg.search_on_activation ? h_at(z, s)
                                                         : hsic_normalized(gaussian_kernel(z, s), label_kernel);
                       }).value_or(-std::numeric_limits<double>::infinity());
              },
              default_bracket(z), cfg.sigma_grid);
          break;
        case SigmaStrategy::Decay:
          choice = next_sigma_for_ws(bandwidth_scale(z), h_prev, [&](double s) { return h_at(z, s); }, cfg.decay);
          break;
      }
    } else {
      const Matrix& r = cur.activation;
      Matrix best_w;
      auto fit = [&](double s) {
        IsmResult res = ism_fit(r, gamma, s, ism);
        return res;
      };
      switch (cfg.sigma_strategy) {
        case SigmaStrategy::Fixed:
          choice.sigma = cfg.fixed_sigma;
          break;
        case SigmaStrategy::MaxSeparation:
          choice = optimize_sigma_separation(r, data.pair_sets);
          break;
        case SigmaStrategy::MaxHsic: {
          double best = -std::numeric_limits<double>::infinity();
          choice = maximize_on_log_scale(
              [&](double s) {
                IsmResult res = fit(s);
                const Matrix z = r * res.w;
                const double h =
                    guarded([&] {
                      return cfg.search_on_activation ? h_at(z, s) : hsic_normalized(gaussian_kernel(z, s), label_kernel);
                    }).value_or(-std::numeric_limits<double>::infinity());
                if (h > best) {
                  best = h;
                  best_w = std::move(res.w);
                  ism_converged = res.converged;
                }
                return h;
              },
              default_bracket(r), cfg.sigma_grid);
          break;
        }
        case SigmaStrategy::Decay:
          choice = next_sigma_for_ws(
              bandwidth_scale(r), h_prev,
              [&](double s) {
                const IsmResult res = fit(s);
                return h_at(r * res.w, s);
              },
              cfg.decay);
          break;
      }
      if (best_w.size() == 0) {
        IsmResult res = fit(choice.sigma);
        best_w = std::move(res.w);
        ism_converged = res.converged;
      }
      layer.weights = std::move(best_w);
    }

    layer.sigma = choice.sigma;
    if (!exact) layer.rff = rff_sample(layer.beta(), layer.sigma, cfg.rff_width, layer_seed);
    LayerOutput out = apply_layer(layer, cur);
    gram = activation_gram(layer, out);

    MetricsRecord m = layer_metrics(out.preactivation, gram, labels, tau, label_kernel, cfg.ce_clamp);
    m.layer = l;
    m.sigma = layer.sigma;
    m.sigma_steps = choice.steps;
    m.ism_converged = ism_converged;
    const double h = m.hsic.value_or(-std::numeric_limits<double>::infinity());
    m.improved = cfg.sigma_strategy == SigmaStrategy::Decay ? choice.improved : h > h_prev;
    net.layers.push_back(std::move(layer));
    net.history.push_back(m);
    if (on_layer) on_layer(m);
    h_prev = h;
    cur = std::move(out);
    if (h > cfg.hsic_threshold) break;
  }

  net.centroids = class_means(cur.preactivation, labels, tau);
  const std::vector<int> medoids = class_medoids(gram, labels, tau);
  net.basis_preactivation.resize(tau, cur.preactivation.cols());
  for (int c = 0; c < tau; ++c) net.basis_preactivation.row(c) = cur.preactivation.row(medoids[static_cast<std::size_t>(c)]);
  return net;
}

std::vector<LayerOutput> forward(const Network& net, const Matrix& x) {
  if (net.layers.empty()) throw InvalidArgument("network has no layers");
  if (x.cols() != net.input_dim) {
    throw InvalidArgument("network expects " + std::to_string(net.input_dim) + " features, got " +
                          std::to_string(x.cols()));
  }
  std::vector<LayerOutput> outs;
  outs.reserve(net.layers.size());
  LayerOutput cur{x, x};
  for (const Layer& layer : net.layers) {
    cur = apply_layer(layer, cur);
    outs.push_back(cur);
  }
  return outs;
}

std::vector<int> predict(const Network& net, const Matrix& x) {
  if (net.layers.empty() || net.centroids.rows() == 0) throw InvalidArgument("network is not trained");
  const auto outs = forward(net, x);
  return nearest_centroid(outs.back().preactivation, net.centroids);
}

// ---------------------------------------------------------------------------
// serialization

namespace {

json matrix_to_json(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const json& data = j.at("data");
  if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw ParseError("matrix entry count does not match its shape");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = data[k++].get<double>();
  }
  return m;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json config_to_json(const RunConfig& c) {
  return {{"solver", to_string(c.solver)},
          {"rff_width", c.rff_width},
          {"hsic_threshold", c.hsic_threshold},
          {"max_layers", c.max_layers},
          {"sigma_strategy", to_string(c.sigma_strategy)},
          {"decay", c.decay.decay},
          {"decay_steps", c.decay.max_steps},
          {"decay_first_improvement", c.decay.first_improvement},
          {"sigma", c.fixed_sigma},
          {"sigma_grid", c.sigma_grid},
          {"search_on_activation", c.search_on_activation},
          {"rank_tol", c.rank_tol},
          {"conv_tol", c.conv_tol},
          {"ism_max_iter", c.ism_max_iter},
          {"normalize_ws", c.normalize_ws},
          {"ce_clamp", c.ce_clamp},
          {"seed", c.seed}};
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.solver = parse_solver(j.at("solver").get<std::string>());
  c.rff_width = j.at("rff_width").get<int>();
  c.hsic_threshold = j.at("hsic_threshold").get<double>();
  c.max_layers = j.at("max_layers").get<int>();
  c.sigma_strategy = parse_sigma_strategy(j.at("sigma_strategy").get<std::string>());
  c.decay.decay = j.at("decay").get<double>();
  c.decay.max_steps = j.at("decay_steps").get<int>();
  c.decay.first_improvement = j.at("decay_first_improvement").get<bool>();
  c.fixed_sigma = j.at("sigma").get<double>();
  c.sigma_grid = j.at("sigma_grid").get<int>();
  c.search_on_activation = j.at("search_on_activation").get<bool>();
  c.rank_tol = j.at("rank_tol").get<double>();
  c.conv_tol = j.at("conv_tol").get<double>();
  c.ism_max_iter = j.at("ism_max_iter").get<int>();
  c.normalize_ws = j.at("normalize_ws").get<bool>();
  c.ce_clamp = j.at("ce_clamp").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json metrics_to_json(const MetricsRecord& m) {
  return {{"layer", m.layer},
          {"sigma", m.sigma},
          {"width", m.width},
          {"hsic", opt(m.hsic)},
          {"scatter_ratio", opt(m.scatter_ratio)},
          {"csr", opt(m.csr)},
          {"mse", opt(m.mse)},
          {"ce", opt(m.ce)},
          {"train_accuracy", m.train_accuracy},
          {"improved", m.improved},
          {"sigma_steps", m.sigma_steps},
          {"ism_converged", m.ism_converged},
          {"within_kernel", m.within_kernel},
          {"cross_kernel", m.cross_kernel}};
}

MetricsRecord metrics_from_json(const json& j) {
  MetricsRecord m;
  m.layer = j.at("layer").get<int>();
  m.sigma = j.at("sigma").get<double>();
  m.width = j.at("width").get<int>();
  m.hsic = opt_from(j.at("hsic"));
  m.scatter_ratio = opt_from(j.at("scatter_ratio"));
  m.csr = opt_from(j.at("csr"));
  m.mse = opt_from(j.at("mse"));
  m.ce = opt_from(j.at("ce"));
  m.train_accuracy = j.at("train_accuracy").get<double>();
  m.improved = j.at("improved").get<bool>();
  m.sigma_steps = j.at("sigma_steps").get<int>();
  m.ism_converged = j.at("ism_converged").get<bool>();
  m.within_kernel = j.at("within_kernel").get<double>();
  m.cross_kernel = j.at("cross_kernel").get<double>();
  return m;
}

}  // namespace

std::string network_to_json(const Network& net) {
  json layers = json::array();
  for (const Layer& layer : net.layers) {
    json lj = {{"sigma", layer.sigma}};
    if (layer.kernel_expanded()) {
      lj["kind"] = "kernel_expanded";
      lj["support"] = matrix_to_json(layer.support);
      lj["support_sigma"] = layer.support_sigma;
      lj["coefficients"] = matrix_to_json(layer.coefficients);
    } else {
      lj["kind"] = "explicit";
      lj["weights"] = matrix_to_json(layer.weights);
    }
    if (layer.rff) {
      lj["rff"] = {{"seed", layer.rff->seed},
                   {"sigma", layer.rff->sigma},
                   {"frequencies", matrix_to_json(layer.rff->frequencies)}};
      json phases = json::array();
      for (Eigen::Index k = 0; k < layer.rff->phases.size(); ++k) phases.push_back(layer.rff->phases(k));
      lj["rff"]["phases"] = std::move(phases);
    } else {
      lj["rff"] = nullptr;
    }
    layers.push_back(std::move(lj));
  }
  json history = json::array();
  for (const auto& m : net.history) history.push_back(metrics_to_json(m));
  const json doc = {{"format", "hsicnet-network"},
                    {"version", 1},
                    {"config", config_to_json(net.config)},
                    {"input_dim", net.input_dim},
                    {"num_classes", net.num_classes},
                    {"input_hsic", net.input_hsic},
                    {"layers", std::move(layers)},
                    {"centroids", matrix_to_json(net.centroids)},
                    {"basis_preactivation", matrix_to_json(net.basis_preactivation)},
                    {"history", std::move(history)}};
  return doc.dump(1);
}

Network network_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("network file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "hsicnet-network") throw ParseError("not a network file");
    if (doc.at("version").get<int>() != 1) throw ParseError("unsupported network file version");
    Network net;
    net.config = config_from_json(doc.at("config"));
    net.input_dim = doc.at("input_dim").get<int>();
    net.num_classes = doc.at("num_classes").get<int>();
    net.input_hsic = doc.at("input_hsic").get<double>();
    for (const json& lj : doc.at("layers")) {
      Layer layer;
      layer.sigma = lj.at("sigma").get<double>();
      const std::string kind = lj.at("kind").get<std::string>();
      if (kind == "kernel_expanded") {
        layer.support = matrix_from_json(lj.at("support"));
        layer.support_sigma = lj.at("support_sigma").get<double>();
        layer.coefficients = matrix_from_json(lj.at("coefficients"));
      } else if (kind == "explicit") {
        layer.weights = matrix_from_json(lj.at("weights"));
      } else {
        throw ParseError("unknown layer kind '" + kind + "'");
      }
      if (!lj.at("rff").is_null()) {
        const json& rj = lj.at("rff");
        RffMap map;
        map.seed = rj.at("seed").get<std::uint64_t>();
        map.sigma = rj.at("sigma").get<double>();
        map.frequencies = matrix_from_json(rj.at("frequencies"));
        const auto phases = rj.at("phases").get<std::vector<double>>();
        map.phases = Eigen::Map<const Vector>(phases.data(), static_cast<Eigen::Index>(phases.size()));
        layer.rff = std::move(map);
      }
      net.layers.push_back(std::move(layer));
    }
    net.centroids = matrix_from_json(doc.at("centroids"));
    net.basis_preactivation = matrix_from_json(doc.at("basis_preactivation"));
    for (const json& mj : doc.at("history")) net.history.push_back(metrics_from_json(mj));
    return net;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed network file: ") + e.what());
  }
}

void save_network(const Network& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << network_to_json(net) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

Network load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return network_from_json(buf.str());
}

}  // namespace hsicnet
