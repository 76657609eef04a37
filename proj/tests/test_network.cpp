#include <doctest.h>

#include <filesystem>

#include "helpers.hpp"
#include "hsicnet/data.hpp"
#include "hsicnet/errors.hpp"
#include "hsicnet/network.hpp"

using namespace hsicnet;
using namespace testing_util;

namespace {

RunConfig quick_wstar() {
  RunConfig c;
  c.solver = Solver::WStar;
  c.rff_width = 60;
  c.max_layers = 3;
  c.sigma_grid = 6;
  c.ism_max_iter = 8;
  c.seed = 9;
  return c;
}

bool bit_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

}  // namespace

TEST_CASE("realigned mse") {
  Matrix collapsed(4, 2);
  collapsed << 1, 1, 1, 1, -2, 0, -2, 0;
  const std::vector<int> lab{0, 0, 1, 1};
  CHECK(realigned_mse(collapsed, lab, 2) == 0.0);

  const double r = 0.3;
  Matrix pairs(4, 1);
  pairs << -1.0 - r, -1.0 + r, 2.0 - r, 2.0 + r;
  CHECK(realigned_mse(pairs, lab, 2) == doctest::Approx(r * r));
  CHECK_THROWS_AS(realigned_mse(pairs, std::vector<int>{0, 0, 0, 0}, 2), InvalidArgument);
}

TEST_CASE("realigned cross entropy") {
  const std::vector<int> lab{0, 1, 2};
  const double eps = 1e-12;
  const Matrix ident = Matrix::Identity(3, 3);
  const double ce = realigned_ce(ident, lab, eps);
  CHECK(ce == doctest::Approx(-std::log(1.0 / (1.0 + 2 * eps))).epsilon(1e-9));
  CHECK(ce < 1e-10);
  CHECK(realigned_ce(ident, lab, 1e-3) > ce);

  const Matrix uniform = Matrix::Constant(3, 3, 0.4);
  CHECK(realigned_ce(uniform, lab, eps) == doctest::Approx(std::log(3.0)));
  CHECK_THROWS_AS(realigned_ce(uniform, lab, 0.0), InvalidArgument);
  CHECK_THROWS_AS(realigned_ce(uniform, lab, 0.5), InvalidArgument);
}

TEST_CASE("nearest centroid") {
  Matrix c(3, 2);
  c << 0, 0, 5, 0, 0, 5;
  CHECK(nearest_centroid(c, c) == std::vector<int>{0, 1, 2});
  Matrix tie(1, 2);
  tie << 2.5, 0.0;
  CHECK(nearest_centroid(tie, c) == std::vector<int>{0});
  CHECK_THROWS_AS(nearest_centroid(Matrix::Zero(1, 3), c), InvalidArgument);
}

TEST_CASE("config validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.rff_width = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.hsic_threshold = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.max_layers = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.decay.decay = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(parse_solver("ws") == Solver::Ws);
  CHECK(parse_sigma_strategy("decay") == SigmaStrategy::Decay);
  CHECK_THROWS_AS(parse_solver("sgd"), ConfigError);
  CHECK(to_string(parse_sigma_strategy("max_separation")) == "max_separation");
}

TEST_CASE("single layer returns one record") {
  const Dataset d = gen_spiral(20, 3);
  RunConfig c = quick_wstar();
  c.max_layers = 1;
  const Network net = train(d, c);
  CHECK(net.history.size() == 1);
  CHECK(net.layers.size() == 1);
  CHECK(net.centroids.rows() == 3);
  CHECK(net.basis_preactivation.rows() == 3);
}

TEST_CASE("training records are consistent with replay") {
  const Dataset d = gen_spiral(25, 3, 1.75, 0.1, 4);
  const Network net = train(d, quick_wstar());
  REQUIRE_FALSE(net.history.empty());
  for (std::size_t i = 0; i < net.history.size(); ++i) {
    const MetricsRecord& m = net.history[i];
    CHECK(m.layer == static_cast<int>(i) + 1);
    REQUIRE(m.hsic.has_value());
    CHECK(std::abs(*m.hsic) <= 1.0 + 1e-12);
    CHECK(m.sigma > 0.0);
    CHECK(m.width == net.layers[i].beta());
  }
  const auto outs = forward(net, d.x);
  CHECK(outs.size() == net.layers.size());
  CHECK(outs.back().activation.cols() == 60);
  CHECK(accuracy(predict(net, d.x), d.labels) == net.history.back().train_accuracy);

  const auto again = forward(net, d.x);
  for (std::size_t l = 0; l < outs.size(); ++l) {
    CHECK(bit_equal(outs[l].preactivation, again[l].preactivation));
    CHECK(bit_equal(outs[l].activation, again[l].activation));
  }
  // activation rows have roughly unit norm
  CHECK((outs.back().activation.rowwise().squaredNorm().array() - 1.0).abs().mean() < 0.2);
  CHECK_THROWS_AS(forward(net, Matrix::Zero(3, 5)), InvalidArgument);

  const Network twice = train(d, quick_wstar());
  CHECK(network_to_json(twice) == network_to_json(net));
}

TEST_CASE("network serialization round trip is bit exact") {
  const Dataset d = gen_adversarial(15, 0.01, 2);
  const Network net = train(d, quick_wstar());
  const std::string text = network_to_json(net);
  const Network back = network_from_json(text);
  CHECK(network_to_json(back) == text);
  const auto a = forward(net, d.x);
  const auto b = forward(back, d.x);
  for (std::size_t l = 0; l < a.size(); ++l) {
    CHECK(bit_equal(a[l].preactivation, b[l].preactivation));
    CHECK(bit_equal(a[l].activation, b[l].activation));
  }
  CHECK(bit_equal(back.centroids, net.centroids));
  CHECK(predict(back, d.x) == predict(net, d.x));

  const auto path = std::filesystem::temp_directory_path() / "hsicnet_roundtrip.json";
  save_network(net, path.string());
  CHECK(network_to_json(load_network(path.string())) == text);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_network("/nonexistent/dir/net.json"), IoError);
  CHECK_THROWS(network_from_json("{\"not\": \"a network\"}"));
}

TEST_CASE("exact feature map with kernel-expanded layers round trips") {
  const Dataset d = gen_random(30, 2, 3);
  RunConfig c;
  c.solver = Solver::Ws;
  c.rff_width = 0;
  c.sigma_strategy = SigmaStrategy::Decay;
  c.max_layers = 3;
  const Network net = train(d, c);
  CHECK(net.layers.size() >= 2);
  CHECK(net.layers[1].kernel_expanded());
  CHECK_FALSE(net.layers[0].rff.has_value());
  const Network back = network_from_json(network_to_json(net));
  const auto a = forward(net, d.x);
  const auto b = forward(back, d.x);
  CHECK(bit_equal(a.back().preactivation, b.back().preactivation));
  CHECK(accuracy(predict(net, d.x), d.labels) == net.history.back().train_accuracy);
  for (std::size_t i = 1; i < net.history.size(); ++i) {
    if (net.history[i].improved) CHECK(*net.history[i].hsic > *net.history[i - 1].hsic);
  }
}

TEST_CASE("layer metrics") {
  const Dataset d = gen_random(60, 2, 8);
  const HsicReference ref = make_hsic_reference(d.y * d.y.transpose());
  const Matrix gram = gaussian_kernel(d.x, median_pairwise_distance(d.x));
  const MetricsRecord a = layer_metrics(d.x, gram, d.labels, 2, ref, 1e-12);
  const MetricsRecord b = layer_metrics(d.x, gram, d.labels, 2, ref, 1e-12);
  REQUIRE(a.hsic.has_value());
  CHECK(*a.hsic < 0.3);
  CHECK(*a.hsic == *b.hsic);
  CHECK(*a.scatter_ratio == *b.scatter_ratio);
  CHECK(*a.csr == *b.csr);
  CHECK(*a.mse == *b.mse);
  CHECK(*a.ce == *b.ce);

  // perfect indicator kernel
  const Matrix nik = d.y * d.y.transpose();
  Matrix z = d.y;
  const MetricsRecord p = layer_metrics(z, nik, d.labels, 2, ref, 1e-12);
  CHECK(*p.hsic == doctest::Approx(1.0));
  CHECK(*p.scatter_ratio == 0.0);
  CHECK(*p.csr == 0.0);
  CHECK(*p.mse == 0.0);
  CHECK(*p.ce < 1e-9);
  CHECK(p.within_kernel == 1.0);
  CHECK(p.cross_kernel == 0.0);
  CHECK(p.train_accuracy == 1.0);

  // degenerate metrics become empty fields rather than errors
  const MetricsRecord flat = layer_metrics(Matrix::Ones(60, 2), Matrix::Ones(60, 60), d.labels, 2, ref, 1e-12);
  CHECK_FALSE(flat.hsic.has_value());
  CHECK_FALSE(flat.scatter_ratio.has_value());
}

TEST_CASE("training rejects single-class data") {
  Dataset d = gen_random(10, 2, 1);
  std::fill(d.labels.begin(), d.labels.end(), 0);
  d = make_dataset(d.x, d.labels);
  CHECK_THROWS_AS(train(d, quick_wstar()), DegenerateInput);
}
