#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "hsicnet/benchmark.hpp"
#include "hsicnet/config.hpp"
#include "hsicnet/errors.hpp"
#include "hsicnet/experiments.hpp"

using namespace hsicnet;
using namespace testing_util;

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(
      "# comment\n"
      "solver = ws\n"
      "rff_width = 0\n"
      "sigma_strategy = decay\n"
      "decay = 0.8\n"
      "decay_steps = 12\n"
      "decay_first_improvement = true\n"
      "\n"
      "hsic_threshold = 0.95\n"
      "seed = 12345678901\n");
  CHECK(c.solver == Solver::Ws);
  CHECK(c.rff_width == 0);
  CHECK(c.sigma_strategy == SigmaStrategy::Decay);
  CHECK(c.decay.decay == 0.8);
  CHECK(c.decay.max_steps == 12);
  CHECK(c.decay.first_improvement);
  CHECK(c.hsic_threshold == 0.95);
  CHECK(c.seed == 12345678901ULL);
  CHECK(c.max_layers == RunConfig{}.max_layers);

  const RunConfig back = parse_config(config_to_text(c));
  CHECK(config_to_text(back) == config_to_text(c));
  CHECK(config_to_text(parse_config(config_to_text(RunConfig{}))) == config_to_text(RunConfig{}));
}

TEST_CASE("config errors name the offending key") {
  try {
    parse_config("solver = wstar\nbogus_key = 3\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("seed = 1\nseed = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("rff_width = wide\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("max_layers 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("solver = ws\nrff_width = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("normalize_ws = maybe\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/run.cfg"), IoError);
  for (const std::string& key : config_keys()) CHECK(config_to_text(RunConfig{}).find(key + " =") != std::string::npos);
}

namespace {

RunConfig tiny() {
  RunConfig c;
  c.rff_width = 40;
  c.max_layers = 2;
  c.sigma_grid = 4;
  c.ism_max_iter = 5;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_CASE("benchmark report") {
  const Dataset d = gen_spiral(10, 3, 1.75, 0.1, 1);
  const BenchmarkReport r = run_benchmark(d, tiny(), 3, "spiral");
  REQUIRE(r.folds.size() == 3);
  for (int f = 0; f < 3; ++f) {
    CHECK(r.folds[f].fold == f);
    CHECK(r.folds[f].test_accuracy.has_value());
    CHECK(r.folds[f].n_train + r.folds[f].n_test == 30);
    CHECK(r.folds[f].layers == static_cast<int>(r.folds[f].history.size()));
  }
  CHECK(r.folds[0].seed != r.folds[1].seed);
  REQUIRE(r.aggregate.count("test_accuracy") == 1);
  const Summary& s = r.aggregate.at("train_accuracy");
  const double mean = (r.folds[0].train_accuracy + r.folds[1].train_accuracy + r.folds[2].train_accuracy) / 3.0;
  CHECK(s.mean == doctest::Approx(mean).epsilon(1e-14));
  CHECK(s.count == 3);

  const std::string text = report_to_json(r);
  const BenchmarkReport back = report_from_json(text);
  CHECK(report_to_json(back) == text);
  CHECK(report_to_json(run_benchmark(d, tiny(), 3, "spiral")) == text);

  // tampered aggregate is rejected
  std::string bad = text;
  const auto pos = bad.find("\"mean\": ");
  REQUIRE(pos != std::string::npos);
  bad.insert(pos + 8, "1");
  CHECK_THROWS_AS(report_from_json(bad), ParseError);
  CHECK_THROWS_AS(report_from_json("not json"), ParseError);

  std::istringstream timing(timing_csv(r));
  std::string line;
  int rows = 0;
  while (std::getline(timing, line)) ++rows;
  CHECK(rows == 4);
  CHECK(report_metrics_csv(r).rfind("fold,layer,H,T,C,MSE,CE,acc,sigma,beta", 0) == 0);
}

TEST_CASE("single-fold benchmark reports train accuracy only") {
  const Dataset d = gen_spiral(8, 2, 1.75, 0.1, 1);
  const BenchmarkReport r = run_benchmark(d, tiny(), 1, "spiral");
  REQUIRE(r.folds.size() == 1);
  CHECK_FALSE(r.folds[0].test_accuracy.has_value());
  CHECK(r.aggregate.count("test_accuracy") == 0);
  CHECK(r.folds[0].n_train == 16);
  CHECK(r.aggregate.at("train_accuracy").std == 0.0);
}

TEST_CASE("aggregate uses the sample standard deviation") {
  std::vector<FoldResult> folds(3);
  folds[0].train_accuracy = 1.0;
  folds[1].train_accuracy = 0.5;
  folds[2].train_accuracy = 0.0;
  const auto agg = aggregate_folds(folds);
  CHECK(agg.at("train_accuracy").mean == doctest::Approx(0.5));
  CHECK(agg.at("train_accuracy").std == doctest::Approx(0.5));
}

TEST_CASE("metrics table") {
  MetricsRecord m;
  m.layer = 2;
  m.hsic = 0.5;
  m.sigma = 0.25;
  m.width = 3;
  const std::string csv = metrics_csv({m});
  CHECK(csv.rfind("layer,H,T,C,MSE,CE,acc,sigma,beta,improved\n", 0) == 0);
  CHECK(csv.find("\n2,0.5,nan,") != std::string::npos);
}

TEST_CASE("experiment helpers") {
  SUBCASE("class contiguous order") {
    CHECK(class_contiguous_order(std::vector<int>{1, 0, 1, 0, 2}) == std::vector<int>{1, 3, 0, 2, 4});
  }
  SUBCASE("block means and kernel image") {
    const std::vector<int> lab{0, 0, 1, 1};
    const Matrix y = one_hot(lab, 2);
    const Matrix k = y * y.transpose();
    const auto [within, cross] = block_means(k, lab);
    CHECK(within == 1.0);
    CHECK(cross == 0.0);
    const std::string pgm = kernel_pgm(k);
    CHECK(pgm.rfind("P5\n4 4\n255\n", 0) == 0);
    const std::string body = pgm.substr(pgm.size() - 16);
    CHECK(static_cast<unsigned char>(body[0]) == 0);
    CHECK(static_cast<unsigned char>(body[2]) == 255);
    std::istringstream csv(kernel_csv(k));
    std::string line;
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 4);
  }
  SUBCASE("one-dimensional separability") {
    Vector p(4);
    p << -2.0, -1.0, 1.0, 3.0;
    CHECK(separable_1d(p, std::vector<int>{0, 0, 1, 1}));
    CHECK_FALSE(separable_1d(p, std::vector<int>{0, 1, 0, 1}));
    Matrix z(4, 2);
    z << 0, 0, 0, 1, 5, 0, 5, 1;
    const Vector proj = centroid_line_projection(z, std::vector<int>{0, 0, 1, 1});
    CHECK(proj(0) == doctest::Approx(-2.5));
    CHECK(proj(3) == doctest::Approx(2.5));
  }
  SUBCASE("single peak detection") {
    CHECK(single_peak({0.1, 0.4, 0.9, 0.3, 0.1}));
    CHECK_FALSE(single_peak({0.1, 0.4, 0.2, 0.5, 0.1}));
    CHECK_FALSE(single_peak({0.1, 0.2, 0.3}));
  }
  SUBCASE("layer zero on random labels has no block structure") {
    const Dataset d = gen_random(80, 2, 0);
    RunConfig c = tiny();
    c.max_layers = 1;
    const Network net = train(d, c);
    const Matrix k = layer_kernel(net, d.x, 0);
    CHECK(k.rows() == 80);
    const auto [within, cross] = block_means(k, d.labels);
    CHECK(std::abs(within - cross) < 0.1);
    CHECK_THROWS_AS(layer_kernel(net, d.x, 5), InvalidArgument);
  }
  SUBCASE("sigma sweep on blobs") {
    std::mt19937_64 rng(12);
    auto [x, lab] = blobs(20, 1.5, rng);
    const Dataset d = make_dataset(x, lab);
    RunConfig c = tiny();
    c.solver = Solver::Ws;
    const SigmaSweep sw = sigma_sweep(d, c, 64);
    CHECK(sw.rows.size() == 64);
    CHECK(sw.separation_single_peak);
    double best = -1.0;
    for (const auto& row : sw.rows) best = std::max(best, row.separation);
    CHECK(sw.separation_opt.objective >= 0.95 * best);
  }
}
