#include "hsicnet/benchmark.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hsicnet/config.hpp"
#include "hsicnet/errors.hpp"
#include "hsicnet/seeding.hpp"

namespace hsicnet {

using nlohmann::json;

namespace {

// fold seeds live in their own stream range so they never collide with layer seeds
constexpr std::uint64_t kFoldStream = 1u << 20;

std::string fmt(const std::optional<double>& v) {
  if (!v) return "nan";
  std::ostringstream s;
  s.precision(17);
  s << *v;
  return s.str();
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json metrics_json(const MetricsRecord& m) {
  return {{"layer", m.layer}, {"sigma", m.sigma}, {"width", m.width}, {"hsic", opt(m.hsic)},
          {"scatter_ratio", opt(m.scatter_ratio)}, {"csr", opt(m.csr)}, {"mse", opt(m.mse)}, {"ce", opt(m.ce)},
          {"train_accuracy", m.train_accuracy}, {"improved", m.improved}, {"sigma_steps", m.sigma_steps},
          {"ism_converged", m.ism_converged}, {"within_kernel", m.within_kernel}, {"cross_kernel", m.cross_kernel}};
}

MetricsRecord metrics_from(const json& j) {
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

Summary summarize(const std::vector<double>& v) {
  Summary s;
  s.count = static_cast<int>(v.size());
  if (v.empty()) return s;
  double sum = 0.0;
  for (const double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (const double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

}  // namespace

std::map<std::string, Summary> aggregate_folds(const std::vector<FoldResult>& folds) {
  std::map<std::string, std::vector<double>> cols;
  for (const FoldResult& f : folds) {
    cols["train_accuracy"].push_back(f.train_accuracy);
    if (f.test_accuracy) cols["test_accuracy"].push_back(*f.test_accuracy);
    cols["layers"].push_back(f.layers);
    const MetricsRecord& m = f.final_metrics;
    if (m.hsic) cols["hsic"].push_back(*m.hsic);
    if (m.scatter_ratio) cols["scatter_ratio"].push_back(*m.scatter_ratio);
    if (m.csr) cols["csr"].push_back(*m.csr);
    if (m.mse) cols["mse"].push_back(*m.mse);
    if (m.ce) cols["ce"].push_back(*m.ce);
  }
  std::map<std::string, Summary> out;
  for (const auto& [name, values] : cols) out[name] = summarize(values);
  return out;
}

BenchmarkReport run_benchmark(const Dataset& data, const RunConfig& config, int k, const std::string& data_source,
                              const FoldCallback& on_fold) {
  config.validate();
  BenchmarkReport report;
  report.data_source = data_source;
  report.config = config;
  report.k = k;
  const FoldSplit split = kfold(data.labels, k, config.seed);
  for (int f = 0; f < k; ++f) {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<int> train_rows = split.train_rows(f);
    const std::vector<int> test_rows = split.test_rows(f);
    Dataset train_set = subset(data, train_rows);
    Dataset test_set = subset(data, test_rows);
    // standardization statistics come from the training rows only
    const Standardizer st = Standardizer::fit(train_set.x);
    train_set.x = st.apply(train_set.x);
    test_set.x = st.apply(test_set.x);

    RunConfig fold_cfg = config;
    fold_cfg.seed = derive_seed(config.seed, kFoldStream + static_cast<std::uint64_t>(f));
    const Network net = train(train_set, fold_cfg);

    FoldResult r;
    r.fold = f;
    r.seed = fold_cfg.seed;
    r.n_train = static_cast<int>(train_rows.size());
    r.n_test = static_cast<int>(test_rows.size());
    r.layers = static_cast<int>(net.layers.size());
    r.history = net.history;
    r.final_metrics = net.history.back();
    r.train_accuracy = accuracy(predict(net, train_set.x), train_set.labels);
    if (k > 1) r.test_accuracy = accuracy(predict(net, test_set.x), test_set.labels);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.folds.push_back(r);
    if (on_fold) on_fold(report.folds.back());
  }
  report.aggregate = aggregate_folds(report.folds);
  return report;
}

std::string report_to_json(const BenchmarkReport& report) {
  json folds = json::array();
  for (const FoldResult& f : report.folds) {
    json hist = json::array();
    for (const auto& m : f.history) hist.push_back(metrics_json(m));
    folds.push_back({{"fold", f.fold},
                     {"seed", f.seed},
                     {"n_train", f.n_train},
                     {"n_test", f.n_test},
                     {"layers", f.layers},
                     {"train_accuracy", f.train_accuracy},
                     {"test_accuracy", opt(f.test_accuracy)},
                     {"final", metrics_json(f.final_metrics)},
                     {"history", std::move(hist)}});
  }
  json agg = json::object();
  for (const auto& [name, s] : report.aggregate) agg[name] = {{"mean", s.mean}, {"std", s.std}, {"count", s.count}};
  const json doc = {{"format", "hsicnet-benchmark"},
                    {"version", report.version},
                    {"data_source", report.data_source},
                    {"config", config_to_text(report.config)},
                    {"seed", report.config.seed},
                    {"k", report.k},
                    {"folds", std::move(folds)},
                    {"aggregate", std::move(agg)}};
  return doc.dump(1) + "\n";
}

BenchmarkReport report_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("report is not valid JSON: ") + e.what());
  }
  BenchmarkReport r;
  try {
    if (doc.at("format").get<std::string>() != "hsicnet-benchmark") throw ParseError("not a benchmark report");
    r.version = doc.at("version").get<std::string>();
    r.data_source = doc.at("data_source").get<std::string>();
    r.config = parse_config(doc.at("config").get<std::string>());
    r.k = doc.at("k").get<int>();
    for (const json& fj : doc.at("folds")) {
      FoldResult f;
      f.fold = fj.at("fold").get<int>();
      f.seed = fj.at("seed").get<std::uint64_t>();
      f.n_train = fj.at("n_train").get<int>();
      f.n_test = fj.at("n_test").get<int>();
      f.layers = fj.at("layers").get<int>();
      f.train_accuracy = fj.at("train_accuracy").get<double>();
      f.test_accuracy = opt_from(fj.at("test_accuracy"));
      f.final_metrics = metrics_from(fj.at("final"));
      for (const json& mj : fj.at("history")) f.history.push_back(metrics_from(mj));
      r.folds.push_back(std::move(f));
    }
    for (const auto& [name, sj] : doc.at("aggregate").items()) {
      r.aggregate[name] = {sj.at("mean").get<double>(), sj.at("std").get<double>(), sj.at("count").get<int>()};
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
  const auto recomputed = aggregate_folds(r.folds);
  if (recomputed.size() != r.aggregate.size()) throw ParseError("report aggregates do not match its folds");
  for (const auto& [name, s] : recomputed) {
    const auto it = r.aggregate.find(name);
    if (it == r.aggregate.end() || std::abs(it->second.mean - s.mean) > 1e-12 ||
        std::abs(it->second.std - s.std) > 1e-12 || it->second.count != s.count) {
      throw ParseError("report aggregate '" + name + "' does not match its folds");
    }
  }
  return r;
}

std::string timing_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  out.precision(6);
  out << "fold,seconds\n";
  for (const FoldResult& f : report.folds) out << f.fold << ',' << f.seconds << '\n';
  return out.str();
}

std::string metrics_csv(const std::vector<MetricsRecord>& history) {
  std::ostringstream out;
  out.precision(17);
  out << "layer,H,T,C,MSE,CE,acc,sigma,beta,improved\n";
  for (const MetricsRecord& m : history) {
    out << m.layer << ',' << fmt(m.hsic) << ',' << fmt(m.scatter_ratio) << ',' << fmt(m.csr) << ',' << fmt(m.mse)
        << ',' << fmt(m.ce) << ',' << m.train_accuracy << ',' << m.sigma << ',' << m.width << ','
        << (m.improved ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string report_metrics_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "fold," << metrics_csv({});
  for (const FoldResult& f : report.folds) {
    const std::string table = metrics_csv(f.history);
    std::istringstream rows(table);
    std::string line;
    std::getline(rows, line);  // header
    while (std::getline(rows, line)) out << f.fold << ',' << line << '\n';
  }
  return out.str();
}

}  // namespace hsicnet
