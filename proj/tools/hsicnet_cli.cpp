// hsicnet command-line driver.
//
// Exit codes: 0 success, 1 runtime or convergence failure, 2 usage or config error.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "hsicnet/benchmark.hpp"
#include "hsicnet/config.hpp"
#include "hsicnet/data.hpp"
#include "hsicnet/errors.hpp"
#include "hsicnet/experiments.hpp"
#include "hsicnet/network.hpp"

namespace fs = std::filesystem;
using namespace hsicnet;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataArgs {
  std::string csv;
  std::string generator;
  std::string label_column;
  int samples = 0;  // per class for adversarial/spiral, total for random
  std::uint64_t data_seed = 0;
};

void add_data_options(CLI::App* cmd, DataArgs& d) {
  cmd->add_option("--data", d.csv, "CSV file (label in the last column unless --label-column)");
  cmd->add_option("--generator", d.generator, "synthetic dataset instead of --data")
      ->check(CLI::IsMember({"adversarial", "random", "spiral"}));
  cmd->add_option("--label-column", d.label_column, "label column name or 0-based index");
  cmd->add_option("--samples", d.samples, "generator size (per class; total for random)");
  cmd->add_option("--data-seed", d.data_seed, "generator seed");
}

Dataset load_data(const DataArgs& d) {
  if (d.csv.empty() == d.generator.empty()) throw UsageError("give exactly one of --data or --generator");
  if (!d.csv.empty()) {
    CsvOptions opts;
    if (!d.label_column.empty()) opts.label_column = d.label_column;
    return load_csv(d.csv, opts);
  }
  if (d.generator == "adversarial") return gen_adversarial(d.samples > 0 ? d.samples : 40, 0.01, d.data_seed);
  if (d.generator == "random") return gen_random(d.samples > 0 ? d.samples : 80, 2, d.data_seed);
  return gen_spiral(d.samples > 0 ? d.samples : 100, 3, 1.75, 0.1, d.data_seed);
}

std::string data_source(const DataArgs& d) {
  if (!d.csv.empty()) return "csv:" + fs::path(d.csv).filename().string();
  return "generator:" + d.generator + ":samples=" + std::to_string(d.samples) + ":seed=" + std::to_string(d.data_seed);
}

RunConfig load_run_config(const std::string& path, const std::optional<std::uint64_t>& seed) {
  RunConfig c = path.empty() ? RunConfig{} : load_config(path);
  if (seed) c.seed = *seed;
  c.validate();
  return c;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

fs::path sibling(const fs::path& p, const std::string& suffix) {
  fs::path out = p;
  out.replace_extension();
  return out.string() + suffix;
}

void print_layer(const MetricsRecord& m) {
  std::cerr << "  layer " << m.layer << "  H=" << (m.hsic ? std::to_string(*m.hsic) : "nan") << "  sigma=" << m.sigma
            << "  beta=" << m.width << "  acc=" << m.train_accuracy << (m.improved ? "" : "  (no improvement)")
            << '\n';
}

int cmd_train(const std::string& config_path, const DataArgs& data_args, const std::string& out,
              const std::optional<std::uint64_t>& seed) {
  const RunConfig cfg = load_run_config(config_path, seed);
  const Dataset data = load_data(data_args);
  for (const auto& w : data.warnings) std::cerr << "warning: " << w << '\n';
  const Network net = train(data, cfg, print_layer);
  save_network(net, out);
  const fs::path metrics = sibling(out, ".metrics.csv");
  write_file(metrics, metrics_csv(net.history));
  std::cout << "network: " << out << "\nmetrics: " << metrics.string() << '\n';
  return 0;
}

int cmd_benchmark(const std::string& config_path, const DataArgs& data_args, int folds, const std::string& out,
                  const std::optional<std::uint64_t>& seed) {
  const RunConfig cfg = load_run_config(config_path, seed);
  const Dataset data = load_data(data_args);
  for (const auto& w : data.warnings) std::cerr << "warning: " << w << '\n';
  const BenchmarkReport report = run_benchmark(data, cfg, folds, data_source(data_args), [](const FoldResult& f) {
    std::cerr << "fold " << f.fold << ": layers=" << f.layers << " train=" << f.train_accuracy
              << " test=" << (f.test_accuracy ? std::to_string(*f.test_accuracy) : "-") << " (" << f.seconds << " s)\n";
  });
  write_file(out, report_to_json(report));
  write_file(sibling(out, ".metrics.csv"), report_metrics_csv(report));
  write_file(sibling(out, ".timing.csv"), timing_csv(report));
  for (const auto& [name, s] : report.aggregate) {
    std::cout << name << ": " << s.mean << " +- " << s.std << '\n';
  }
  return 0;
}

int cmd_simulate(const std::string& generator, const std::string& out_dir, const std::optional<std::uint64_t>& seed,
                 int samples, int two_layer_width) {
  const std::vector<std::string> names =
      generator.empty() ? std::vector<std::string>{"adversarial", "random"} : std::vector<std::string>{generator};
  std::ostringstream trace;
  std::ostringstream proj;
  std::ostringstream two;
  trace.precision(17);
  proj.precision(17);
  two.precision(17);
  trace << "dataset,layer,sigma,sigma_steps,H,improved\n";
  proj << "dataset,variant,layer,sample,label,value\n";
  two << "dataset,layer,sigma,H,separable\n";
  bool ok = true;
  for (const std::string& name : names) {
    DataArgs d;
    d.generator = name;
    d.samples = samples;
    d.data_seed = seed.value_or(0);
    const Dataset data = load_data(d);
    const Network net = train(data, monotone_simulation_config(seed.value_or(0)));
    double prev = net.input_hsic;
    trace << name << ",0,nan,0," << net.input_hsic << ",1\n";
    for (const MetricsRecord& m : net.history) {
      const double h = m.hsic.value_or(0.0);
      trace << name << ',' << m.layer << ',' << m.sigma << ',' << m.sigma_steps << ',' << h << ','
            << (m.improved ? 1 : 0) << '\n';
      if (m.improved && !(h > prev)) {
        std::cerr << name << ": layer " << m.layer << " flagged as improving but H did not increase\n";
        ok = false;
      }
      prev = h;
    }
    const auto outs = forward(net, data.x);
    for (std::size_t l = 0; l < outs.size(); ++l) {
      const Vector p = centroid_line_projection(outs[l].preactivation, data.labels);
      for (Eigen::Index i = 0; i < p.size(); ++i) {
        proj << name << ",schedule," << l + 1 << ',' << i << ',' << data.labels[static_cast<std::size_t>(i)] << ','
             << p(i) << '\n';
      }
    }
    const double final_h = net.history.back().hsic.value_or(0.0);
    std::cout << name << ": " << net.layers.size() << " layers, final H = " << final_h << '\n';

    const Network small = train(data, two_layer_config(1e-5, two_layer_width));
    const auto small_outs = forward(small, data.x);
    for (std::size_t l = 0; l < small_outs.size(); ++l) {
      const Vector p = centroid_line_projection(small_outs[l].preactivation, data.labels);
      const bool sep = separable_1d(p, data.labels);
      two << name << ',' << l + 1 << ',' << small.layers[l].sigma << ',' << small.history[l].hsic.value_or(0.0) << ','
          << (sep ? 1 : 0) << '\n';
      for (Eigen::Index i = 0; i < p.size(); ++i) {
        proj << name << ",two_layer," << l + 1 << ',' << i << ',' << data.labels[static_cast<std::size_t>(i)] << ','
             << p(i) << '\n';
      }
    }
    std::cout << name << ": two-layer sigma=1e-5 H = " << small.history.back().hsic.value_or(0.0) << '\n';
  }
  const fs::path dir(out_dir);
  write_file(dir / "trace.csv", trace.str());
  write_file(dir / "projections.csv", proj.str());
  write_file(dir / "two_layer.csv", two.str());
  if (!ok) {
    std::cerr << "error: H sequence not strictly increasing on improvement-flagged layers\n";
    return 1;
  }
  return 0;
}

int cmd_dump_kernel(const std::string& network_path, const DataArgs& data_args, int layer, const std::string& out) {
  const Network net = load_network(network_path);
  const Dataset data = load_data(data_args);
  const std::vector<int> order = class_contiguous_order(data.labels);
  Matrix x(data.size(), data.dim());
  std::vector<int> labels(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = data.x.row(order[i]);
    labels[i] = data.labels[static_cast<std::size_t>(order[i])];
  }
  const Matrix k = layer_kernel(net, x, layer);
  write_file(out, kernel_csv(k));
  const fs::path image = sibling(out, ".pgm");
  write_file(image, kernel_pgm(k));
  const auto [within, cross] = block_means(k, labels);
  std::cout << "within-class mean " << within << ", cross-class mean " << cross << "\nimage: " << image.string() << '\n';
  return 0;
}

int cmd_sigma_sweep(const std::string& config_path, const DataArgs& data_args, int points, const std::string& out,
                    const std::optional<std::uint64_t>& seed) {
  const RunConfig cfg = load_run_config(config_path, seed);
  const Dataset data = load_data(data_args);
  const SigmaSweep sweep = sigma_sweep(data, cfg, points);
  std::ostringstream table;
  table.precision(17);
  table << "sigma,separation,hsic\n";
  for (const SweepRow& r : sweep.rows) table << r.sigma << ',' << r.separation << ',' << r.hsic << '\n';
  write_file(out, table.str());
  std::ostringstream summary;
  summary.precision(17);
  summary << "separation_sigma = " << sweep.separation_opt.sigma << '\n'
          << "separation_objective = " << sweep.separation_opt.objective << '\n'
          << "separation_single_peak = " << (sweep.separation_single_peak ? "true" : "false") << '\n'
          << "hsic_sigma = " << sweep.hsic_opt.sigma << '\n'
          << "hsic_objective = " << sweep.hsic_opt.objective << '\n'
          << "hsic_single_peak = " << (sweep.hsic_single_peak ? "true" : "false") << '\n';
  const fs::path summary_path = sibling(out, ".summary.txt");
  write_file(summary_path, summary.str());
  std::cout << summary.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layer-wise kernel networks trained in closed form"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::string network_path;
  std::optional<std::uint64_t> seed;
  int folds = 10;
  int layer = 1;
  int points = 256;
  int two_layer_width = 0;
  DataArgs data;

  auto* train_cmd = app.add_subcommand("train", "train a network and write it with its per-layer metrics");
  train_cmd->add_option("--config", config_path, "key = value run configuration");
  add_data_options(train_cmd, data);
  train_cmd->add_option("--out", out, "network file (JSON)")->required();
  train_cmd->add_option("--seed", seed, "overrides the config seed");

  auto* bench_cmd = app.add_subcommand("benchmark", "k-fold cross-validation report");
  bench_cmd->add_option("--config", config_path, "key = value run configuration");
  add_data_options(bench_cmd, data);
  bench_cmd->add_option("--folds", folds, "number of folds")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out", out, "report file (JSON)")->required();
  bench_cmd->add_option("--seed", seed, "overrides the config seed");

  auto* sim_cmd = app.add_subcommand("simulate-thm1", "monotone HSIC simulation on adversarial and random data");
  std::string sim_generator;
  sim_cmd->add_option("--generator", sim_generator, "only this dataset")->check(CLI::IsMember({"adversarial", "random"}));
  sim_cmd->add_option("--samples", data.samples, "generator size (per class; total for random)");
  sim_cmd->add_option("--out", out, "output directory")->required();
  sim_cmd->add_option("--seed", seed, "data and run seed");
  sim_cmd->add_option("--two-layer-width", two_layer_width, "RFF width of the two-layer check (0 = exact map)");

  auto* dump_cmd = app.add_subcommand("dump-kernel", "write a layer kernel as CSV and PGM");
  dump_cmd->add_option("--network", network_path, "network file")->required();
  add_data_options(dump_cmd, data);
  dump_cmd->add_option("--layer", layer, "0 = input kernel, l = activation kernel of layer l");
  dump_cmd->add_option("--out", out, "CSV path; the image goes next to it")->required();

  auto* sweep_cmd = app.add_subcommand("sigma-sweep", "both bandwidth objectives on a dense log grid");
  sweep_cmd->add_option("--config", config_path, "key = value run configuration");
  add_data_options(sweep_cmd, data);
  sweep_cmd->add_option("--points", points, "grid size")->check(CLI::Range(2, 100000));
  sweep_cmd->add_option("--out", out, "table path (CSV)")->required();
  sweep_cmd->add_option("--seed", seed, "overrides the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(config_path, data, out, seed);
    if (bench_cmd->parsed()) return cmd_benchmark(config_path, data, folds, out, seed);
    if (sim_cmd->parsed()) return cmd_simulate(sim_generator, out, seed, data.samples, two_layer_width);
    if (dump_cmd->parsed()) return cmd_dump_kernel(network_path, data, layer, out);
    if (sweep_cmd->parsed()) return cmd_sigma_sweep(config_path, data, points, out, seed);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
