#pragma once

// k-fold cross-validation harness and its JSON report.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hsicnet/data.hpp"
#include "hsicnet/network.hpp"

namespace hsicnet {

inline constexpr const char* kVersion = "0.1.0";

struct FoldResult {
  int fold = 0;
  std::uint64_t seed = 0;
  int n_train = 0;
  int n_test = 0;
  int layers = 0;
  double train_accuracy = 0.0;
  std::optional<double> test_accuracy;  // absent when k = 1
  MetricsRecord final_metrics;
  std::vector<MetricsRecord> history;
  double seconds = 0.0;  // wall clock, training plus evaluation; not serialized in the report
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single fold
  int count = 0;
};

struct BenchmarkReport {
  std::string version = kVersion;
  std::string data_source;
  RunConfig config;
  int k = 0;
  std::vector<FoldResult> folds;
  std::map<std::string, Summary> aggregate;
};

using FoldCallback = std::function<void(const FoldResult&)>;

BenchmarkReport run_benchmark(const Dataset& data, const RunConfig& config, int k, const std::string& data_source,
                              const FoldCallback& on_fold = {});

/// Aggregates over folds for every reported metric.
std::map<std::string, Summary> aggregate_folds(const std::vector<FoldResult>& folds);

/// Report document without wall-clock values, so reruns are byte-identical.
std::string report_to_json(const BenchmarkReport& report);
/// Parses a report and checks that the stored aggregates match the folds to 1e-12.
BenchmarkReport report_from_json(const std::string& text);

/// Per-fold wall-clock seconds, one "fold,seconds" row per fold.
std::string timing_csv(const BenchmarkReport& report);
/// One row per (fold, layer) with the per-layer metrics.
std::string report_metrics_csv(const BenchmarkReport& report);
/// Per-layer metrics table: layer,H,T,C,MSE,CE,acc,sigma,beta.
std::string metrics_csv(const std::vector<MetricsRecord>& history);

}  // namespace hsicnet
