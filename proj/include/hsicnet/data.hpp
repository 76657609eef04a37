#pragma once

// Datasets: CSV ingestion, standardization, synthetic generators and
// stratified k-fold splits.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsicnet/kernel_core.hpp"

namespace hsicnet {

struct Dataset {
  Matrix x;                 // n x d
  std::vector<int> labels;  // n, values in [0, num_classes)
  int num_classes = 0;
  Matrix y;                 // n x num_classes one-hot
  PairSets pair_sets;
  std::vector<std::string> class_names;
  std::vector<std::string> feature_names;
  std::vector<bool> constant_columns;  // flagged during standardization
  std::vector<std::string> warnings;

  [[nodiscard]] Eigen::Index size() const { return x.rows(); }
  [[nodiscard]] Eigen::Index dim() const { return x.cols(); }
};

/// Builds labels-derived members (y, pair_sets, num_classes). Throws
/// InvalidArgument on a size mismatch or negative label.
Dataset make_dataset(Matrix x, std::vector<int> labels);

/// Row subset; labels keep their original numbering.
Dataset subset(const Dataset& data, std::span<const int> rows);

// Column mean / population standard deviation. Constant columns map to 0.
struct Standardizer {
  Vector mean;
  Vector scale;
  std::vector<bool> constant;

  static Standardizer fit(const Matrix& x);
  [[nodiscard]] Matrix apply(const Matrix& x) const;
};

void standardize_in_place(Dataset& data);

struct CsvOptions {
  std::optional<std::string> label_column;  // header name or 0-based index; last column when unset
  bool standardize = true;
};

Dataset load_csv(const std::string& path, const CsvOptions& opts = {});
Dataset parse_csv(const std::string& text, const CsvOptions& opts = {});

Dataset gen_adversarial(int n_per_class, double noise = 0.01, std::uint64_t seed = 0);
Dataset gen_random(int n, int d = 2, std::uint64_t seed = 0);
Dataset gen_spiral(int n_per_class, int classes = 3, double turns = 1.75, double noise = 0.1, std::uint64_t seed = 0);

struct FoldSplit {
  int k = 0;
  std::vector<int> assignments;
  std::uint64_t seed = 0;

  /// Rows outside fold f. With k = 1 both splits are the full data.
  [[nodiscard]] std::vector<int> train_rows(int fold) const;
  [[nodiscard]] std::vector<int> test_rows(int fold) const;
};

FoldSplit kfold(std::span<const int> labels, int k, std::uint64_t seed);

}  // namespace hsicnet
