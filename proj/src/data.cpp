#include "hsicnet/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "hsicnet/errors.hpp"

namespace hsicnet {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<int> parse_index(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0) return std::nullopt;
  return v;
}

}  // namespace

Dataset make_dataset(Matrix x, std::vector<int> labels) {
  if (static_cast<Eigen::Index>(labels.size()) != x.rows()) {
    throw InvalidArgument("dataset has " + std::to_string(x.rows()) + " rows but " + std::to_string(labels.size()) +
                          " labels");
  }
  Dataset d;
  d.num_classes = labels.empty() ? 0 : count_classes(labels);
  d.y = one_hot(labels, d.num_classes);
  d.pair_sets = make_pair_sets(labels);
  d.x = std::move(x);
  d.labels = std::move(labels);
  d.constant_columns.assign(static_cast<std::size_t>(d.x.cols()), false);
  return d;
}

Dataset subset(const Dataset& data, std::span<const int> rows) {
  Matrix x(static_cast<Eigen::Index>(rows.size()), data.x.cols());
  std::vector<int> labels(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = data.x.row(rows[i]);
    labels[i] = data.labels[static_cast<std::size_t>(rows[i])];
  }
  Dataset out = make_dataset(std::move(x), std::move(labels));
  // keep the parent's class count so one-hot widths agree across splits
  if (out.num_classes < data.num_classes) {
    out.num_classes = data.num_classes;
    out.y = one_hot(out.labels, out.num_classes);
  }
  out.class_names = data.class_names;
  out.feature_names = data.feature_names;
  out.constant_columns = data.constant_columns;
  return out;
}

Standardizer Standardizer::fit(const Matrix& x) {
  Standardizer s;
  const Eigen::Index n = x.rows();
  s.mean = n > 0 ? Vector(x.colwise().mean().transpose()) : Vector::Zero(x.cols());
  s.scale = Vector::Ones(x.cols());
  s.constant.assign(static_cast<std::size_t>(x.cols()), false);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = n > 0 ? (x.col(j).array() - s.mean(j)).square().mean() : 0.0;
    const double sd = std::sqrt(var);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(s.mean(j))))) {
      s.constant[static_cast<std::size_t>(j)] = true;
    } else {
      s.scale(j) = sd;
    }
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != mean.size()) throw InvalidArgument("standardizer fitted on a different feature count");
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (constant[static_cast<std::size_t>(j)]) {
      out.col(j).setZero();
    } else {
      out.col(j) = (x.col(j).array() - mean(j)) / scale(j);
    }
  }
  return out;
}

void standardize_in_place(Dataset& data) {
  const Standardizer s = Standardizer::fit(data.x);
  data.x = s.apply(data.x);
  data.constant_columns = s.constant;
  for (std::size_t j = 0; j < s.constant.size(); ++j) {
    if (s.constant[j]) data.warnings.push_back("feature column " + std::to_string(j) + " is constant; set to 0");
  }
}

Dataset parse_csv(const std::string& text, const CsvOptions& opts) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  {
    std::istringstream in(text);
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
      ++ln;
      if (ln == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
      if (trim(line).empty()) continue;
      rows.push_back(split_row(line));
      line_numbers.push_back(ln);
    }
  }
  if (rows.empty()) throw ParseError("CSV contains no rows");
  const std::size_t width = rows.front().size();
  if (width < 2) throw ParseError("CSV needs at least one feature column and a label column");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw ParseError("line " + std::to_string(line_numbers[r]) + ": expected " + std::to_string(width) +
                       " cells, found " + std::to_string(rows[r].size()));
    }
  }

  // locate the label column and decide whether row 0 is a header
  std::size_t label_col = width - 1;
  bool header = false;
  if (opts.label_column) {
    const auto it = std::find(rows.front().begin(), rows.front().end(), *opts.label_column);
    if (it != rows.front().end()) {
      label_col = static_cast<std::size_t>(it - rows.front().begin());
      header = true;
    } else if (const auto idx = parse_index(*opts.label_column)) {
      if (*idx >= static_cast<int>(width)) throw ParseError("label column index " + *opts.label_column + " out of range");
      label_col = static_cast<std::size_t>(*idx);
    } else {
      throw ParseError("label column '" + *opts.label_column + "' not found in header");
    }
  }
  if (!header) {
    for (std::size_t c = 0; c < width; ++c) {
      if (c != label_col && !parse_number(rows.front()[c])) header = true;
    }
  }

  const std::size_t first = header ? 1 : 0;
  const std::size_t n = rows.size() - first;
  if (n == 0) throw ParseError("CSV has a header but no data rows");
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width - 1));
  std::vector<int> labels(n);
  std::vector<std::string> names;
  std::map<std::string, int> index;
  for (std::size_t r = first; r < rows.size(); ++r) {
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < width; ++c) {
      const std::string& cell = rows[r][c];
      if (c == label_col) {
        if (cell.empty()) throw ParseError("line " + std::to_string(line_numbers[r]) + ": empty label");
        auto [it, inserted] = index.try_emplace(cell, static_cast<int>(names.size()));
        if (inserted) names.push_back(cell);
        labels[r - first] = it->second;
        continue;
      }
      const auto v = parse_number(cell);
      if (!v) {
        throw ParseError("line " + std::to_string(line_numbers[r]) + ", column " + std::to_string(c + 1) +
                         ": cannot parse '" + cell + "' as a number");
      }
      x(static_cast<Eigen::Index>(r - first), col++) = *v;
    }
  }
  if (names.size() < 2) throw DegenerateInput("CSV labels contain a single class");

  Dataset d = make_dataset(std::move(x), std::move(labels));
  d.class_names = std::move(names);
  if (header) {
    for (std::size_t c = 0; c < width; ++c) {
      if (c != label_col) d.feature_names.push_back(rows.front()[c]);
    }
  }
  if (opts.standardize) standardize_in_place(d);
  return d;
}

Dataset load_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), opts);
}

Dataset gen_adversarial(int n_per_class, double noise, std::uint64_t seed) {
  if (n_per_class < 2) throw InvalidArgument("gen_adversarial: n_per_class must be >= 2");
  if (!(noise >= 0.0)) throw InvalidArgument("gen_adversarial: noise must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index n = n_per_class;
  Matrix x(2 * n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = unif(rng);
    x(i, 1) = unif(rng);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    x(n + i, 0) = x(i, 0) + noise * normal(rng);
    x(n + i, 1) = x(i, 1) + noise * normal(rng);
  }
  std::vector<int> labels(static_cast<std::size_t>(2 * n), 0);
  std::fill(labels.begin() + n, labels.end(), 1);
  Dataset d = make_dataset(std::move(x), std::move(labels));
  if (noise == 0.0) {
    d.warnings.emplace_back("noise = 0 produces identical samples with conflicting labels");
  }
  standardize_in_place(d);
  return d;
}

Dataset gen_random(int n, int dim, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("gen_random: n must be >= 2");
  if (dim < 1) throw InvalidArgument("gen_random: d must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) x(i, j) = normal(rng);
  }
  std::vector<int> labels(static_cast<std::size_t>(n), 1);
  std::fill(labels.begin(), labels.begin() + n / 2, 0);
  for (std::size_t i = labels.size() - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(labels[i], labels[pick(rng)]);
  }
  Dataset d = make_dataset(std::move(x), std::move(labels));
  standardize_in_place(d);
  return d;
}

Dataset gen_spiral(int n_per_class, int classes, double turns, double noise, std::uint64_t seed) {
  if (n_per_class < 2) throw InvalidArgument("gen_spiral: n_per_class must be >= 2");
  if (classes < 2) throw InvalidArgument("gen_spiral: need at least two classes");
  if (!(turns > 0.0)) throw InvalidArgument("gen_spiral: turns must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(static_cast<Eigen::Index>(n_per_class) * classes, 2);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(x.rows()));
  const double two_pi = 2.0 * std::numbers::pi;
  Eigen::Index row = 0;
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < n_per_class; ++i) {
      // radius grows linearly with angle along each arm
      const double t = 0.05 + 0.95 * i / (n_per_class - 1);
      const double theta = t * turns * two_pi + two_pi * c / classes + noise * normal(rng);
      x(row, 0) = t * std::cos(theta);
      x(row, 1) = t * std::sin(theta);
      labels.push_back(c);
      ++row;
    }
  }
  Dataset d = make_dataset(std::move(x), std::move(labels));
  standardize_in_place(d);
  return d;
}

std::vector<int> FoldSplit::train_rows(int fold) const {
  std::vector<int> rows;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (k == 1 || assignments[i] != fold) rows.push_back(static_cast<int>(i));
  }
  return rows;
}

std::vector<int> FoldSplit::test_rows(int fold) const {
  std::vector<int> rows;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) rows.push_back(static_cast<int>(i));
  }
  return rows;
}

FoldSplit kfold(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 1) throw InvalidArgument("kfold: k must be >= 1");
  if (static_cast<std::size_t>(k) > labels.size()) throw InvalidArgument("kfold: more folds than samples");
  const int classes = count_classes(labels);
  std::vector<std::vector<int>> by_class(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[static_cast<std::size_t>(labels[i])].push_back(static_cast<int>(i));
  std::mt19937_64 rng(seed);
  FoldSplit split;
  split.k = k;
  split.seed = seed;
  split.assignments.assign(labels.size(), 0);
  // shuffle within each class, then deal the concatenation round-robin
  std::size_t pos = 0;
  for (auto& members : by_class) {
    for (std::size_t i = members.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(members[i - 1], members[pick(rng)]);
    }
    for (const int row : members) split.assignments[static_cast<std::size_t>(row)] = static_cast<int>(pos++ % static_cast<std::size_t>(k));
  }
  return split;
}

}  // namespace hsicnet
