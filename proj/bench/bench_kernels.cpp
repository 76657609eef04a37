// Serial reference vs OpenMP kernels on the dense O(n^2) building blocks.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hsicnet/kernels.hpp"

namespace k = hsicnet::kernels;

namespace {

Eigen::MatrixXd random_rows(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd m(n, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = g(rng);
  return m;
}

std::vector<int> labels(Eigen::Index n) {
  std::vector<int> l(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < l.size(); ++i) l[i] = static_cast<int>(i % 3);
  return l;
}

template <auto Fn>
void BM_sq_dists(benchmark::State& state) {
  const Eigen::MatrixXd a = random_rows(state.range(0), 300, 1);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(a));
  state.SetComplexityN(state.range(0));
}

template <auto Fn>
void BM_gaussian(benchmark::State& state) {
  const Eigen::MatrixXd d2 = k::serial::sq_dists(random_rows(state.range(0), 2, 2));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(d2, 0.7));
}

template <auto Fn>
void BM_cos_features(benchmark::State& state) {
  const Eigen::MatrixXd proj = random_rows(state.range(0), 300, 3);
  const Eigen::VectorXd phases = random_rows(300, 1, 4).col(0);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(proj, phases, 0.08));
}

template <auto Fn>
void BM_pair_sums(benchmark::State& state) {
  const Eigen::MatrixXd m = random_rows(state.range(0), state.range(0), 5);
  const auto l = labels(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(m, l));
}

}  // namespace

BENCHMARK(BM_sq_dists<k::serial::sq_dists>)->Name("sq_dists/serial")->RangeMultiplier(2)->Range(128, 1024);
BENCHMARK(BM_sq_dists<k::omp::sq_dists>)->Name("sq_dists/omp")->RangeMultiplier(2)->Range(128, 1024);
BENCHMARK(BM_gaussian<k::serial::gaussian_from_sq>)->Name("gaussian/serial")->RangeMultiplier(2)->Range(256, 2048);
BENCHMARK(BM_gaussian<k::omp::gaussian_from_sq>)->Name("gaussian/omp")->RangeMultiplier(2)->Range(256, 2048);
BENCHMARK(BM_cos_features<k::serial::cos_features>)->Name("cos_features/serial")->RangeMultiplier(2)->Range(256, 2048);
BENCHMARK(BM_cos_features<k::omp::cos_features>)->Name("cos_features/omp")->RangeMultiplier(2)->Range(256, 2048);
BENCHMARK(BM_pair_sums<k::serial::pair_sums>)->Name("pair_sums/serial")->RangeMultiplier(2)->Range(256, 2048);
BENCHMARK(BM_pair_sums<k::omp::pair_sums>)->Name("pair_sums/omp")->RangeMultiplier(2)->Range(256, 2048);

BENCHMARK_MAIN();
