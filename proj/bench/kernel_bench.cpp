#include "confspec/kernels.hpp"
#include "confspec/quadrature.hpp"

#include <benchmark/benchmark.h>

using namespace confspec;

namespace {

const QuadratureGrid& nodes(int order) {
  static thread_local QuadratureGrid g;
  if (g.order != order) g = sphere_grid(2, order);
  return g;
}

Eigen::MatrixXd features(const QuadratureGrid& g, int k) {
  Eigen::MatrixXd phi(g.size(), k);
  for (Eigen::Index i = 0; i < g.size(); ++i)
    for (int j = 0; j < k; ++j) phi(i, j) = std::cos((j + 1) * g.nodes(0, i) + j * g.nodes(1, i));
  return phi;
}

template <Vec (*F)(const Eigen::MatrixXd&, const Eigen::VectorXd&, const Vec&)>
void moment(benchmark::State& state) {
  const QuadratureGrid& g = nodes(static_cast<int>(state.range(0)));
  Vec xi(3);
  xi << 0.2, -0.1, 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(F(g.nodes, g.weights, xi));
  state.SetItemsProcessed(state.iterations() * g.size());
}

template <Mat (*F)(const Eigen::MatrixXd&, const Eigen::VectorXd&)>
void second_moment(benchmark::State& state) {
  const QuadratureGrid& g = nodes(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(F(g.nodes, g.weights));
  state.SetItemsProcessed(state.iterations() * g.size());
}

template <Eigen::MatrixXd (*F)(const Eigen::MatrixXd&, const Eigen::VectorXd&)>
void gram(benchmark::State& state) {
  const QuadratureGrid& g = nodes(static_cast<int>(state.range(0)));
  const Eigen::MatrixXd phi = features(g, 256);
  for (auto _ : state) benchmark::DoNotOptimize(F(phi, g.weights));
  state.SetItemsProcessed(state.iterations() * g.size());
}

}  // namespace

BENCHMARK(moment<kernels::serial::moment>)->Arg(40)->Arg(160);
BENCHMARK(moment<kernels::parallel::moment>)->Arg(40)->Arg(160);
BENCHMARK(second_moment<kernels::serial::second_moment>)->Arg(40)->Arg(160);
BENCHMARK(second_moment<kernels::parallel::second_moment>)->Arg(40)->Arg(160);
BENCHMARK(gram<kernels::serial::weighted_gram>)->Arg(50);
BENCHMARK(gram<kernels::parallel::weighted_gram>)->Arg(50);

BENCHMARK_MAIN();
