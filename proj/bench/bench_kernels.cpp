#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "drnv/kernels.hpp"
#include "drnv/model.hpp"

namespace {

drnv::ValidatedInstance bench_instance(std::size_t n) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> demand(11.0, 2.0);
  std::vector<double> xs(n);
  for (auto& x : xs) x = std::max(0.0, demand(rng));
  return drnv::make_instance(xs, 2.5, {20.0, 10.0});
}

drnv::Exec exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? drnv::Exec::Serial : drnv::Exec::Parallel;
}

void BM_GridScan(benchmark::State& state) {
  const auto inst = bench_instance(48);
  const drnv::FEvaluator f(inst, 3.0, 11.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(drnv::grid_scan(f, 0.0, 40.0, 200, -600.0, 600.0, 200, exec_of(state)));
  }
}
BENCHMARK(BM_GridScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_VertexArgmin(benchmark::State& state) {
  const auto inst = bench_instance(48);
  const drnv::FEvaluator f(inst, 3.0, 11.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u1(0.0, 40.0), u2(-600.0, 600.0);
  std::vector<drnv::Point2> pts(5000);
  for (auto& p : pts) p = {u1(rng), u2(rng)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(drnv::argmin_points(f, pts, exec_of(state)));
  }
}
BENCHMARK(BM_VertexArgmin)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_DenseArgmaxG(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(drnv::dense_argmax_g(0.5, 3.0, 5.0, {20.0, 10.0}, 60.0, 1e-4, exec_of(state)));
  }
}
BENCHMARK(BM_DenseArgmaxG)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
