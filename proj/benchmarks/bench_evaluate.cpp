#include <benchmark/benchmark.h>

#include "densekit/evalmap.hpp"
#include "scenes.hpp"

namespace {

void BM_EvaluateRandomScene(benchmark::State& state) {
    const auto s = densekit::testing::random_scene(17, 50, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(densekit::evaluate(s.gt, s.dets));
    }
}
BENCHMARK(BM_EvaluateRandomScene)->Arg(1000)->Arg(8000)->Unit(benchmark::kMillisecond);

void BM_EvaluateDenseImage(benchmark::State& state) {
    const auto s = densekit::testing::perfect_dense_scene(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(densekit::evaluate(s.gt, s.dets));
    }
}
BENCHMARK(BM_EvaluateDenseImage)->Arg(150)->Arg(225)->Unit(benchmark::kMillisecond);

}  // namespace
