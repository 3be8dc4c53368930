#include <random>

#include <benchmark/benchmark.h>

#include "densekit/coverage.hpp"

namespace {

void BM_UnionArea(benchmark::State& state) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<densekit::Box> boxes;
    for (int i = 0; i < state.range(0); ++i) {
        const double x = u(gen) * 1800.0;
        const double y = u(gen) * 600.0;
        boxes.push_back({x, y, x + 1200.0 * u(gen), y + 1200.0 * u(gen)});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(densekit::union_area(boxes));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_UnionArea)->RangeMultiplier(4)->Range(8, 8192)->Complexity();

void BM_SimulateCoverage(benchmark::State& state) {
    densekit::CoverageConfig cfg;
    cfg.epochs = static_cast<std::size_t>(state.range(0));
    cfg.trials = 1000;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            densekit::simulate_coverage(densekit::ImageDims{3000, 1800}, densekit::CropSize{1200, 1200}, cfg));
    }
}
BENCHMARK(BM_SimulateCoverage)->Arg(12)->Arg(18)->Unit(benchmark::kMillisecond);

}  // namespace
