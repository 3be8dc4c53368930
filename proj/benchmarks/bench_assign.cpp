#include <random>

#include <benchmark/benchmark.h>

#include "densekit/sampler.hpp"

namespace {

void BM_AssignDenseImage(benchmark::State& state) {
    const densekit::ImageDims dims{1333, 800};
    const auto anchors = densekit::generate_anchors(dims, densekit::AnchorConfig{});
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<densekit::Box> gts;
    for (int i = 0; i < state.range(0); ++i) {
        const double x = u(gen) * 1280.0;
        const double y = u(gen) * 740.0;
        gts.push_back({x, y, x + 15.0 + 40.0 * u(gen), y + 20.0 + 40.0 * u(gen)});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(densekit::assign(anchors, gts, densekit::AssignConfig{}));
    }
    state.counters["anchors"] = static_cast<double>(anchors.size());
}
BENCHMARK(BM_AssignDenseImage)->Arg(50)->Arg(150)->Arg(576)->Unit(benchmark::kMillisecond);

}  // namespace
