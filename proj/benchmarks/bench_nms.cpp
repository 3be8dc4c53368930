#include <random>

#include <benchmark/benchmark.h>

#include "densekit/nms.hpp"

namespace {

std::vector<densekit::Detection> dense_detections(std::size_t n) {
    std::mt19937_64 gen(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<densekit::Detection> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = u(gen) * 1300.0;
        const double y = u(gen) * 780.0;
        out.push_back({densekit::Box{x, y, x + 20.0 + 40.0 * u(gen), y + 20.0 + 40.0 * u(gen)}, u(gen)});
    }
    return out;
}

void BM_Nms(benchmark::State& state) {
    const auto dets = dense_detections(static_cast<std::size_t>(state.range(0)));
    const densekit::NmsConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(densekit::nms(dets, cfg));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Nms)->Arg(200)->Arg(1000)->Arg(3000)->Arg(10000);

}  // namespace
