#include "densekit/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace densekit {
namespace {

void fill_cumulative(Histogram& h) {
    const std::uint64_t total = h.total();
    h.cumulative_ratio.assign(h.counts.size(), 0.0);
    std::uint64_t running = 0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        running += h.counts[i];
        h.cumulative_ratio[i] =
            total == 0 ? 0.0 : static_cast<double>(running) / static_cast<double>(total);
    }
}

}  // namespace

Histogram Histogram::with_bin_width(std::span<const double> values, double bin_width,
                                    double origin) {
    if (!(bin_width > 0.0)) {
        throw std::invalid_argument("histogram bin width must be positive");
    }
    double top = origin;
    for (double v : values) {
        top = std::max(top, v);
    }
    const auto bins = static_cast<std::size_t>(std::floor((top - origin) / bin_width)) + 1;

    Histogram h;
    h.bin_edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
        h.bin_edges[i] = origin + static_cast<double>(i) * bin_width;
    }
    h.counts.assign(bins, 0);
    for (double v : values) {
        const double pos = std::floor((v - origin) / bin_width);
        const auto idx =
            pos <= 0.0 ? std::size_t{0} : std::min(static_cast<std::size_t>(pos), bins - 1);
        ++h.counts[idx];
    }
    fill_cumulative(h);
    return h;
}

Histogram Histogram::with_range(std::span<const double> values, double lo, double hi,
                                std::size_t bins) {
    if (bins == 0 || !(hi > lo)) {
        throw std::invalid_argument("histogram range must be non-empty with at least one bin");
    }
    Histogram h;
    const double width = (hi - lo) / static_cast<double>(bins);
    h.bin_edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
        h.bin_edges[i] = lo + static_cast<double>(i) * width;
    }
    h.bin_edges.back() = hi;
    h.counts.assign(bins, 0);
    for (double v : values) {
        const double pos = std::floor((v - lo) / width);
        const auto idx =
            pos <= 0.0 ? std::size_t{0} : std::min(static_cast<std::size_t>(pos), bins - 1);
        ++h.counts[idx];
    }
    fill_cumulative(h);
    return h;
}

std::uint64_t Histogram::total() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

}  // namespace densekit
