#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace densekit {

/// Binned counts with a cumulative ratio curve.
/// Bins are half-open [edge_i, edge_{i+1}); the last bin also takes its upper edge.
struct Histogram {
    std::vector<double> bin_edges;
    std::vector<std::uint64_t> counts;
    std::vector<double> cumulative_ratio;

    /// Fixed-width bins starting at `origin`, extended until every value fits.
    /// Values below `origin` land in the first bin.
    static Histogram with_bin_width(std::span<const double> values, double bin_width,
                                    double origin = 0.0);

    /// `bins` equal bins spanning [lo, hi]; values outside are clamped into the end bins.
    static Histogram with_range(std::span<const double> values, double lo, double hi,
                                std::size_t bins);

    [[nodiscard]] std::uint64_t total() const noexcept;
};

}  // namespace densekit
