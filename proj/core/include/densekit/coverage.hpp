#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "densekit/augment.hpp"
#include "densekit/geometry.hpp"
#include "densekit/histogram.hpp"

namespace densekit {

/// Exact area of the union of axis-aligned boxes (sweep over x with a
/// segment tree on compressed y). Empty input gives 0.
double union_area(std::span<const Box> boxes);

struct CoverageConfig {
    CropStrategy strategy{CropStrategy::Uniform};
    std::size_t epochs{12};
    std::size_t trials{1000};
    std::uint64_t seed{0};
    std::size_t threads{1};
    std::size_t histogram_bins{20};
};

struct CoverageDistribution {
    std::vector<double> samples;  // one per trial, in trial order
    Histogram histogram;          // over [0, 1]
    double mean{0.0};
    double stddev{0.0};  // sample standard deviation (n - 1)
};

/// Coverage of a single trial: the epoch windows drawn from stream
/// (seed, trial_index), one per epoch, as area(union) / area(image).
double trial_coverage(const ImageDims& dims, CropSize crop, const CoverageConfig& cfg,
                      std::size_t trial_index);

/// Runs `cfg.trials` independent trials. The result does not depend on
/// `cfg.threads`.
CoverageDistribution simulate_coverage(const ImageDims& dims, CropSize crop,
                                       const CoverageConfig& cfg);

}  // namespace densekit
