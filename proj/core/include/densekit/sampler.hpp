#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "densekit/dataset.hpp"
#include "densekit/geometry.hpp"
#include "densekit/histogram.hpp"
#include "densekit/rng.hpp"

namespace densekit {

struct AnchorConfig {
    std::vector<double> strides{4, 8, 16, 32, 64};
    double base_scale{8.0};
    std::vector<double> ratios{0.5, 1.0, 2.0};  // width / height

    void validate() const;
};

struct AssignConfig {
    double pos_iou{0.7};
    double neg_iou{0.3};
    bool match_low_quality{true};

    void validate() const;
};

struct SamplerConfig {
    std::size_t num{512};
    double pos_fraction{0.5};

    void validate() const;
};


enum class SampleLabel : std::int8_t { Negative = 0, Positive = 1, Ignore = -1 };

struct Assignment {
    std::vector<SampleLabel> labels;
    std::vector<std::ptrdiff_t> matched_gt;  // -1 when not positive
    std::vector<double> max_iou;

    [[nodiscard]] std::size_t positives() const noexcept;
    [[nodiscard]] std::size_t negatives() const noexcept;
};

/// For each stride s, a ceil(W/s) x ceil(H/s) grid of centers at
/// ((i + 0.5)s, (j + 0.5)s), one anchor per ratio with area (base_scale * s)^2.
/// Anchors are not clipped to the image. Order: stride, row, column, ratio.
std::vector<Box> generate_anchors(const ImageDims& dims, const AnchorConfig& cfg);

/// Number of anchors generate_anchors would return.
std::size_t anchor_count(const ImageDims& dims, const AnchorConfig& cfg);

/// Max-IoU assignment: positive at max IoU >= pos_iou, negative below neg_iou,
/// ignore in between. With match_low_quality every anchor attaining a GT's
/// (non-zero) maximum IoU is also positive for that GT.
Assignment assign(std::span<const Box> anchors, std::span<const Box> gts, const AssignConfig& cfg);

/// Positive anchors for one image after rescaling it to (long_side, short_side).
std::size_t count_positives(const ImageRecord& rec, double long_side, double short_side,
                            const AnchorConfig& anchor_cfg, const AssignConfig& assign_cfg);

struct PositiveCounts {
    std::vector<std::size_t> per_image;  // dataset order
    Histogram histogram;
};

PositiveCounts positive_histogram(const Dataset& d, double long_side, double short_side,
                                  const AnchorConfig& anchor_cfg, const AssignConfig& assign_cfg,
                                  double bin_width = 16.0, std::size_t threads = 1);

struct SampledIndices {
    std::vector<std::size_t> positives;
    std::vector<std::size_t> negatives;
};

/// Up to floor(num * pos_fraction) positives, uniformly without replacement,
/// then negatives to fill up to num. Each list is returned in ascending order.
SampledIndices cap_sample(std::span<const SampleLabel> labels, const SamplerConfig& cfg, Rng& rng);

}  // namespace densekit
