#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "densekit/geometry.hpp"

namespace densekit {

struct Detection {
    Box box;
    double score{0.0};

    friend bool operator==(const Detection&, const Detection&) = default;
};

/// The four tunable inference hyper-parameters. Defaults are the tuned optimum.
struct NmsConfig {
    std::size_t pre_topk{3000};
    double score_threshold{0.05};
    double iou_threshold{0.7};
    std::size_t max_out{400};

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// Greedy single-class NMS:
///   1. stable sort by score, descending;
///   2. keep the first pre_topk;
///   3. drop scores below score_threshold;
///   4. accept the best remaining detection and suppress every remaining one
///      whose IoU with it is strictly greater than iou_threshold; repeat;
///   5. keep the first max_out accepted detections.
std::vector<Detection> nms(std::span<const Detection> dets, const NmsConfig& cfg);

}  // namespace densekit
