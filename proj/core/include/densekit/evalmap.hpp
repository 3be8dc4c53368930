#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "densekit/dataset.hpp"
#include "densekit/nms.hpp"

namespace densekit {

/// Detections grouped by image.
using DetectionSet = std::map<ImageId, std::vector<Detection>>;

struct AreaRange {
    std::string name;
    double lo{0.0};
    double hi{0.0};
};

struct EvalConfig {
    /// 0.50, 0.55, ..., 0.95: each the double nearest its two-decimal value.
    std::vector<double> iou_thresholds = coco_iou_thresholds();
    std::size_t max_det{400};
    std::vector<AreaRange> area_ranges = coco_area_ranges();
    std::size_t threads{1};

    static std::vector<double> coco_iou_thresholds();
    /// all, small (< 32^2), medium, large (> 96^2), by box area.
    static std::vector<AreaRange> coco_area_ranges();

    void validate() const;
};

struct MatchRecord {
    double score{0.0};
    bool true_positive{false};
};

inline constexpr std::size_t kRecallPoints = 101;

/// 101-point interpolated AP over records sorted by descending score.
/// nullopt when gt_count is 0.
std::optional<double> average_precision(std::span<const MatchRecord> records,
                                        std::size_t gt_count);

struct EvalResult {
    /// Mean of the per-threshold APs over area range "all"; 0 without ground truth.
    double mmap{0.0};
    bool has_ground_truth{false};
    std::vector<double> iou_thresholds;
    std::vector<double> ap_per_threshold;
    std::vector<double> recall_per_threshold;
    /// Recall averaged over thresholds, at max_det.
    double ar{0.0};
    /// Mean AP per named area range; nullopt when the range holds no ground truth.
    std::map<std::string, std::optional<double>> ap_by_area;
};

/// COCO-protocol single-class evaluation. Per image, detections are stably
/// sorted by score and truncated to max_det; each is matched to the unmatched
/// ground truth of highest IoU >= threshold (lowest index on ties).
/// Throws DataError when a detection names an image missing from `gt`.
EvalResult evaluate(const Dataset& gt, const DetectionSet& dets, const EvalConfig& cfg = {});

}  // namespace densekit
