#include "densekit/augment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace densekit {

CropSize::CropSize(double width, double height) : width_(width), height_(height) {
    if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height)) {
        throw std::invalid_argument("crop dimensions must be positive");
    }
}

CropSize CropSize::fitted_to(const ImageDims& dims) const noexcept {
    CropSize c = *this;
    c.width_ = std::min(width_, dims.width());
    c.height_ = std::min(height_, dims.height());
    return c;
}

std::string_view to_string(AnchorLabel label) noexcept {
    switch (label) {
        case AnchorLabel::TopLeft: return "TL";
        case AnchorLabel::TopRight: return "TR";
        case AnchorLabel::BottomLeft: return "BL";
        case AnchorLabel::BottomRight: return "BR";
        case AnchorLabel::Center: return "CENTER";
        case AnchorLabel::ShortAxisA: return "SHORT_A";
        case AnchorLabel::ShortAxisB: return "SHORT_B";
        case AnchorLabel::Uniform: return "UNIFORM";
    }
    return "UNIFORM";
}

CropStrategy parse_crop_strategy(std::string_view name) {
    if (name == "uniform") {
        return CropStrategy::Uniform;
    }
    if (name == "seven") {
        return CropStrategy::Seven;
    }
    throw std::invalid_argument("unknown crop strategy '" + std::string(name) +
                                "' (expected uniform|seven)");
}

std::string_view to_string(CropStrategy s) noexcept {
    return s == CropStrategy::Seven ? "seven" : "uniform";
}

std::array<CropWindow, 7> seven_crop_anchors(const ImageDims& dims, CropSize crop) {
    const CropSize c = crop.fitted_to(dims);
    const double cw = c.width();
    const double ch = c.height();
    const double right = dims.width() - cw;
    const double bottom = dims.height() - ch;
    const double mid_x = right / 2.0;
    const double mid_y = bottom / 2.0;

    auto at = [&](double x0, double y0, AnchorLabel label) {
        return CropWindow{Box{x0, y0, std::min(x0 + cw, dims.width()), std::min(y0 + ch, dims.height())},
                          label};
    };

    const bool landscape = dims.width() >= dims.height();
    return {
        at(0.0, 0.0, AnchorLabel::TopLeft),
        at(right, 0.0, AnchorLabel::TopRight),
        at(0.0, bottom, AnchorLabel::BottomLeft),
        at(right, bottom, AnchorLabel::BottomRight),
        at(mid_x, mid_y, AnchorLabel::Center),
        landscape ? at(mid_x, 0.0, AnchorLabel::ShortAxisA) : at(0.0, mid_y, AnchorLabel::ShortAxisA),
        landscape ? at(mid_x, bottom, AnchorLabel::ShortAxisB)
                  : at(right, mid_y, AnchorLabel::ShortAxisB),
    };
}

CropWindow sample_crop(CropStrategy strategy, const ImageDims& dims, CropSize crop, Rng& rng) {
    if (strategy == CropStrategy::Seven) {
        const auto anchors = seven_crop_anchors(dims, crop);
        return anchors[rng.below(anchors.size())];
    }
    const CropSize c = crop.fitted_to(dims);
    const double x0 = rng.uniform(0.0, dims.width() - c.width());
    const double y0 = rng.uniform(0.0, dims.height() - c.height());
    return CropWindow{Box{x0, y0, std::min(x0 + c.width(), dims.width()),
                          std::min(y0 + c.height(), dims.height())},
                      AnchorLabel::Uniform};
}

CropResult apply_crop(const CropWindow& window, std::span<const Box> boxes,
                      double keep_iou_threshold) {
    if (!(keep_iou_threshold >= 0.0 && keep_iou_threshold <= 1.0)) {
        throw std::invalid_argument("keep_iou_threshold must lie in [0, 1]");
    }
    CropResult result{window, {}, 0};
    const Box& w = window.window;
    for (const auto& b : boxes) {
        const auto clipped = intersect(b, w);
        if (clipped && iou(*clipped, b) > keep_iou_threshold) {
            result.kept_boxes.push_back(clipped->translated(-w.x1, -w.y1));
        } else {
            ++result.dropped_count;
        }
    }
    return result;
}

}  // namespace densekit
