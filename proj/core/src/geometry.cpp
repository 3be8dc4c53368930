#include "densekit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace densekit {

bool is_valid(const Box& b) noexcept {
    return std::isfinite(b.x1) && std::isfinite(b.y1) && std::isfinite(b.x2) &&
           std::isfinite(b.y2) && b.x1 <= b.x2 && b.y1 <= b.y2;
}

ImageDims::ImageDims(double width, double height) : width_(width), height_(height) {
    if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height)) {
        throw std::invalid_argument("image dimensions must be positive, got " +
                                    std::to_string(width) + "x" + std::to_string(height));
    }
}

std::optional<Box> intersect(const Box& a, const Box& b) noexcept {
    const Box r{std::max(a.x1, b.x1), std::max(a.y1, b.y1), std::min(a.x2, b.x2),
                std::min(a.y2, b.y2)};
    if (r.x1 > r.x2 || r.y1 > r.y2) {
        return std::nullopt;
    }
    return r;
}

double iou(const Box& a, const Box& b) noexcept {
    const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
    const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
    if (iw <= 0.0 || ih <= 0.0) {
        return 0.0;
    }
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) {
        return 0.0;
    }
    return std::clamp(inter / uni, 0.0, 1.0);
}

double box_scale(const Box& b) noexcept { return std::sqrt(b.width() * b.height()); }

double rescale_factor(const ImageDims& dims, double long_side, double short_side) {
    if (!(long_side > 0.0) || !(short_side > 0.0)) {
        throw std::invalid_argument("rescale target sides must be positive");
    }
    const double lo = std::min(dims.width(), dims.height());
    const double hi = std::max(dims.width(), dims.height());
    return std::min(short_side / lo, long_side / hi);
}

Box scaled(const Box& b, double factor) noexcept {
    return Box{b.x1 * factor, b.y1 * factor, b.x2 * factor, b.y2 * factor};
}

double total_area(std::span<const Box> boxes) noexcept {
    double sum = 0.0;
    for (const auto& b : boxes) {
        sum += b.area();
    }
    return sum;
}

}  // namespace densekit
