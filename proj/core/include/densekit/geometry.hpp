#pragma once

#include <optional>
#include <span>

namespace densekit {

/// Axis-aligned rectangle in continuous pixel coordinates, corner form.
/// (x1, y1) is the top-left corner; zero-area boxes are allowed.
struct Box {
    double x1{0.0};
    double y1{0.0};
    double x2{0.0};
    double y2{0.0};

    static Box from_xywh(double x, double y, double w, double h) noexcept {
        return Box{x, y, x + w, y + h};
    }

    [[nodiscard]] double width() const noexcept { return x2 - x1; }
    [[nodiscard]] double height() const noexcept { return y2 - y1; }
    [[nodiscard]] double area() const noexcept { return width() * height(); }

    [[nodiscard]] Box translated(double dx, double dy) const noexcept {
        return Box{x1 + dx, y1 + dy, x2 + dx, y2 + dy};
    }

    friend bool operator==(const Box&, const Box&) = default;
};

/// True when the coordinates are finite and x1 <= x2, y1 <= y2.
[[nodiscard]] bool is_valid(const Box& b) noexcept;

/// Image extent in pixels. Both sides must be positive.
class ImageDims {
public:
    ImageDims(double width, double height);

    [[nodiscard]] double width() const noexcept { return width_; }
    [[nodiscard]] double height() const noexcept { return height_; }
    [[nodiscard]] double area() const noexcept { return width_ * height_; }
    [[nodiscard]] Box bounds() const noexcept { return Box{0.0, 0.0, width_, height_}; }

    friend bool operator==(const ImageDims&, const ImageDims&) = default;

private:
    double width_;
    double height_;
};

/// Overlap rectangle of `a` and `b`, or nullopt when they do not meet.
/// Boxes that only touch along an edge yield a zero-area rectangle.
[[nodiscard]] std::optional<Box> intersect(const Box& a, const Box& b) noexcept;

/// Intersection over union. Defined as 0 when the union has zero area.
[[nodiscard]] double iou(const Box& a, const Box& b) noexcept;

/// sqrt(width * height).
[[nodiscard]] double box_scale(const Box& b) noexcept;

/// Aspect-preserving factor that fits an image inside a (long_side, short_side)
/// canvas: min(short_side / min(W, H), long_side / max(W, H)).
[[nodiscard]] double rescale_factor(const ImageDims& dims, double long_side, double short_side);

[[nodiscard]] Box scaled(const Box& b, double factor) noexcept;

/// Sum of box areas, ignoring overlap.
[[nodiscard]] double total_area(std::span<const Box> boxes) noexcept;

}  // namespace densekit
