#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "densekit/geometry.hpp"
#include "densekit/rng.hpp"

namespace densekit {

/// Requested crop extent. Both sides positive.
class CropSize {
public:
    CropSize(double width, double height);

    [[nodiscard]] double width() const noexcept { return width_; }
    [[nodiscard]] double height() const noexcept { return height_; }

    /// Clamped so that it never exceeds the image.
    [[nodiscard]] CropSize fitted_to(const ImageDims& dims) const noexcept;

private:
    double width_;
    double height_;
};

enum class AnchorLabel {
    TopLeft,
    TopRight,
    BottomLeft,
    BottomRight,
    Center,
    ShortAxisA,  // top-center for landscape, left-center for portrait
    ShortAxisB,  // bottom-center for landscape, right-center for portrait
    Uniform,
};

[[nodiscard]] std::string_view to_string(AnchorLabel label) noexcept;

enum class CropStrategy { Uniform, Seven };

[[nodiscard]] CropStrategy parse_crop_strategy(std::string_view name);
[[nodiscard]] std::string_view to_string(CropStrategy s) noexcept;

struct CropWindow {
    Box window;
    AnchorLabel anchor_label{AnchorLabel::Uniform};
};

struct CropResult {
    CropWindow window;
    std::vector<Box> kept_boxes;  // window-local coordinates
    std::size_t dropped_count{0};
};

inline constexpr double kDefaultKeepIou = 0.3;

/// The seven fixed windows: four corners, center, and the two endpoints of
/// the image's short axis. Windows sit flush against the named extreme and
/// are centered along the other axis. Landscape rules apply when W == H.
std::array<CropWindow, 7> seven_crop_anchors(const ImageDims& dims, CropSize crop);

/// Uniform: top-left drawn uniformly from [0, W - cw] x [0, H - ch].
/// Seven: one of the seven anchors with probability 1/7 each.
CropWindow sample_crop(CropStrategy strategy, const ImageDims& dims, CropSize crop, Rng& rng);

/// Clips every box to the window and keeps it iff IoU(clipped, original) is
/// strictly greater than `keep_iou_threshold`. Kept boxes are translated into
/// window-local coordinates.
CropResult apply_crop(const CropWindow& window, std::span<const Box> boxes,
                      double keep_iou_threshold = kDefaultKeepIou);

}  // namespace densekit
