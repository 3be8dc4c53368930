#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "densekit/geometry.hpp"
#include "densekit/histogram.hpp"

namespace densekit {

using ImageId = std::int64_t;

struct ImageRecord {
    ImageId image_id{0};
    ImageDims dims{1.0, 1.0};
    std::vector<Box> boxes;
    std::string file_name;
};

struct Dataset {
    std::string split_name;
    std::vector<ImageRecord> records;

    [[nodiscard]] std::size_t annotation_count() const noexcept;
    [[nodiscard]] bool empty() const noexcept { return records.empty(); }
    /// Index into `records`, or -1 when the id is absent. Linear scan.
    [[nodiscard]] std::ptrdiff_t find(ImageId id) const noexcept;
};

/// What ingestion threw away, and why.
struct LoadReport {
    std::size_t images{0};
    std::size_t annotations_read{0};
    std::size_t annotations_kept{0};
    std::size_t dropped_non_positive{0};    // w <= 0 or h <= 0 (or non-finite)
    std::size_t dropped_missing_image{0};   // image_id not in `images`
    std::size_t dropped_outside_image{0};   // zero area after clamping to the image
    std::size_t clamped{0};                 // kept, but coordinates were clamped

    [[nodiscard]] std::size_t dropped() const noexcept {
        return dropped_non_positive + dropped_missing_image + dropped_outside_image;
    }
};

struct LoadedDataset {
    Dataset dataset;
    LoadReport report;
};

/// Parses a COCO-style annotation document (`images` + `annotations`, bbox as
/// [x, y, w, h]). Throws DataError on malformed input or a duplicated image id.
LoadedDataset parse_annotations(std::string_view json_text, std::string split_name = {});

/// Reads and parses a COCO-style annotation file; the split name is the file stem.
LoadedDataset load_annotations(const std::filesystem::path& path);

/// Reads the retail-shelf CSV layout
/// `image_name,x1,y1,x2,y2,class,image_width,image_height` (no header),
/// applying the same cleaning rules as the COCO reader. Image ids follow
/// first appearance.
LoadedDataset load_csv_annotations(const std::filesystem::path& path);

/// Per-image annotation-count statistics.
struct CountStats {
    std::size_t images{0};
    double mean{0.0};
    std::int64_t mean_rounded{0};
    std::size_t max{0};
    std::size_t min{0};
    std::size_t p995{0};
    std::size_t p005{0};
};

/// Nearest-rank percentile: the ceil(q * n)-th smallest value (1-based), q in (0, 1].
std::size_t nearest_rank(std::vector<std::size_t> values, double q);

/// Throws std::invalid_argument on an empty dataset.
CountStats count_stats(const Dataset& d);

/// sqrt(wh) of every box after rescaling its image to fit (long_side, short_side).
std::vector<double> rescaled_scales(const Dataset& d, double long_side, double short_side);

Histogram scale_histogram(const Dataset& d, double long_side, double short_side,
                          double bin_width = 8.0);

/// Fraction of boxes whose rescaled scale is strictly below `threshold`.
double small_object_fraction(const Dataset& d, double long_side, double short_side,
                             double threshold = 32.0);

}  // namespace densekit
