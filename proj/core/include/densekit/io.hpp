#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "densekit/augment.hpp"
#include "densekit/dataset.hpp"
#include "densekit/evalmap.hpp"
#include "densekit/histogram.hpp"

namespace densekit {

/// Parses a COCO results document: a JSON array of
/// {"image_id", "bbox": [x, y, w, h], "score"} objects (category_id ignored).
/// Throws DataError on malformed entries or scores outside [0, 1].
DetectionSet parse_detections(std::string_view json_text);
DetectionSet load_detections(const std::filesystem::path& path);

/// COCO results document for `dets`, ordered by image id then list order.
std::string detections_to_json(const DetectionSet& dets);

/// A cropped image: its source record id, the window, and window-local boxes.
struct CroppedRecord {
    ImageId image_id{0};
    std::string file_name;
    CropResult crop;
};

/// COCO-style annotation document for cropped records; each image carries its
/// crop size as width/height and a "crop" object with the window and anchor.
std::string cropped_to_json(std::span<const CroppedRecord> records);

/// COCO-style annotation document for a dataset (boxes written as [x, y, w, h]).
std::string dataset_to_json(const Dataset& d);

/// Shortest round-trip decimal form.
std::string format_number(double v);

/// CSV with header `bin_edge,count,cumulative_ratio`; one row per bin, keyed by its lower edge.
void write_histogram_csv(std::ostream& out, const Histogram& h);

/// Parses the CSV written by write_histogram_csv. Throws DataError on bad input.
Histogram parse_histogram_csv(std::string_view text);

}  // namespace densekit
