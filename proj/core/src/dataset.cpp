#include "densekit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "densekit/error.hpp"

namespace densekit {
namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open annotation file: " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double number_field(const json& obj, const char* key, std::string_view what) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) {
        throw DataError(std::string(what) + " is missing numeric field '" + key + "'");
    }
    return it->get<double>();
}

ImageId id_field(const json& obj, const char* key, std::string_view what) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_number_integer()) {
        throw DataError(std::string(what) + " is missing integer field '" + key + "'");
    }
    return it->get<ImageId>();
}

// Builds records and applies the cleaning rules shared by every reader.
class Builder {
public:
    void add_image(ImageId id, double w, double h, std::string file_name) {
        if (!(w > 0.0) || !(h > 0.0) || !std::isfinite(w) || !std::isfinite(h)) {
            throw DataError("image " + std::to_string(id) + " has non-positive dimensions");
        }
        if (!index_.emplace(id, records_.size()).second) {
            throw DataError("duplicate image_id " + std::to_string(id));
        }
        records_.push_back(ImageRecord{id, ImageDims{w, h}, {}, std::move(file_name)});
        ++report_.images;
    }

    [[nodiscard]] bool has_image(ImageId id) const { return index_.contains(id); }

    void add_box(ImageId id, double x, double y, double w, double h) {
        ++report_.annotations_read;
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(w) || !std::isfinite(h) ||
            w <= 0.0 || h <= 0.0) {
            ++report_.dropped_non_positive;
            return;
        }
        const auto it = index_.find(id);
        if (it == index_.end()) {
            ++report_.dropped_missing_image;
            return;
        }
        auto& rec = records_[it->second];
        const Box raw = Box::from_xywh(x, y, w, h);
        const Box clamped{std::clamp(raw.x1, 0.0, rec.dims.width()),
                          std::clamp(raw.y1, 0.0, rec.dims.height()),
                          std::clamp(raw.x2, 0.0, rec.dims.width()),
                          std::clamp(raw.y2, 0.0, rec.dims.height())};
        if (!(clamped.area() > 0.0)) {
            ++report_.dropped_outside_image;
            return;
        }
        if (!(clamped == raw)) {
            ++report_.clamped;
        }
        rec.boxes.push_back(clamped);
        ++report_.annotations_kept;
    }

    LoadedDataset finish(std::string split_name) && {
        return LoadedDataset{Dataset{std::move(split_name), std::move(records_)}, report_};
    }

private:
    std::vector<ImageRecord> records_;
    std::unordered_map<ImageId, std::size_t> index_;
    LoadReport report_;
};

}  // namespace

std::size_t Dataset::annotation_count() const noexcept {
    std::size_t n = 0;
    for (const auto& r : records) {
        n += r.boxes.size();
    }
    return n;
}

std::ptrdiff_t Dataset::find(ImageId id) const noexcept {
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].image_id == id) {
            return static_cast<std::ptrdiff_t>(i);
        }
    }
    return -1;
}

LoadedDataset parse_annotations(std::string_view json_text, std::string split_name) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("malformed annotation document: ") + e.what());
    }
    if (!doc.is_object()) {
        throw DataError("annotation document must be a JSON object");
    }

    Builder builder;
    if (const auto it = doc.find("images"); it != doc.end()) {
        if (!it->is_array()) {
            throw DataError("'images' must be an array");
        }
        for (const auto& img : *it) {
            if (!img.is_object()) {
                throw DataError("image entry must be an object");
            }
            std::string file_name;
            if (const auto fn = img.find("file_name"); fn != img.end() && fn->is_string()) {
                file_name = fn->get<std::string>();
            }
            builder.add_image(id_field(img, "id", "image"), number_field(img, "width", "image"),
                              number_field(img, "height", "image"), std::move(file_name));
        }
    }
    if (const auto it = doc.find("annotations"); it != doc.end()) {
        if (!it->is_array()) {
            throw DataError("'annotations' must be an array");
        }
        for (const auto& ann : *it) {
            if (!ann.is_object()) {
                throw DataError("annotation entry must be an object");
            }
            const ImageId id = id_field(ann, "image_id", "annotation");
            const auto bb = ann.find("bbox");
            if (bb == ann.end() || !bb->is_array() || bb->size() != 4 ||
                !std::all_of(bb->begin(), bb->end(), [](const json& v) { return v.is_number(); })) {
                throw DataError("annotation for image " + std::to_string(id) +
                                " has no [x, y, w, h] bbox");
            }
            builder.add_box(id, (*bb)[0].get<double>(), (*bb)[1].get<double>(),
                            (*bb)[2].get<double>(), (*bb)[3].get<double>());
        }
    }
    return std::move(builder).finish(std::move(split_name));
}

LoadedDataset load_annotations(const std::filesystem::path& path) {
    return parse_annotations(read_file(path), path.stem().string());
}

LoadedDataset load_csv_annotations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open annotation file: " + path.string());
    }
    Builder builder;
    std::unordered_map<std::string, ImageId> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cols;
        std::stringstream ss(line);
        for (std::string col; std::getline(ss, col, ',');) {
            cols.push_back(col);
        }
        if (cols.size() != 8) {
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": expected 8 columns, got " + std::to_string(cols.size()));
        }
        double v[7];
        try {
            for (int i = 0; i < 4; ++i) {
                v[i] = std::stod(cols[static_cast<std::size_t>(i) + 1]);
            }
            v[4] = std::stod(cols[6]);
            v[5] = std::stod(cols[7]);
        } catch (const std::exception&) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": non-numeric field");
        }
        auto [it, inserted] = ids.emplace(cols[0], static_cast<ImageId>(ids.size()));
        if (inserted) {
            builder.add_image(it->second, v[4], v[5], cols[0]);
        }
        builder.add_box(it->second, v[0], v[1], v[2] - v[0], v[3] - v[1]);
    }
    return std::move(builder).finish(path.stem().string());
}

std::size_t nearest_rank(std::vector<std::size_t> values, double q) {
    if (values.empty()) {
        throw std::invalid_argument("percentile of an empty sample");
    }
    if (!(q > 0.0) || q > 1.0) {
        throw std::invalid_argument("percentile must lie in (0, 1]");
    }
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    // The epsilon stops q * n from rounding just above an integer (0.995 * 200).
    auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

CountStats count_stats(const Dataset& d) {
    if (d.empty()) {
        throw std::invalid_argument("count_stats: dataset is empty");
    }
    std::vector<std::size_t> counts;
    counts.reserve(d.records.size());
    std::size_t total = 0;
    for (const auto& r : d.records) {
        counts.push_back(r.boxes.size());
        total += r.boxes.size();
    }
    CountStats s;
    s.images = counts.size();
    s.mean = static_cast<double>(total) / static_cast<double>(counts.size());
    s.mean_rounded = std::llround(s.mean);
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    s.min = *lo;
    s.max = *hi;
    s.p995 = nearest_rank(counts, 0.995);
    s.p005 = nearest_rank(counts, 0.005);
    return s;
}

std::vector<double> rescaled_scales(const Dataset& d, double long_side, double short_side) {
    std::vector<double> scales;
    scales.reserve(d.annotation_count());
    for (const auto& r : d.records) {
        const double f = rescale_factor(r.dims, long_side, short_side);
        for (const auto& b : r.boxes) {
            scales.push_back(box_scale(b) * f);
        }
    }
    return scales;
}

Histogram scale_histogram(const Dataset& d, double long_side, double short_side,
                          double bin_width) {
    if (d.empty()) {
        throw std::invalid_argument("scale_histogram: dataset is empty");
    }
    const auto scales = rescaled_scales(d, long_side, short_side);
    return Histogram::with_bin_width(scales, bin_width);
}

double small_object_fraction(const Dataset& d, double long_side, double short_side,
                             double threshold) {
    if (d.empty()) {
        throw std::invalid_argument("small_object_fraction: dataset is empty");
    }
    if (!(threshold > 0.0)) {
        throw std::invalid_argument("small_object_fraction: threshold must be positive");
    }
    const auto scales = rescaled_scales(d, long_side, short_side);
    if (scales.empty()) {
        return 0.0;
    }
    const auto small = std::count_if(scales.begin(), scales.end(),
                                     [threshold](double s) { return s < threshold; });
    return static_cast<double>(small) / static_cast<double>(scales.size());
}

}  // namespace densekit
