#include "densekit/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "densekit/error.hpp"

namespace densekit {
namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

ordered_json xywh(const Box& b) { return ordered_json::array({b.x1, b.y1, b.width(), b.height()}); }

}  // namespace

DetectionSet parse_detections(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("malformed results document: ") + e.what());
    }
    if (!doc.is_array()) {
        throw DataError("results document must be a JSON array");
    }
    DetectionSet out;
    std::size_t n = 0;
    for (const auto& d : doc) {
        const std::string where = "result " + std::to_string(n++);
        if (!d.is_object()) {
            throw DataError(where + " is not an object");
        }
        const auto id = d.find("image_id");
        const auto bb = d.find("bbox");
        const auto sc = d.find("score");
        if (id == d.end() || !id->is_number_integer()) {
            throw DataError(where + " has no integer image_id");
        }
        if (bb == d.end() || !bb->is_array() || bb->size() != 4 ||
            !std::all_of(bb->begin(), bb->end(), [](const json& v) { return v.is_number(); })) {
            throw DataError(where + " has no [x, y, w, h] bbox");
        }
        if (sc == d.end() || !sc->is_number()) {
            throw DataError(where + " has no numeric score");
        }
        const double score = sc->get<double>();
        if (!(score >= 0.0 && score <= 1.0)) {
            throw DataError(where + " has a score outside [0, 1]");
        }
        const double w = (*bb)[2].get<double>();
        const double h = (*bb)[3].get<double>();
        const Box box = Box::from_xywh((*bb)[0].get<double>(), (*bb)[1].get<double>(), w, h);
        if (!is_valid(box)) {
            throw DataError(where + " has an invalid bbox");
        }
        out[id->get<ImageId>()].push_back(Detection{box, score});
    }
    return out;
}

DetectionSet load_detections(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open results file: " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_detections(ss.str());
}

std::string detections_to_json(const DetectionSet& dets) {
    ordered_json arr = ordered_json::array();
    for (const auto& [id, list] : dets) {
        for (const auto& d : list) {
            arr.push_back({{"image_id", id}, {"category_id", 1}, {"bbox", xywh(d.box)}, {"score", d.score}});
        }
    }
    return arr.dump() + "\n";
}

std::string cropped_to_json(std::span<const CroppedRecord> records) {
    ordered_json images = ordered_json::array();
    ordered_json annotations = ordered_json::array();
    std::int64_t ann_id = 1;
    for (const auto& r : records) {
        const Box& w = r.crop.window.window;
        images.push_back({{"id", r.image_id},
                          {"file_name", r.file_name},
                          {"width", w.width()},
                          {"height", w.height()},
                          {"crop",
                           {{"window", ordered_json::array({w.x1, w.y1, w.x2, w.y2})},
                            {"anchor", std::string(to_string(r.crop.window.anchor_label))},
                            {"dropped", r.crop.dropped_count}}}});
        for (const auto& b : r.crop.kept_boxes) {
            annotations.push_back({{"id", ann_id++},
                                   {"image_id", r.image_id},
                                   {"category_id", 1},
                                   {"bbox", xywh(b)},
                                   {"area", b.area()},
                                   {"iscrowd", 0}});
        }
    }
    ordered_json doc;
    doc["images"] = std::move(images);
    doc["annotations"] = std::move(annotations);
    doc["categories"] = ordered_json::array({{{"id", 1}, {"name", "object"}}});
    return doc.dump() + "\n";
}

std::string dataset_to_json(const Dataset& d) {
    ordered_json images = ordered_json::array();
    ordered_json annotations = ordered_json::array();
    std::int64_t ann_id = 1;
    for (const auto& r : d.records) {
        images.push_back({{"id", r.image_id},
                          {"file_name", r.file_name},
                          {"width", r.dims.width()},
                          {"height", r.dims.height()}});
        for (const auto& b : r.boxes) {
            annotations.push_back({{"id", ann_id++},
                                   {"image_id", r.image_id},
                                   {"category_id", 1},
                                   {"bbox", xywh(b)},
                                   {"area", b.area()},
                                   {"iscrowd", 0}});
        }
    }
    ordered_json doc;
    doc["images"] = std::move(images);
    doc["annotations"] = std::move(annotations);
    doc["categories"] = ordered_json::array({{{"id", 1}, {"name", "object"}}});
    return doc.dump() + "\n";
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
    out << "bin_edge,count,cumulative_ratio\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        out << format_number(h.bin_edges[i]) << ',' << h.counts[i] << ','
            << format_number(h.cumulative_ratio[i]) << '\n';
    }
}

Histogram parse_histogram_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != "bin_edge,count,cumulative_ratio") {
        throw DataError("histogram CSV: missing header");
    }
    Histogram h;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        double edge = 0.0;
        std::uint64_t count = 0;
        double ratio = 0.0;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        auto r1 = std::from_chars(p, end, edge);
        if (r1.ec != std::errc{} || r1.ptr == end || *r1.ptr != ',') {
            throw DataError("histogram CSV: bad row '" + line + "'");
        }
        auto r2 = std::from_chars(r1.ptr + 1, end, count);
        if (r2.ec != std::errc{} || r2.ptr == end || *r2.ptr != ',') {
            throw DataError("histogram CSV: bad row '" + line + "'");
        }
        auto r3 = std::from_chars(r2.ptr + 1, end, ratio);
        if (r3.ec != std::errc{} || r3.ptr != end) {
            throw DataError("histogram CSV: bad row '" + line + "'");
        }
        h.bin_edges.push_back(edge);
        h.counts.push_back(count);
        h.cumulative_ratio.push_back(ratio);
    }
    // The upper edge of the last bin is implied by the spacing of the others.
    if (h.bin_edges.size() >= 2) {
        const std::size_t n = h.bin_edges.size();
        h.bin_edges.push_back(h.bin_edges[n - 1] + (h.bin_edges[n - 1] - h.bin_edges[n - 2]));
    } else if (h.bin_edges.size() == 1) {
        throw DataError("histogram CSV: cannot infer the bin width from a single row");
    }
    return h;
}

}  // namespace densekit
