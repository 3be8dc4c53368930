#include "densekit/evalmap.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "densekit/error.hpp"
#include "densekit/parallel.hpp"

namespace densekit {
namespace {

enum class Outcome : unsigned char { TruePositive, FalsePositive, Ignored };

// Per image, per area range, per threshold: outcome of each kept detection.
struct ImageEval {
    std::vector<double> scores;                           // kept dets, score order
    std::vector<std::vector<std::vector<Outcome>>> outcome;  // [range][threshold][det]
    std::vector<std::size_t> gt_counted;                   // [range] non-ignored GT
};

ImageEval evaluate_image(const ImageRecord& rec, const std::vector<Detection>* dets,
                         const EvalConfig& cfg) {
    ImageEval ev;
    std::vector<Detection> sorted;
    if (dets != nullptr) {
        sorted = *dets;
        std::stable_sort(sorted.begin(), sorted.end(),
                         [](const Detection& a, const Detection& b) { return a.score > b.score; });
        if (sorted.size() > cfg.max_det) {
            sorted.resize(cfg.max_det);
        }
    }
    const std::size_t nd = sorted.size();
    const std::size_t ng = rec.boxes.size();
    ev.scores.reserve(nd);
    for (const auto& d : sorted) {
        ev.scores.push_back(d.score);
    }

    std::vector<double> ious(nd * ng);
    for (std::size_t d = 0; d < nd; ++d) {
        for (std::size_t g = 0; g < ng; ++g) {
            ious[d * ng + g] = iou(sorted[d].box, rec.boxes[g]);
        }
    }

    const std::size_t nr = cfg.area_ranges.size();
    const std::size_t nt = cfg.iou_thresholds.size();
    ev.outcome.assign(nr, std::vector<std::vector<Outcome>>(nt, std::vector<Outcome>(nd)));
    ev.gt_counted.assign(nr, 0);

    for (std::size_t r = 0; r < nr; ++r) {
        const auto& range = cfg.area_ranges[r];
        auto outside = [&](const Box& b) { return b.area() < range.lo || b.area() > range.hi; };

        // Non-ignored ground truth first; matching prefers it.
        std::vector<std::size_t> gt_order(ng);
        std::iota(gt_order.begin(), gt_order.end(), std::size_t{0});
        std::vector<char> gt_ignore(ng);
        for (std::size_t g = 0; g < ng; ++g) {
            gt_ignore[g] = outside(rec.boxes[g]) ? 1 : 0;
        }
        std::stable_partition(gt_order.begin(), gt_order.end(),
                              [&](std::size_t g) { return gt_ignore[g] == 0; });
        ev.gt_counted[r] = static_cast<std::size_t>(std::count(gt_ignore.begin(), gt_ignore.end(), 0));

        for (std::size_t t = 0; t < nt; ++t) {
            const double thr = std::min(cfg.iou_thresholds[t], 1.0 - 1e-10);
            std::vector<char> gt_taken(ng, 0);
            for (std::size_t d = 0; d < nd; ++d) {
                double best_iou = thr;
                std::ptrdiff_t best = -1;
                for (const std::size_t g : gt_order) {
                    if (gt_taken[g]) {
                        continue;
                    }
                    if (best >= 0 && gt_ignore[static_cast<std::size_t>(best)] == 0 && gt_ignore[g]) {
                        break;
                    }
                    const double v = ious[d * ng + g];
                    if (v < best_iou || (best >= 0 && v == best_iou)) {
                        continue;
                    }
                    best_iou = v;
                    best = static_cast<std::ptrdiff_t>(g);
                }
                Outcome o;
                if (best >= 0) {
                    gt_taken[static_cast<std::size_t>(best)] = 1;
                    o = gt_ignore[static_cast<std::size_t>(best)] ? Outcome::Ignored
                                                                  : Outcome::TruePositive;
                } else {
                    o = outside(sorted[d].box) ? Outcome::Ignored : Outcome::FalsePositive;
                }
                ev.outcome[r][t][d] = o;
            }
        }
    }
    return ev;
}

struct ThresholdSummary {
    std::optional<double> ap;
    std::optional<double> recall;
};

ThresholdSummary accumulate(const std::vector<ImageEval>& images, std::size_t range,
                            std::size_t thr) {
    std::size_t gt_count = 0;
    std::vector<MatchRecord> records;
    for (const auto& ev : images) {
        gt_count += ev.gt_counted[range];
        const auto& out = ev.outcome[range][thr];
        for (std::size_t d = 0; d < out.size(); ++d) {
            if (out[d] != Outcome::Ignored) {
                records.push_back({ev.scores[d], out[d] == Outcome::TruePositive});
            }
        }
    }
    if (gt_count == 0) {
        return {};
    }
    std::stable_sort(records.begin(), records.end(),
                     [](const MatchRecord& a, const MatchRecord& b) { return a.score > b.score; });
    const auto tp = static_cast<std::size_t>(std::count_if(
        records.begin(), records.end(), [](const MatchRecord& m) { return m.true_positive; }));
    return {average_precision(records, gt_count),
            static_cast<double>(tp) / static_cast<double>(gt_count)};
}

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::vector<double> EvalConfig::coco_iou_thresholds() {
    std::vector<double> t;
    for (int i = 0; i < 10; ++i) {
        t.push_back(static_cast<double>(50 + 5 * i) / 100.0);
    }
    return t;
}

std::vector<AreaRange> EvalConfig::coco_area_ranges() {
    return {{"all", 0.0, 1e10},
            {"small", 0.0, 32.0 * 32.0},
            {"medium", 32.0 * 32.0, 96.0 * 96.0},
            {"large", 96.0 * 96.0, 1e10}};
}

void EvalConfig::validate() const {
    if (iou_thresholds.empty()) {
        throw std::invalid_argument("eval: at least one IoU threshold required");
    }
    for (std::size_t i = 0; i < iou_thresholds.size(); ++i) {
        const double t = iou_thresholds[i];
        if (!(t > 0.0 && t <= 1.0) || (i > 0 && !(t > iou_thresholds[i - 1]))) {
            throw std::invalid_argument("eval: IoU thresholds must be strictly increasing in (0, 1]");
        }
    }
    if (max_det < 1) {
        throw std::invalid_argument("eval: max_det must be >= 1");
    }
    if (area_ranges.empty() || area_ranges.front().name != "all") {
        throw std::invalid_argument("eval: the first area range must be 'all'");
    }
}

std::optional<double> average_precision(std::span<const MatchRecord> records,
                                        std::size_t gt_count) {
    if (gt_count == 0) {
        return std::nullopt;
    }
    const std::size_t n = records.size();
    if (n == 0) {
        return 0.0;
    }
    std::vector<double> recall(n);
    std::vector<double> precision(n);
    std::size_t tp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (records[i].true_positive) {
            ++tp;
        }
        recall[i] = static_cast<double>(tp) / static_cast<double>(gt_count);
        precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    }
    for (std::size_t i = n - 1; i > 0; --i) {
        precision[i - 1] = std::max(precision[i - 1], precision[i]);
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < kRecallPoints; ++k) {
        const double r = static_cast<double>(k) / 100.0;
        const auto it = std::lower_bound(recall.begin(), recall.end(), r);
        if (it != recall.end()) {
            sum += precision[static_cast<std::size_t>(it - recall.begin())];
        }
    }
    return sum / static_cast<double>(kRecallPoints);
}

EvalResult evaluate(const Dataset& gt, const DetectionSet& dets, const EvalConfig& cfg) {
    cfg.validate();
    std::unordered_map<ImageId, std::size_t> index;
    for (std::size_t i = 0; i < gt.records.size(); ++i) {
        index.emplace(gt.records[i].image_id, i);
    }
    for (const auto& [id, list] : dets) {
        if (!index.contains(id)) {
            throw DataError("detection references unknown image_id " + std::to_string(id));
        }
    }

    std::vector<ImageEval> images(gt.records.size());
    parallel_for(gt.records.size(), cfg.threads, [&](std::size_t i) {
        const auto& rec = gt.records[i];
        const auto it = dets.find(rec.image_id);
        images[i] = evaluate_image(rec, it == dets.end() ? nullptr : &it->second, cfg);
    });

    EvalResult res;
    res.iou_thresholds = cfg.iou_thresholds;
    const std::size_t nt = cfg.iou_thresholds.size();
    for (std::size_t r = 0; r < cfg.area_ranges.size(); ++r) {
        std::vector<double> aps;
        std::vector<double> recalls;
        for (std::size_t t = 0; t < nt; ++t) {
            const auto s = accumulate(images, r, t);
            if (s.ap) {
                aps.push_back(*s.ap);
                recalls.push_back(*s.recall);
            }
        }
        res.ap_by_area[cfg.area_ranges[r].name] =
            aps.empty() ? std::nullopt : std::optional<double>(mean_of(aps));
        if (r == 0) {
            res.has_ground_truth = !aps.empty();
            res.ap_per_threshold = aps.empty() ? std::vector<double>(nt, 0.0) : aps;
            res.recall_per_threshold = recalls.empty() ? std::vector<double>(nt, 0.0) : recalls;
            res.mmap = mean_of(aps);
            res.ar = mean_of(recalls);
        }
    }
    return res;
}

}  // namespace densekit
