#include "densekit/nms.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace densekit {

void NmsConfig::validate() const {
    if (pre_topk < 1) {
        throw std::invalid_argument("nms: pre_topk must be >= 1");
    }
    if (!(score_threshold >= 0.0 && score_threshold <= 1.0)) {
        throw std::invalid_argument("nms: score_threshold must lie in [0, 1]");
    }
    if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0)) {
        throw std::invalid_argument("nms: iou_threshold must lie in [0, 1]");
    }
    if (max_out < 1) {
        throw std::invalid_argument("nms: max_out must be >= 1");
    }
}

std::vector<Detection> nms(std::span<const Detection> dets, const NmsConfig& cfg) {
    cfg.validate();

    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dets[a].score > dets[b].score;
    });
    if (order.size() > cfg.pre_topk) {
        order.resize(cfg.pre_topk);
    }
    // Sorted descending, so the survivors of the score filter are a prefix.
    const auto cut = std::find_if(order.begin(), order.end(), [&](std::size_t i) {
        return dets[i].score < cfg.score_threshold;
    });
    order.erase(cut, order.end());

    std::vector<Detection> kept;
    kept.reserve(std::min(order.size(), cfg.max_out));
    std::vector<char> suppressed(order.size(), 0);
    for (std::size_t k = 0; k < order.size() && kept.size() < cfg.max_out; ++k) {
        if (suppressed[k]) {
            continue;
        }
        const Box& a = dets[order[k]].box;
        kept.push_back(dets[order[k]]);
        for (std::size_t j = k + 1; j < order.size(); ++j) {
            if (!suppressed[j] && iou(a, dets[order[j]].box) > cfg.iou_threshold) {
                suppressed[j] = 1;
            }
        }
    }
    return kept;
}

}  // namespace densekit
