#include "densekit/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "densekit/parallel.hpp"

namespace densekit {
namespace {

// Buckets ground-truth boxes on a uniform grid so each anchor only meets the
// boxes near it. Pairs that never overlap have IoU 0 and cannot change the
// assignment, so results equal the all-pairs computation.
class GtIndex {
public:
    GtIndex(std::span<const Box> gts, double cell) : gts_(gts), cell_(cell) {
        if (gts.empty()) {
            return;
        }
        min_x_ = gts[0].x1;
        min_y_ = gts[0].y1;
        double max_x = gts[0].x2;
        double max_y = gts[0].y2;
        for (const auto& g : gts) {
            min_x_ = std::min(min_x_, g.x1);
            min_y_ = std::min(min_y_, g.y1);
            max_x = std::max(max_x, g.x2);
            max_y = std::max(max_y, g.y2);
        }
        cols_ = static_cast<std::ptrdiff_t>(std::floor((max_x - min_x_) / cell_)) + 1;
        rows_ = static_cast<std::ptrdiff_t>(std::floor((max_y - min_y_) / cell_)) + 1;
        cells_.resize(static_cast<std::size_t>(cols_ * rows_));
        for (std::size_t g = 0; g < gts.size(); ++g) {
            const auto [c0, c1, r0, r1] = span_of(gts[g]);
            for (auto r = r0; r <= r1; ++r) {
                for (auto c = c0; c <= c1; ++c) {
                    cells_[static_cast<std::size_t>(r * cols_ + c)].push_back(g);
                }
            }
        }
        stamp_.assign(gts.size(), static_cast<std::size_t>(-1));
    }

    // Calls fn(g) once for every GT whose cell range meets `b`.
    template <typename Fn>
    void for_each_near(const Box& b, std::size_t query_id, Fn&& fn) {
        if (gts_.empty()) {
            return;
        }
        const auto [c0, c1, r0, r1] = span_of(b);
        for (auto r = r0; r <= r1; ++r) {
            for (auto c = c0; c <= c1; ++c) {
                for (const std::size_t g : cells_[static_cast<std::size_t>(r * cols_ + c)]) {
                    if (stamp_[g] != query_id) {
                        stamp_[g] = query_id;
                        fn(g);
                    }
                }
            }
        }
    }

private:
    struct Span {
        std::ptrdiff_t c0, c1, r0, r1;
    };

    [[nodiscard]] Span span_of(const Box& b) const {
        auto col = [&](double x) {
            return std::clamp<std::ptrdiff_t>(
                static_cast<std::ptrdiff_t>(std::floor((x - min_x_) / cell_)), 0, cols_ - 1);
        };
        auto row = [&](double y) {
            return std::clamp<std::ptrdiff_t>(
                static_cast<std::ptrdiff_t>(std::floor((y - min_y_) / cell_)), 0, rows_ - 1);
        };
        return {col(b.x1), col(b.x2), row(b.y1), row(b.y2)};
    }

    std::span<const Box> gts_;
    double cell_;
    double min_x_{0.0};
    double min_y_{0.0};
    std::ptrdiff_t cols_{0};
    std::ptrdiff_t rows_{0};
    std::vector<std::vector<std::size_t>> cells_;
    std::vector<std::size_t> stamp_;
};

}  // namespace

void AnchorConfig::validate() const {
    if (strides.empty() || ratios.empty()) {
        throw std::invalid_argument("anchors: strides and ratios must be non-empty");
    }
    for (std::size_t i = 0; i < strides.size(); ++i) {
        if (!(strides[i] > 0.0) || (i > 0 && !(strides[i] > strides[i - 1]))) {
            throw std::invalid_argument("anchors: strides must be positive and ascending");
        }
    }
    if (std::any_of(ratios.begin(), ratios.end(), [](double r) { return !(r > 0.0); })) {
        throw std::invalid_argument("anchors: ratios must be positive");
    }
    if (!(base_scale > 0.0)) {
        throw std::invalid_argument("anchors: base_scale must be positive");
    }
}

void AssignConfig::validate() const {
    if (!(neg_iou >= 0.0 && neg_iou <= pos_iou && pos_iou <= 1.0)) {
        throw std::invalid_argument("assign: require 0 <= neg_iou <= pos_iou <= 1");
    }
}

void SamplerConfig::validate() const {
    if (num < 1) {
        throw std::invalid_argument("sampler: num must be >= 1");
    }
    if (!(pos_fraction > 0.0 && pos_fraction <= 1.0)) {
        throw std::invalid_argument("sampler: pos_fraction must lie in (0, 1]");
    }
}

std::size_t Assignment::positives() const noexcept {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), SampleLabel::Positive));
}

std::size_t Assignment::negatives() const noexcept {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), SampleLabel::Negative));
}

std::size_t anchor_count(const ImageDims& dims, const AnchorConfig& cfg) {
    std::size_t n = 0;
    for (double s : cfg.strides) {
        const auto gx = static_cast<std::size_t>(std::ceil(dims.width() / s));
        const auto gy = static_cast<std::size_t>(std::ceil(dims.height() / s));
        n += gx * gy * cfg.ratios.size();
    }
    return n;
}

std::vector<Box> generate_anchors(const ImageDims& dims, const AnchorConfig& cfg) {
    cfg.validate();
    std::vector<Box> anchors;
    anchors.reserve(anchor_count(dims, cfg));
    for (double s : cfg.strides) {
        const auto gx = static_cast<std::size_t>(std::ceil(dims.width() / s));
        const auto gy = static_cast<std::size_t>(std::ceil(dims.height() / s));
        const double side = cfg.base_scale * s;
        std::vector<std::pair<double, double>> half_extents;
        for (double r : cfg.ratios) {
            const double root = std::sqrt(r);
            half_extents.emplace_back(side * root / 2.0, side / root / 2.0);
        }
        for (std::size_t j = 0; j < gy; ++j) {
            const double cy = (static_cast<double>(j) + 0.5) * s;
            for (std::size_t i = 0; i < gx; ++i) {
                const double cx = (static_cast<double>(i) + 0.5) * s;
                for (const auto& [hw, hh] : half_extents) {
                    anchors.push_back(Box{cx - hw, cy - hh, cx + hw, cy + hh});
                }
            }
        }
    }
    return anchors;
}

Assignment assign(std::span<const Box> anchors, std::span<const Box> gts, const AssignConfig& cfg) {
    cfg.validate();
    const std::size_t na = anchors.size();
    Assignment out;
    out.labels.assign(na, SampleLabel::Negative);
    out.matched_gt.assign(na, -1);
    out.max_iou.assign(na, 0.0);
    if (gts.empty()) {
        return out;
    }

    double mean_side = 0.0;
    for (const auto& g : gts) {
        mean_side += std::max(g.width(), g.height());
    }
    mean_side /= static_cast<double>(gts.size());
    GtIndex index(gts, std::max(mean_side, 1.0));

    std::vector<std::ptrdiff_t> argmax(na, -1);
    std::vector<double> gt_max(gts.size(), 0.0);
    for (std::size_t a = 0; a < na; ++a) {
        index.for_each_near(anchors[a], a, [&](std::size_t g) {
            const double v = iou(anchors[a], gts[g]);
            const auto gi = static_cast<std::ptrdiff_t>(g);
            if (v > out.max_iou[a] || (v == out.max_iou[a] && v > 0.0 && gi < argmax[a])) {
                out.max_iou[a] = v;
                argmax[a] = gi;
            }
            gt_max[g] = std::max(gt_max[g], v);
        });
    }

    for (std::size_t a = 0; a < na; ++a) {
        const double v = out.max_iou[a];
        if (v >= cfg.pos_iou && argmax[a] >= 0) {
            out.labels[a] = SampleLabel::Positive;
            out.matched_gt[a] = argmax[a];
        } else if (v < cfg.neg_iou) {
            out.labels[a] = SampleLabel::Negative;
        } else {
            out.labels[a] = SampleLabel::Ignore;
        }
    }

    if (cfg.match_low_quality) {
        // Later GTs overwrite earlier ones on anchors they share.
        for (std::size_t a = 0; a < na; ++a) {
            std::ptrdiff_t winner = -1;
            index.for_each_near(anchors[a], na + a, [&](std::size_t g) {
                if (gt_max[g] > 0.0 && iou(anchors[a], gts[g]) == gt_max[g]) {
                    winner = std::max(winner, static_cast<std::ptrdiff_t>(g));
                }
            });
            if (winner >= 0) {
                out.labels[a] = SampleLabel::Positive;
                out.matched_gt[a] = winner;
            }
        }
    }
    return out;
}

std::size_t count_positives(const ImageRecord& rec, double long_side, double short_side,
                            const AnchorConfig& anchor_cfg, const AssignConfig& assign_cfg) {
    const double f = rescale_factor(rec.dims, long_side, short_side);
    const ImageDims dims{rec.dims.width() * f, rec.dims.height() * f};
    std::vector<Box> gts;
    gts.reserve(rec.boxes.size());
    for (const auto& b : rec.boxes) {
        gts.push_back(scaled(b, f));
    }
    const auto anchors = generate_anchors(dims, anchor_cfg);
    return assign(anchors, gts, assign_cfg).positives();
}

PositiveCounts positive_histogram(const Dataset& d, double long_side, double short_side,
                                  const AnchorConfig& anchor_cfg, const AssignConfig& assign_cfg,
                                  double bin_width, std::size_t threads) {
    if (d.empty()) {
        throw std::invalid_argument("positive_histogram: dataset is empty");
    }
    anchor_cfg.validate();
    assign_cfg.validate();
    PositiveCounts pc;
    pc.per_image.resize(d.records.size());
    parallel_for(d.records.size(), threads, [&](std::size_t i) {
        pc.per_image[i] = count_positives(d.records[i], long_side, short_side, anchor_cfg, assign_cfg);
    });
    std::vector<double> values(pc.per_image.begin(), pc.per_image.end());
    pc.histogram = Histogram::with_bin_width(values, bin_width);
    return pc;
}

SampledIndices cap_sample(std::span<const SampleLabel> labels, const SamplerConfig& cfg, Rng& rng) {
    cfg.validate();
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == SampleLabel::Positive) {
            pos.push_back(i);
        } else if (labels[i] == SampleLabel::Negative) {
            neg.push_back(i);
        }
    }
    auto pick = [&rng](std::vector<std::size_t>& pool, std::size_t k) {
        if (pool.size() > k) {
            // Partial Fisher-Yates: the first k slots become a uniform k-subset.
            for (std::size_t i = 0; i < k; ++i) {
                const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
                std::swap(pool[i], pool[j]);
            }
            pool.resize(k);
        }
        std::sort(pool.begin(), pool.end());
    };
    const auto pos_cap =
        static_cast<std::size_t>(std::floor(static_cast<double>(cfg.num) * cfg.pos_fraction));
    pick(pos, pos_cap);
    pick(neg, cfg.num - pos.size());
    return {std::move(pos), std::move(neg)};
}

}  // namespace densekit
