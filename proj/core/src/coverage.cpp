#include "densekit/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "densekit/parallel.hpp"
#include "densekit/rng.hpp"

namespace densekit {
namespace {

// Covered length over elementary y-intervals [ys[i], ys[i+1]).
class CoverTree {
public:
    explicit CoverTree(std::vector<double> ys)
        : ys_(std::move(ys)), cover_(4 * ys_.size()), length_(4 * ys_.size()) {}

    void update(double lo, double hi, int delta) {
        const auto l = static_cast<std::size_t>(
            std::lower_bound(ys_.begin(), ys_.end(), lo) - ys_.begin());
        const auto r = static_cast<std::size_t>(
            std::lower_bound(ys_.begin(), ys_.end(), hi) - ys_.begin());
        if (l < r) {
            update(1, 0, ys_.size() - 1, l, r, delta);
        }
    }

    [[nodiscard]] double covered() const { return length_[1]; }

private:
    // Node spans elementary intervals [node_lo, node_hi).
    void update(std::size_t node, std::size_t node_lo, std::size_t node_hi, std::size_t l,
                std::size_t r, int delta) {
        if (r <= node_lo || node_hi <= l) {
            return;
        }
        if (l <= node_lo && node_hi <= r) {
            cover_[node] += delta;
        } else {
            const std::size_t mid = (node_lo + node_hi) / 2;
            update(2 * node, node_lo, mid, l, r, delta);
            update(2 * node + 1, mid, node_hi, l, r, delta);
        }
        if (cover_[node] > 0) {
            length_[node] = ys_[node_hi] - ys_[node_lo];
        } else if (node_hi - node_lo == 1) {
            length_[node] = 0.0;
        } else {
            length_[node] = length_[2 * node] + length_[2 * node + 1];
        }
    }

    std::vector<double> ys_;
    std::vector<int> cover_;
    std::vector<double> length_;
};

struct Edge {
    double x;
    double y1;
    double y2;
    int delta;
};

}  // namespace

double union_area(std::span<const Box> boxes) {
    std::vector<Box> rects;
    rects.reserve(boxes.size());
    for (const auto& b : boxes) {
        if (b.width() > 0.0 && b.height() > 0.0) {
            rects.push_back(b);
        }
    }
    // Repeated windows are common in crop simulations; they add nothing.
    std::sort(rects.begin(), rects.end(), [](const Box& a, const Box& b) {
        return std::tie(a.x1, a.y1, a.x2, a.y2) < std::tie(b.x1, b.y1, b.x2, b.y2);
    });
    rects.erase(std::unique(rects.begin(), rects.end()), rects.end());
    if (rects.empty()) {
        return 0.0;
    }
    if (rects.size() == 1) {
        return rects.front().area();
    }

    std::vector<double> ys;
    ys.reserve(2 * rects.size());
    std::vector<Edge> edges;
    edges.reserve(2 * rects.size());
    for (const auto& r : rects) {
        ys.push_back(r.y1);
        ys.push_back(r.y2);
        edges.push_back({r.x1, r.y1, r.y2, +1});
        edges.push_back({r.x2, r.y1, r.y2, -1});
    }
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.x < b.x; });

    CoverTree tree(std::move(ys));
    double area = 0.0;
    double prev_x = edges.front().x;
    for (const auto& e : edges) {
        area += tree.covered() * (e.x - prev_x);
        tree.update(e.y1, e.y2, e.delta);
        prev_x = e.x;
    }
    return area;
}

double trial_coverage(const ImageDims& dims, CropSize crop, const CoverageConfig& cfg,
                      std::size_t trial_index) {
    Rng rng = Rng::stream(cfg.seed, trial_index);
    std::vector<Box> windows;
    windows.reserve(cfg.epochs);
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        windows.push_back(sample_crop(cfg.strategy, dims, crop, rng).window);
    }
    return std::min(1.0, union_area(windows) / dims.area());
}

CoverageDistribution simulate_coverage(const ImageDims& dims, CropSize crop,
                                       const CoverageConfig& cfg) {
    if (cfg.epochs < 1 || cfg.trials < 1) {
        throw std::invalid_argument("simulate_coverage: epochs and trials must be >= 1");
    }
    CoverageDistribution dist;
    dist.samples.resize(cfg.trials);
    parallel_for(cfg.trials, cfg.threads,
                 [&](std::size_t t) { dist.samples[t] = trial_coverage(dims, crop, cfg, t); });

    const double n = static_cast<double>(cfg.trials);
    dist.mean = std::accumulate(dist.samples.begin(), dist.samples.end(), 0.0) / n;
    if (cfg.trials > 1) {
        double ss = 0.0;
        for (double s : dist.samples) {
            ss += (s - dist.mean) * (s - dist.mean);
        }
        dist.stddev = std::sqrt(ss / (n - 1.0));
    }
    dist.histogram = Histogram::with_range(dist.samples, 0.0, 1.0, cfg.histogram_bins);
    return dist;
}

}  // namespace densekit
