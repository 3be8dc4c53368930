#include "densekit/doe.hpp"

#include <algorithm>
#include <numeric>

#include "densekit/parallel.hpp"

namespace densekit {

bool OrthogonalArray::column_balanced() const {
    for (std::size_t f = 0; f < kL9Factors; ++f) {
        std::array<int, kL9Levels> seen{};
        for (const auto& row : runs) {
            if (row[f] < 0 || row[f] >= static_cast<int>(kL9Levels)) {
                return false;
            }
            ++seen[static_cast<std::size_t>(row[f])];
        }
        if (!std::all_of(seen.begin(), seen.end(), [](int c) { return c == 3; })) {
            return false;
        }
    }
    return true;
}

bool OrthogonalArray::pairwise_balanced() const {
    if (!column_balanced()) {
        return false;
    }
    for (std::size_t i = 0; i < kL9Factors; ++i) {
        for (std::size_t j = i + 1; j < kL9Factors; ++j) {
            std::array<int, kL9Levels * kL9Levels> seen{};
            for (const auto& row : runs) {
                ++seen[static_cast<std::size_t>(row[i]) * kL9Levels + static_cast<std::size_t>(row[j])];
            }
            if (!std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; })) {
                return false;
            }
        }
    }
    return true;
}

OrthogonalArray build_l9() {
    OrthogonalArray oa;
    std::size_t r = 0;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            oa.runs[r++] = {a, b, (a + b) % 3, (2 * a + b) % 3};
        }
    }
    return oa;
}

void FactorSpec::validate() const {
    if (levels[0] == levels[1] || levels[0] == levels[2] || levels[1] == levels[2]) {
        throw std::invalid_argument("factor '" + name + "' needs three distinct levels");
    }
}

ExperimentError::ExperimentError(std::size_t run_index, const std::string& what)
    : std::runtime_error("experiment run " + std::to_string(run_index) + " failed: " + what),
      run_index_(run_index) {}

FactorValues run_values(const OrthogonalArray& array,
                        const std::array<FactorSpec, kL9Factors>& factors, std::size_t run) {
    FactorValues v{};
    for (std::size_t f = 0; f < kL9Factors; ++f) {
        v[f] = factors[f].levels[static_cast<std::size_t>(array.level(run, f))];
    }
    return v;
}

std::vector<double> run_experiment(const OrthogonalArray& array,
                                   const std::array<FactorSpec, kL9Factors>& factors,
                                   const ResponseFn& respond, std::size_t threads) {
    for (const auto& f : factors) {
        f.validate();
    }
    std::vector<double> scores(kL9Runs);
    // Scores land by index; the failing run reported is the lowest one that threw.
    std::vector<std::string> errors(kL9Runs);
    std::vector<char> failed(kL9Runs, 0);
    parallel_for(kL9Runs, threads, [&](std::size_t run) {
        try {
            scores[run] = respond(run_values(array, factors, run));
        } catch (const std::exception& e) {
            failed[run] = 1;
            errors[run] = e.what();
        } catch (...) {
            failed[run] = 1;
            errors[run] = "unknown error";
        }
    });
    for (std::size_t run = 0; run < kL9Runs; ++run) {
        if (failed[run]) {
            throw ExperimentError(run, errors[run]);
        }
    }
    return scores;
}

AnorReport anor(const OrthogonalArray& array, const std::vector<double>& scores,
                const std::array<FactorSpec, kL9Factors>& factors, bool minimize) {
    if (scores.size() != kL9Runs) {
        throw std::invalid_argument("anor: expected 9 scores, got " + std::to_string(scores.size()));
    }
    AnorReport report;
    report.minimize = minimize;
    for (std::size_t f = 0; f < kL9Factors; ++f) {
        FactorAnalysis fa;
        fa.name = factors[f].name;
        std::array<double, kL9Levels> sums{};
        std::array<int, kL9Levels> counts{};
        for (std::size_t run = 0; run < kL9Runs; ++run) {
            const auto lvl = static_cast<std::size_t>(array.level(run, f));
            sums[lvl] += scores[run];
            ++counts[lvl];
        }
        for (std::size_t l = 0; l < kL9Levels; ++l) {
            fa.level_means[l] = counts[l] == 0 ? 0.0 : sums[l] / counts[l];
        }
        // min_element/max_element return the first extreme: lowest level wins ties.
        const auto lo = std::min_element(fa.level_means.begin(), fa.level_means.end());
        const auto hi = std::max_element(fa.level_means.begin(), fa.level_means.end());
        fa.range = *hi - *lo;
        const auto best = minimize ? lo : hi;
        fa.best_level = static_cast<int>(best - fa.level_means.begin());
        fa.best_value = factors[f].levels[static_cast<std::size_t>(fa.best_level)];
        report.recommended_levels[f] = fa.best_level;
        report.recommended_values[f] = fa.best_value;
        report.factors.push_back(std::move(fa));
    }
    report.ranking.resize(kL9Factors);
    std::iota(report.ranking.begin(), report.ranking.end(), std::size_t{0});
    std::stable_sort(report.ranking.begin(), report.ranking.end(), [&](std::size_t a, std::size_t b) {
        return report.factors[a].range > report.factors[b].range;
    });
    return report;
}

}  // namespace densekit
