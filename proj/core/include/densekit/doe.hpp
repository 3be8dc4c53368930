#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace densekit {

inline constexpr std::size_t kL9Runs = 9;
inline constexpr std::size_t kL9Factors = 4;
inline constexpr std::size_t kL9Levels = 3;

/// A 9-run, 4-factor, 3-level orthogonal array of level indices.
struct OrthogonalArray {
    std::array<std::array<int, kL9Factors>, kL9Runs> runs{};

    [[nodiscard]] int level(std::size_t run, std::size_t factor) const {
        return runs.at(run).at(factor);
    }
    /// Each column holds every level exactly three times.
    [[nodiscard]] bool column_balanced() const;
    /// Every pair of columns holds each of the nine level pairs exactly once.
    [[nodiscard]] bool pairwise_balanced() const;
};

/// Canonical L9(3^4): rows (a, b) for a, b in {0,1,2} with columns
/// (a, b, a + b, 2a + b) mod 3. Row 0 is all zeros; the layout matches the
/// standard Taguchi table.
OrthogonalArray build_l9();

struct FactorSpec {
    std::string name;
    std::array<double, kL9Levels> levels{};

    /// Throws std::invalid_argument unless the three levels are distinct.
    void validate() const;
};

using FactorValues = std::array<double, kL9Factors>;
using ResponseFn = std::function<double(const FactorValues&)>;

/// Raised when the response function fails; carries the failing run.
class ExperimentError : public std::runtime_error {
public:
    ExperimentError(std::size_t run_index, const std::string& what);
    [[nodiscard]] std::size_t run_index() const noexcept { return run_index_; }

private:
    std::size_t run_index_;
};

/// Concrete factor values for one run.
FactorValues run_values(const OrthogonalArray& array, const std::array<FactorSpec, kL9Factors>& factors,
                        std::size_t run);

/// Evaluates `respond` on each run in run order. With threads > 1 the runs
/// execute concurrently, so `respond` must then be free of side effects.
std::vector<double> run_experiment(const OrthogonalArray& array,
                                   const std::array<FactorSpec, kL9Factors>& factors,
                                   const ResponseFn& respond, std::size_t threads = 1);

struct FactorAnalysis {
    std::string name;
    std::array<double, kL9Levels> level_means{};
    double range{0.0};
    int best_level{0};
    double best_value{0.0};
};

/// Analysis of range over an L9 experiment.
struct AnorReport {
    std::vector<FactorAnalysis> factors;   // in supplied order
    std::vector<std::size_t> ranking;      // factor indices by descending range
    std::array<int, kL9Factors> recommended_levels{};
    FactorValues recommended_values{};
    bool minimize{false};
};

/// Level means, ranges, and the best level per factor (max mean, or min when
/// `minimize`; ties go to the lowest level index). Ranking ties keep factor order.
AnorReport anor(const OrthogonalArray& array, const std::vector<double>& scores,
                const std::array<FactorSpec, kL9Factors>& factors, bool minimize = false);

}  // namespace densekit
