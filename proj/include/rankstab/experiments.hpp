#pragma once

#include "rankstab/hierarchy.hpp"
#include "rankstab/measures.hpp"
#include "rankstab/ranking.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rankstab {

/// A benchmarking procedure minus its error measure: the dataset, the
/// competing methods and the reference order used for Top-K subsets.
struct Benchmark {
    HierarchicalDataset dataset;
    std::optional<PriceTable> prices;
    std::vector<ForecastSet> forecasts;
    ReferenceRanking reference;
    std::size_t price_window = 28;
    EvaluationOptions evaluation;

    std::size_t num_methods() const noexcept { return forecasts.size(); }
    /// Reference, or manifest order when no reference was given.
    ReferenceRanking effective_reference() const;
    /// Price weights of `data` (which may be a half of `dataset`), if prices are known.
    std::optional<PriceWeights> weights_for(const HierarchicalDataset& data) const;
};

using Splitter = std::function<std::pair<HierarchicalDataset, HierarchicalDataset>(const HierarchicalDataset&,
                                                                                  std::uint64_t)>;

struct SplitOptions {
    std::size_t n_splits = 76;
    std::uint64_t seed = 0;
    /// Subset sizes; empty means all methods.
    std::vector<std::size_t> top_ks;
    unsigned threads = 1;
    /// Defaults to split_bottom_half.
    Splitter splitter;
};

/// Per-half ZeroScale exclusion counts of one split.
struct SplitDiagnostics {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    std::array<ExclusionCounts, 2> exclusions{};
    std::array<std::size_t, 2> missing_prices{};
    /// Measure name -> reason, for measures that could not be scored on this split.
    std::map<std::string, std::string> failures;
};

struct StabilityCell {
    std::string measure;
    std::size_t top_k = 0;
    std::vector<std::optional<double>> per_split;
    /// Mean over non-degenerate splits; empty when every split is degenerate.
    std::optional<double> mean;
    std::size_t degenerate = 0;
};

struct StabilityReport {
    std::vector<std::string> measures;
    std::vector<std::size_t> top_ks;
    std::vector<std::uint64_t> split_seeds;
    std::vector<StabilityCell> cells; // measure-major
    std::vector<SplitDiagnostics> diagnostics;

    const StabilityCell& cell(std::string_view measure, std::size_t top_k) const;
};

struct LevelStability {
    std::size_t level = 0;
    std::string level_name;
    StabilityReport report;
};

struct TemporalReport {
    std::vector<std::string> measures;
    std::size_t cut = 0;
    std::size_t top_k = 0;
    std::vector<std::optional<double>> overall;
    /// per_level[j-1][m]
    std::vector<std::vector<std::optional<double>>> per_level;
    std::vector<std::string> level_names;
    std::map<std::string, std::string> failures;
};

struct MagicNumber {
    double multiplier = 1.0;
    double score = 0.0;
    /// Every grid point scored the same.
    bool all_tied = false;
};

struct MagicResult {
    std::string measure;
    std::size_t level = 0;
    std::vector<std::string> methods;
    std::vector<MagicNumber> optimal;
    Similarity similarity;
};

struct SimilarityMatrix {
    std::vector<std::string> measures;
    std::vector<std::vector<Similarity>> cells;
};

struct SweepCurve {
    std::size_t top_k = 0;
    std::vector<double> weights;
    std::vector<std::optional<double>> stability;
};

/// 500 points from 0 to 2 inclusive unless told otherwise.
std::vector<double> magic_grid(std::size_t points = 500, double lo = 0.0, double hi = 2.0);

/// Rank-stability over random half splits of the bottom level.
StabilityReport cross_sectional_stability(const Benchmark& bench, std::span<const MeasureSpec> measures,
                                          const SplitOptions& options);

/// Same splits, one single-level summary per hierarchy level.
std::vector<LevelStability> per_level_stability(const Benchmark& bench, std::span<const MeasureSpec> measures,
                                                const SplitOptions& options);

/// Same splits with every half collapsed to one scalar by total_aggregate.
StabilityReport total_aggregation_stability(const Benchmark& bench, std::span<const MeasureSpec> measures,
                                            const SplitOptions& options);

/// Rankings on test days [1..cut] against [cut+1..h].
TemporalReport temporal_stability(const Benchmark& bench, std::span<const MeasureSpec> measures, std::size_t cut,
                                  std::size_t top_k = 0);

/// Grid multiplier minimizing the measure; ties go to the smallest multiplier.
MagicNumber optimal_magic_number(const Evaluator& evaluator, const AggregatedForecast& forecast,
                                 const MeasureSpec& measure, std::span<const double> grid);
MagicNumber optimal_magic_number(const Benchmark& bench, const ForecastSet& forecast, const MeasureSpec& measure,
                                 std::span<const double> grid);

/// Similarity of rankings with and without each method's magic number, on one level.
MagicResult magic_number_similarity(const Benchmark& bench, const MeasureSpec& measure, std::size_t level,
                                    std::span<const double> grid, std::size_t top_k = 0);

/// Pairwise rank similarity of the measures on the full dataset.
SimilarityMatrix measure_similarity_matrix(const Benchmark& bench, std::span<const MeasureSpec> measures,
                                           std::size_t top_k = 0);

/// Stability of w * E_top + (1 - w) * E_bottom along w, one curve per top-k.
std::vector<SweepCurve> top_level_weight_sweep(const Benchmark& bench, const MeasureSpec& base_measure,
                                               std::span<const double> w_grid, const SplitOptions& options);

} // namespace rankstab
