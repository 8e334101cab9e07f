#pragma once

#include "rankstab/forecast.hpp"
#include "rankstab/hierarchy.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rankstab {

/// A series whose measure-specific scale is zero: constant history for
/// MASE/RMSSE, all-zero test actuals for WAPE.
class ZeroScaleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A summary that has no series left to average over.
class EmptyLevelError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class BaseMeasure { mae, smape, mase, rmsse, wape };
inline constexpr std::array<BaseMeasure, 5> kBaseMeasures = {BaseMeasure::mae, BaseMeasure::smape, BaseMeasure::mase,
                                                             BaseMeasure::rmsse, BaseMeasure::wape};
inline constexpr std::size_t kNumBaseMeasures = kBaseMeasures.size();

std::string_view to_string(BaseMeasure base);
BaseMeasure parse_base_measure(std::string_view name);

enum class Weighting { none, price };

struct Summarization {
    enum class Kind { per_level_average, pooled_average, single_level, two_level_weighted };

    Kind kind = Kind::per_level_average;
    std::size_t level = 0;   // single_level
    double top_weight = 0.0; // two_level_weighted

    static Summarization per_level_average() { return {}; }
    static Summarization pooled_average() { return {Kind::pooled_average}; }
    static Summarization single_level(std::size_t j);
    static Summarization two_level_weighted(double w);

    bool operator==(const Summarization&) const = default;
};

/// Base measure + weighting + summarization. Spelled as e.g.
/// "PRICE_RMSSE", "MASE/pooled_average", "MAE/level(12)", "PRICE_RMSSE/two_level(0.05)",
/// optionally prefixed by a report label: "WRMSSE=PRICE_RMSSE".
struct MeasureSpec {
    BaseMeasure base = BaseMeasure::mae;
    Weighting weighting = Weighting::none;
    Summarization summarization;
    std::string label;

    /// Canonical spelling without the label.
    std::string canonical() const;
    /// Label if set, otherwise the canonical spelling.
    std::string name() const;

    MeasureSpec with(Summarization s) const;

    static MeasureSpec parse(std::string_view text);
};

/// The nine measures compared throughout: five unweighted, four price-weighted.
std::vector<MeasureSpec> default_measures();

/// In-sample naive scales of a training history.
struct NaiveScale {
    double abs_diff = 0.0; // (1/(n-1)) sum |Y_i - Y_{i-1}|
    double sq_diff = 0.0;  // (1/(n-1)) sum (Y_i - Y_{i-1})^2
};

/// With from_first_nonzero, the history is trimmed to start at its first
/// nonzero value (the M5 convention for series not yet on sale).
NaiveScale naive_scale(std::span<const double> train, bool from_first_nonzero = false);

double mae(std::span<const double> actual, std::span<const double> forecast);
double smape(std::span<const double> actual, std::span<const double> forecast);
double mase(std::span<const double> train, std::span<const double> actual, std::span<const double> forecast);
double rmsse(std::span<const double> train, std::span<const double> actual, std::span<const double> forecast);
double wape(std::span<const double> actual, std::span<const double> forecast);

struct SeriesError {
    std::size_t series = 0; // index into the dataset's series order
    std::size_t level = 1;
    double value = 0.0;
};

/// sum w_i * e_i over the given errors; excluded series simply carry no term.
double price_weighted_total(std::span<const SeriesError> errors, const PriceWeights& weights);

/// (1/k) sum_j mean_{i in level j} e_ij.
double per_level_average(std::span<const SeriesError> errors, std::size_t num_levels);

double pooled_average(std::span<const SeriesError> errors);

/// w * e_top + (1 - w) * e_bottom.
double two_level_weighted(double e_top, double e_bottom, double w);

/// Unweighted mean over the series of level j.
double level_average(std::span<const SeriesError> errors, std::size_t level);

/// Price-weighted error of one level with the weights renormalized to sum to
/// one within the level (k * w_i).
double level_price_weighted(std::span<const SeriesError> errors, const PriceWeights& weights, std::size_t level);

struct EvaluationOptions {
    /// Start MASE/RMSSE scales at the first nonzero training value.
    bool scale_from_first_nonzero = false;
};

/// Forecasts of one method for every series of a dataset (bottom-up sums),
/// laid out row-major: series index x horizon.
struct AggregatedForecast {
    std::string method_id;
    std::size_t horizon = 0;
    std::vector<double> values;

    std::span<const double> row(std::size_t series) const {
        return std::span<const double>(values).subspan(series * horizon, horizon);
    }
};

/// Per-series errors of one method for every base measure. ZeroScale
/// series are absent from the corresponding list.
struct ErrorTable {
    std::array<std::vector<SeriesError>, kNumBaseMeasures> by_measure;

    std::span<const SeriesError> operator[](BaseMeasure base) const {
        return by_measure[static_cast<std::size_t>(base)];
    }
};

/// Series counts removed from each base measure's summaries.
struct ExclusionCounts {
    std::array<std::size_t, kNumBaseMeasures> by_measure{};

    std::size_t operator[](BaseMeasure base) const { return by_measure[static_cast<std::size_t>(base)]; }
};

/// Scores forecast sets against one dataset. Scales and exclusions depend
/// only on the actuals and are computed once.
class Evaluator {
public:
    Evaluator(const HierarchicalDataset& data, std::optional<PriceWeights> weights, EvaluationOptions options = {});

    const HierarchicalDataset& dataset() const noexcept { return *data_; }
    const std::optional<PriceWeights>& weights() const noexcept { return weights_; }
    const ExclusionCounts& exclusions() const noexcept { return exclusions_; }

    /// Bottom forecasts aligned to the dataset and summed up the hierarchy.
    AggregatedForecast aggregate(const ForecastSet& forecast) const;

    /// Errors with every forecast multiplied by `multiplier`; restricted to
    /// one level when `only_level` is set.
    ErrorTable errors(const AggregatedForecast& forecast, double multiplier = 1.0,
                      std::optional<std::size_t> only_level = std::nullopt) const;
    ErrorTable errors(const ForecastSet& forecast) const { return errors(aggregate(forecast)); }

    /// Summarized score; throws EmptyLevelError when nothing is left to average.
    double score(const ErrorTable& table, const MeasureSpec& spec) const;

    /// Level the spec reads from when it reads a single one.
    std::optional<std::size_t> single_level_of(const MeasureSpec& spec) const;

private:
    const HierarchicalDataset* data_;
    std::optional<PriceWeights> weights_;
    std::vector<NaiveScale> scales_;
    std::vector<double> test_abs_sum_;
    ExclusionCounts exclusions_;
};

} // namespace rankstab
