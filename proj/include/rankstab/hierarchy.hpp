#pragma once

#include "rankstab/forecast.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace rankstab {

/// Malformed input data or an inconsistent hierarchy.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Attribute name that always resolves to the bottom series' own id.
inline constexpr std::string_view kIdAttribute = "id";

/// Id given to the single series of the first level.
inline constexpr std::string_view kTotalId = "Total";

struct TimeSeries {
    std::string id;
    std::size_t level = 1; // 1 = most aggregate
    std::vector<double> train;
    std::vector<double> test;
};

/// Input record for one bottom-level series.
struct BottomSeries {
    std::string id;
    std::map<std::string, std::string> attributes;
    std::vector<double> train;
    std::vector<double> test;
};

struct LevelSpec {
    std::string name;
    std::vector<std::string> keys;
};

/// Ordered list of groupings. Level 1 must group by nothing (one total
/// series); the last level must be the identity grouping, which is checked
/// when a dataset is built.
class HierarchySpec {
public:
    HierarchySpec() = default;
    explicit HierarchySpec(std::vector<LevelSpec> levels);

    /// The twelve M5 levels, total down to item x store.
    static HierarchySpec m5();

    std::size_t num_levels() const noexcept { return levels_.size(); }
    const std::vector<LevelSpec>& levels() const noexcept { return levels_; }
    const LevelSpec& level(std::size_t j) const { return levels_.at(j - 1); }

    bool operator==(const HierarchySpec&) const = default;

private:
    std::vector<LevelSpec> levels_;
};

class HierarchicalDataset;

HierarchicalDataset build_hierarchy(std::vector<BottomSeries> bottom, const HierarchySpec& spec);

/// All series of a grouped hierarchy, stored level by level. Aggregate
/// series hold the element-wise sums of their bottom constituents.
/// Immutable once built.
class HierarchicalDataset {
public:
    HierarchicalDataset() = default;

    const HierarchySpec& spec() const noexcept { return spec_; }
    std::size_t num_levels() const noexcept { return spec_.num_levels(); }
    std::size_t train_length() const noexcept { return train_length_; }
    std::size_t horizon() const noexcept { return horizon_; }

    std::span<const TimeSeries> series() const noexcept { return series_; }
    const TimeSeries& series(std::size_t index) const { return series_.at(index); }
    std::size_t size() const noexcept { return series_.size(); }

    /// Index of the first series of level j (1-based); level_begin(k + 1) == size().
    std::size_t level_begin(std::size_t j) const { return level_offsets_.at(j - 1); }
    std::size_t level_size(std::size_t j) const { return level_begin(j + 1) - level_begin(j); }
    std::span<const TimeSeries> level(std::size_t j) const;

    /// Bottom series are the last level, in insertion order.
    std::size_t bottom_count() const { return level_size(num_levels()); }
    std::span<const TimeSeries> bottom() const { return level(num_levels()); }
    const std::map<std::string, std::string>& bottom_attributes(std::size_t b) const {
        return attributes_.at(b);
    }

    /// Bottom positions (0..bottom_count()-1) whose sum is series `index`.
    std::span<const std::size_t> members(std::size_t index) const;

    std::optional<std::size_t> find(std::string_view id) const;

private:
    friend HierarchicalDataset build_hierarchy(std::vector<BottomSeries>, const HierarchySpec&);
    friend std::pair<HierarchicalDataset, HierarchicalDataset>
    split_test_window(const HierarchicalDataset&, std::size_t);
    friend HierarchicalDataset total_aggregate(const HierarchicalDataset&);

    HierarchySpec spec_;
    std::size_t train_length_ = 0;
    std::size_t horizon_ = 0;
    std::vector<TimeSeries> series_;
    std::vector<std::size_t> level_offsets_;
    std::vector<std::size_t> member_offsets_;
    std::vector<std::size_t> member_index_;
    std::vector<std::map<std::string, std::string>> attributes_;
    std::unordered_map<std::string, std::size_t> lookup_;
};

/// Unit prices per bottom series over a trailing block of training days.
/// prices[id][t] is the price on training day first_day + t (0-based);
/// NaN marks a missing price.
struct PriceTable {
    std::size_t first_day = 0;
    std::unordered_map<std::string, std::vector<double>> prices;
};

/// Dollar-sales weights aligned with the series order of one dataset.
struct PriceWeights {
    std::vector<std::string> ids;
    std::vector<double> weights;
    std::vector<double> dollar_sales;
    double total = 0.0;
    std::size_t num_levels = 0;
    /// Bottom (series, day) cells with positive units but no price.
    std::size_t missing_prices = 0;

    std::size_t size() const noexcept { return weights.size(); }
    double weight(std::string_view id) const;
};

/// w_i = (1/k) * sales_i / sales_total over the last `window_len` training days.
PriceWeights compute_price_weights(const HierarchicalDataset& data, const PriceTable& prices,
                                   std::size_t window_len);

/// Weight 1 on every series of a one-series dataset, as produced by total_aggregate.
PriceWeights single_series_weights(const HierarchicalDataset& data, double dollar_sales = 1.0);

/// Random equal halving of the bottom level; both halves are re-aggregated
/// under the same spec. The first half takes the extra series on odd counts.
std::pair<HierarchicalDataset, HierarchicalDataset> split_bottom_half(const HierarchicalDataset& data,
                                                                      std::uint64_t seed);

/// Bottom-position sets of the two halves drawn by split_bottom_half, each sorted.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> draw_half_split(std::size_t bottom_count,
                                                                              std::uint64_t seed);

/// Dataset restricted to the given bottom positions, re-aggregated.
HierarchicalDataset select_bottom(const HierarchicalDataset& data, std::span<const std::size_t> positions);

/// Test windows [1..cut] and [cut+1..h]; training history is shared.
std::pair<HierarchicalDataset, HierarchicalDataset> split_test_window(const HierarchicalDataset& data,
                                                                      std::size_t cut);

/// Same window split applied to a forecast set.
std::pair<ForecastSet, ForecastSet> split_forecast_window(const ForecastSet& forecast, std::size_t cut);

/// One-level dataset holding the day-wise total as training history and the
/// grand sum of the test block as a single test point.
HierarchicalDataset total_aggregate(const HierarchicalDataset& data);

/// Grand sum of the forecasts of the dataset's bottom series, keyed by the Total id.
ForecastSet total_aggregate(const HierarchicalDataset& data, const ForecastSet& forecast);

} // namespace rankstab
