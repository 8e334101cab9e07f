#include "rankstab/hierarchy.hpp"

#include "rankstab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rankstab {

namespace {

void check_values(const std::string& id, const std::vector<double>& values, const char* what) {
    for (std::size_t t = 0; t < values.size(); ++t) {
        const double v = values[t];
        if (!std::isfinite(v) || v < 0.0) {
            throw DataError("series '" + id + "': " + what + " value at position " + std::to_string(t + 1) +
                            " is " + (std::isfinite(v) ? "negative" : "not finite"));
        }
    }
}

std::string group_id(const LevelSpec& level, const std::vector<std::string>& values) {
    if (level.keys.empty()) return std::string(kTotalId);
    std::string id;
    for (std::size_t i = 0; i < level.keys.size(); ++i) {
        if (i > 0) id += ',';
        id += level.keys[i];
        id += '=';
        id += values[i];
    }
    return id;
}

void add_into(std::vector<double>& acc, const std::vector<double>& values) {
    for (std::size_t t = 0; t < acc.size(); ++t) acc[t] += values[t];
}

} // namespace

HierarchySpec::HierarchySpec(std::vector<LevelSpec> levels) : levels_(std::move(levels)) {
    if (levels_.empty()) throw std::invalid_argument("hierarchy spec needs at least one level");
    if (!levels_.front().keys.empty()) {
        throw std::invalid_argument("the first hierarchy level must group by no attribute (one total series)");
    }
    for (const auto& level : levels_) {
        auto keys = level.keys;
        std::sort(keys.begin(), keys.end());
        if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
            throw std::invalid_argument("hierarchy level '" + level.name + "' repeats an attribute");
        }
    }
}

HierarchySpec HierarchySpec::m5() {
    return HierarchySpec({
        {"total", {}},
        {"state", {"state_id"}},
        {"store", {"store_id"}},
        {"category", {"cat_id"}},
        {"department", {"dept_id"}},
        {"state_category", {"state_id", "cat_id"}},
        {"state_department", {"state_id", "dept_id"}},
        {"store_category", {"store_id", "cat_id"}},
        {"store_department", {"store_id", "dept_id"}},
        {"item", {"item_id"}},
        {"item_state", {"item_id", "state_id"}},
        {"item_store", {"item_id", "store_id"}},
    });
}

std::span<const TimeSeries> HierarchicalDataset::level(std::size_t j) const {
    if (j < 1 || j > num_levels()) throw std::out_of_range("level " + std::to_string(j) + " out of range");
    return std::span<const TimeSeries>(series_).subspan(level_begin(j), level_size(j));
}

std::span<const std::size_t> HierarchicalDataset::members(std::size_t index) const {
    if (index >= series_.size()) throw std::out_of_range("series index out of range");
    const auto begin = member_offsets_[index];
    return std::span<const std::size_t>(member_index_).subspan(begin, member_offsets_[index + 1] - begin);
}

std::optional<std::size_t> HierarchicalDataset::find(std::string_view id) const {
    auto it = lookup_.find(std::string(id));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

HierarchicalDataset build_hierarchy(std::vector<BottomSeries> bottom, const HierarchySpec& spec) {
    if (spec.num_levels() == 0) throw std::invalid_argument("empty hierarchy spec");
    if (bottom.empty()) throw DataError("no bottom-level series");

    const std::size_t n = bottom.front().train.size();
    const std::size_t h = bottom.front().test.size();
    if (n < 2) throw DataError("training history must have at least 2 observations");
    if (h < 1) throw DataError("test window must have at least 1 observation");

    {
        std::unordered_map<std::string, std::size_t> seen;
        for (std::size_t b = 0; b < bottom.size(); ++b) {
            const auto& s = bottom[b];
            if (!seen.emplace(s.id, b).second) throw DataError("duplicate bottom series id '" + s.id + "'");
            if (s.train.size() != n || s.test.size() != h) {
                throw DataError("series '" + s.id + "' has a different training or test length");
            }
            check_values(s.id, s.train, "training");
            check_values(s.id, s.test, "test");
        }
    }

    const std::size_t k = spec.num_levels();
    HierarchicalDataset data;
    data.spec_ = spec;
    data.train_length_ = n;
    data.horizon_ = h;
    data.member_offsets_.push_back(0);

    auto attribute = [&](const BottomSeries& s, const std::string& key) -> const std::string& {
        if (key == kIdAttribute) return s.id;
        auto it = s.attributes.find(key);
        if (it == s.attributes.end()) {
            throw DataError("series '" + s.id + "' lacks attribute '" + key + "' used by the hierarchy");
        }
        return it->second;
    };

    for (std::size_t j = 1; j <= k; ++j) {
        const LevelSpec& level = spec.level(j);
        data.level_offsets_.push_back(data.series_.size());

        std::map<std::vector<std::string>, std::vector<std::size_t>> groups;
        for (std::size_t b = 0; b < bottom.size(); ++b) {
            std::vector<std::string> key;
            key.reserve(level.keys.size());
            for (const auto& name : level.keys) key.push_back(attribute(bottom[b], name));
            groups[std::move(key)].push_back(b);
        }

        if (j == k) {
            if (groups.size() != bottom.size()) {
                throw DataError("last hierarchy level '" + level.name +
                                "' does not identify every bottom series uniquely");
            }
            for (std::size_t b = 0; b < bottom.size(); ++b) {
                data.member_index_.push_back(b);
                data.member_offsets_.push_back(data.member_index_.size());
            }
            continue;
        }

        for (auto& [key, members] : groups) {
            TimeSeries s;
            s.id = group_id(level, key);
            s.level = j;
            s.train.assign(n, 0.0);
            s.test.assign(h, 0.0);
            for (auto b : members) {
                add_into(s.train, bottom[b].train);
                add_into(s.test, bottom[b].test);
            }
            data.series_.push_back(std::move(s));
            data.member_index_.insert(data.member_index_.end(), members.begin(), members.end());
            data.member_offsets_.push_back(data.member_index_.size());
        }
    }

    data.attributes_.reserve(bottom.size());
    for (auto& b : bottom) {
        data.series_.push_back(TimeSeries{std::move(b.id), k, std::move(b.train), std::move(b.test)});
        data.attributes_.push_back(std::move(b.attributes));
    }
    data.level_offsets_.push_back(data.series_.size());

    for (std::size_t i = 0; i < data.series_.size(); ++i) {
        if (!data.lookup_.emplace(data.series_[i].id, i).second) {
            throw DataError("series id '" + data.series_[i].id + "' occurs on more than one level");
        }
    }
    return data;
}

double PriceWeights::weight(std::string_view id) const {
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] == id) return weights[i];
    }
    throw std::out_of_range("no price weight for series '" + std::string(id) + "'");
}

PriceWeights compute_price_weights(const HierarchicalDataset& data, const PriceTable& prices,
                                   std::size_t window_len) {
    const std::size_t n = data.train_length();
    if (window_len == 0 || window_len > n) {
        throw std::invalid_argument("price window of " + std::to_string(window_len) +
                                    " days does not fit a training history of " + std::to_string(n));
    }

    PriceWeights out;
    out.num_levels = data.num_levels();
    out.ids.reserve(data.size());
    for (const auto& s : data.series()) out.ids.push_back(s.id);

    const auto bottom = data.bottom();
    std::vector<double> bottom_sales(bottom.size(), 0.0);
    for (std::size_t b = 0; b < bottom.size(); ++b) {
        const auto& s = bottom[b];
        auto it = prices.prices.find(s.id);
        double sales = 0.0;
        for (std::size_t t = n - window_len; t < n; ++t) {
            const double units = s.train[t];
            if (units == 0.0) continue;
            double price = std::numeric_limits<double>::quiet_NaN();
            if (it != prices.prices.end() && t >= prices.first_day && t - prices.first_day < it->second.size()) {
                price = it->second[t - prices.first_day];
            }
            if (std::isnan(price)) {
                ++out.missing_prices;
                continue;
            }
            if (!std::isfinite(price) || price < 0.0) {
                throw DataError("series '" + s.id + "' has an invalid price on training day " + std::to_string(t + 1));
            }
            sales += units * price;
        }
        bottom_sales[b] = sales;
    }

    out.dollar_sales.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        double sales = 0.0;
        for (auto b : data.members(i)) sales += bottom_sales[b];
        out.dollar_sales[i] = sales;
    }
    out.total = out.dollar_sales.front();
    if (!(out.total > 0.0)) throw DataError("total dollar sales are zero; price weights are undefined");

    const double k = static_cast<double>(data.num_levels());
    out.weights.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out.weights[i] = out.dollar_sales[i] / out.total / k;
    return out;
}

PriceWeights single_series_weights(const HierarchicalDataset& data, double dollar_sales) {
    if (data.size() != 1) throw std::invalid_argument("single_series_weights needs a one-series dataset");
    PriceWeights out;
    out.ids = {data.series(0).id};
    out.weights = {1.0};
    out.dollar_sales = {dollar_sales};
    out.total = dollar_sales;
    out.num_levels = 1;
    return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> draw_half_split(std::size_t bottom_count,
                                                                              std::uint64_t seed) {
    if (bottom_count < 2) throw std::invalid_argument("splitting needs at least 2 bottom series");
    const auto order = random_permutation(bottom_count, seed);
    const auto first_size = (bottom_count + 1) / 2;
    std::vector<std::size_t> first(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(first_size));
    std::vector<std::size_t> second(order.begin() + static_cast<std::ptrdiff_t>(first_size), order.end());
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    return {std::move(first), std::move(second)};
}

HierarchicalDataset select_bottom(const HierarchicalDataset& data, std::span<const std::size_t> positions) {
    const auto bottom = data.bottom();
    std::vector<BottomSeries> subset;
    subset.reserve(positions.size());
    for (auto b : positions) {
        const auto& s = bottom[b];
        subset.push_back(BottomSeries{s.id, data.bottom_attributes(b), s.train, s.test});
    }
    return build_hierarchy(std::move(subset), data.spec());
}

std::pair<HierarchicalDataset, HierarchicalDataset> split_bottom_half(const HierarchicalDataset& data,
                                                                      std::uint64_t seed) {
    const auto [first, second] = draw_half_split(data.bottom_count(), seed);
    return {select_bottom(data, first), select_bottom(data, second)};
}

std::pair<HierarchicalDataset, HierarchicalDataset> split_test_window(const HierarchicalDataset& data,
                                                                      std::size_t cut) {
    const std::size_t h = data.horizon();
    if (cut < 1 || cut >= h) {
        throw std::invalid_argument("test window cut " + std::to_string(cut) + " must lie in [1, " +
                                    std::to_string(h - 1) + "]");
    }
    HierarchicalDataset first = data;
    HierarchicalDataset second = data;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& test = data.series_[i].test;
        first.series_[i].test.assign(test.begin(), test.begin() + static_cast<std::ptrdiff_t>(cut));
        second.series_[i].test.assign(test.begin() + static_cast<std::ptrdiff_t>(cut), test.end());
    }
    first.horizon_ = cut;
    second.horizon_ = h - cut;
    return {std::move(first), std::move(second)};
}

std::pair<ForecastSet, ForecastSet> split_forecast_window(const ForecastSet& forecast, std::size_t cut) {
    ForecastSet first{forecast.method_id, {}};
    ForecastSet second{forecast.method_id, {}};
    for (const auto& [id, values] : forecast.forecasts) {
        if (cut < 1 || cut >= values.size()) {
            throw std::invalid_argument("forecast '" + id + "' of method '" + forecast.method_id +
                                        "' cannot be cut at " + std::to_string(cut));
        }
        first.forecasts.emplace(id, std::vector<double>(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(cut)));
        second.forecasts.emplace(id, std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(cut), values.end()));
    }
    return {std::move(first), std::move(second)};
}

HierarchicalDataset total_aggregate(const HierarchicalDataset& data) {
    if (data.size() == 0) throw std::invalid_argument("total_aggregate on an empty dataset");
    const auto& top = data.series(0);

    HierarchicalDataset out;
    out.spec_ = HierarchySpec(std::vector<LevelSpec>{LevelSpec{"total", {}}});
    out.train_length_ = data.train_length();
    out.horizon_ = 1;
    out.series_.push_back(TimeSeries{std::string(kTotalId), 1, top.train,
                                     {std::accumulate(top.test.begin(), top.test.end(), 0.0)}});
    out.level_offsets_ = {0, 1};
    out.member_offsets_ = {0, 1};
    out.member_index_ = {0};
    out.attributes_.emplace_back();
    out.lookup_.emplace(out.series_.front().id, 0);
    return out;
}

ForecastSet total_aggregate(const HierarchicalDataset& data, const ForecastSet& forecast) {
    // Same summation order as the actuals: across series per day, then across days.
    std::vector<double> daily(data.horizon(), 0.0);
    for (const auto& s : data.bottom()) {
        auto it = forecast.forecasts.find(s.id);
        if (it == forecast.forecasts.end()) {
            throw DataError("method '" + forecast.method_id + "' has no forecast for series '" + s.id + "'");
        }
        if (it->second.size() != data.horizon()) {
            throw DataError("forecast of method '" + forecast.method_id + "' for '" + s.id +
                            "' does not span the test window");
        }
        add_into(daily, it->second);
    }
    ForecastSet out{forecast.method_id, {}};
    out.forecasts.emplace(std::string(kTotalId),
                          std::vector<double>{std::accumulate(daily.begin(), daily.end(), 0.0)});
    return out;
}

} // namespace rankstab
