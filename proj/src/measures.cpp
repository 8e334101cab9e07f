#include "rankstab/measures.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace rankstab {

namespace {

constexpr std::array<std::string_view, kNumBaseMeasures> kBaseNames = {"MAE", "SMAPE", "MASE", "RMSSE", "WAPE"};
constexpr std::string_view kPricePrefix = "PRICE_";

void check_lengths(std::span<const double> actual, std::span<const double> forecast) {
    if (actual.empty()) throw std::invalid_argument("empty test window");
    if (actual.size() != forecast.size()) {
        throw std::invalid_argument("actual and forecast lengths differ (" + std::to_string(actual.size()) + " vs " +
                                    std::to_string(forecast.size()) + ")");
    }
}

double smape_term(double y, double f) {
    const double denom = std::abs(y) + std::abs(f);
    return denom == 0.0 ? 0.0 : std::abs(y - f) / denom;
}

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

double parse_double(std::string_view text, std::string_view context) {
    double v = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size()) {
        throw std::invalid_argument("bad number '" + std::string(text) + "' in " + std::string(context));
    }
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

// Text between "name(" and the closing ")" or nullopt if `s` is not such a call.
std::optional<std::string_view> call_argument(std::string_view s, std::string_view name) {
    if (s.size() < name.size() + 2 || s.substr(0, name.size()) != name || s[name.size()] != '(' || s.back() != ')') {
        return std::nullopt;
    }
    return s.substr(name.size() + 1, s.size() - name.size() - 2);
}

} // namespace

std::string_view to_string(BaseMeasure base) { return kBaseNames[static_cast<std::size_t>(base)]; }

BaseMeasure parse_base_measure(std::string_view name) {
    for (std::size_t i = 0; i < kNumBaseMeasures; ++i) {
        if (kBaseNames[i] == name) return kBaseMeasures[i];
    }
    throw std::invalid_argument("unknown error measure '" + std::string(name) + "'");
}

Summarization Summarization::single_level(std::size_t j) {
    if (j < 1) throw std::invalid_argument("single_level needs a level index >= 1");
    return {Kind::single_level, j, 0.0};
}

Summarization Summarization::two_level_weighted(double w) {
    if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("top-level weight must lie in [0, 1]");
    return {Kind::two_level_weighted, 0, w};
}

std::string MeasureSpec::canonical() const {
    std::string out;
    if (weighting == Weighting::price) out += kPricePrefix;
    out += to_string(base);
    switch (summarization.kind) {
    case Summarization::Kind::per_level_average:
        break;
    case Summarization::Kind::pooled_average:
        out += "/pooled_average";
        break;
    case Summarization::Kind::single_level:
        out += "/level(" + std::to_string(summarization.level) + ")";
        break;
    case Summarization::Kind::two_level_weighted:
        out += "/two_level(" + format_double(summarization.top_weight) + ")";
        break;
    }
    return out;
}

std::string MeasureSpec::name() const { return label.empty() ? canonical() : label; }

MeasureSpec MeasureSpec::with(Summarization s) const {
    MeasureSpec out = *this;
    out.summarization = s;
    out.label.clear();
    return out;
}

MeasureSpec MeasureSpec::parse(std::string_view text) {
    MeasureSpec spec;
    text = trim(text);
    if (auto eq = text.find('='); eq != std::string_view::npos) {
        spec.label = std::string(trim(text.substr(0, eq)));
        if (spec.label.empty()) throw std::invalid_argument("empty label in measure '" + std::string(text) + "'");
        text = trim(text.substr(eq + 1));
    }

    std::string_view base = text;
    std::string_view scheme;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        base = trim(text.substr(0, slash));
        scheme = trim(text.substr(slash + 1));
    }
    if (base.substr(0, kPricePrefix.size()) == kPricePrefix) {
        spec.weighting = Weighting::price;
        base.remove_prefix(kPricePrefix.size());
    }
    spec.base = parse_base_measure(base);

    if (scheme.empty() || scheme == "per_level_average") {
        spec.summarization = Summarization::per_level_average();
    } else if (scheme == "pooled_average" || scheme == "pooled") {
        spec.summarization = Summarization::pooled_average();
    } else if (auto arg = call_argument(scheme, "level"); arg || (arg = call_argument(scheme, "single_level"))) {
        const double j = parse_double(trim(*arg), text);
        if (j < 1 || j != std::floor(j)) throw std::invalid_argument("bad level in measure '" + std::string(text) + "'");
        spec.summarization = Summarization::single_level(static_cast<std::size_t>(j));
    } else if (auto w = call_argument(scheme, "two_level"); w || (w = call_argument(scheme, "two_level_weighted"))) {
        spec.summarization = Summarization::two_level_weighted(parse_double(trim(*w), text));
    } else {
        throw std::invalid_argument("unknown summarization '" + std::string(scheme) + "'");
    }
    return spec;
}

std::vector<MeasureSpec> default_measures() {
    std::vector<MeasureSpec> out;
    for (auto name : {"MAE", "MASE", "RMSSE", "SMAPE", "WAPE", "PRICE_MAE", "PRICE_MASE", "PRICE_RMSSE", "PRICE_SMAPE"}) {
        out.push_back(MeasureSpec::parse(name));
    }
    return out;
}

NaiveScale naive_scale(std::span<const double> train, bool from_first_nonzero) {
    std::size_t start = 0;
    if (from_first_nonzero) {
        while (start < train.size() && train[start] == 0.0) ++start;
    }
    const std::size_t n = train.size() - start;
    if (n < 2) return {};
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    for (std::size_t i = start + 1; i < train.size(); ++i) {
        const double d = train[i] - train[i - 1];
        abs_sum += std::abs(d);
        sq_sum += d * d;
    }
    const double denom = static_cast<double>(n - 1);
    return {abs_sum / denom, sq_sum / denom};
}

double mae(std::span<const double> actual, std::span<const double> forecast) {
    check_lengths(actual, forecast);
    double sum = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) sum += std::abs(actual[t] - forecast[t]);
    return sum / static_cast<double>(actual.size());
}

double smape(std::span<const double> actual, std::span<const double> forecast) {
    check_lengths(actual, forecast);
    double sum = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) sum += smape_term(actual[t], forecast[t]);
    return 200.0 / static_cast<double>(actual.size()) * sum;
}

double mase(std::span<const double> train, std::span<const double> actual, std::span<const double> forecast) {
    const double scale = naive_scale(train).abs_diff;
    if (!(scale > 0.0)) throw ZeroScaleError("MASE scale is zero (constant training history)");
    return mae(actual, forecast) / scale;
}

double rmsse(std::span<const double> train, std::span<const double> actual, std::span<const double> forecast) {
    check_lengths(actual, forecast);
    const double scale = naive_scale(train).sq_diff;
    if (!(scale > 0.0)) throw ZeroScaleError("RMSSE scale is zero (constant training history)");
    double sum = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        const double e = actual[t] - forecast[t];
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(actual.size()) / scale);
}

double wape(std::span<const double> actual, std::span<const double> forecast) {
    check_lengths(actual, forecast);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        num += std::abs(actual[t] - forecast[t]);
        den += std::abs(actual[t]);
    }
    if (!(den > 0.0)) throw ZeroScaleError("WAPE scale is zero (all-zero test actuals)");
    return num / den;
}

double price_weighted_total(std::span<const SeriesError> errors, const PriceWeights& weights) {
    double total = 0.0;
    for (const auto& e : errors) {
        if (e.series >= weights.size()) {
            throw std::out_of_range("series " + std::to_string(e.series) + " has no price weight");
        }
        total += weights.weights[e.series] * e.value;
    }
    return total;
}

double per_level_average(std::span<const SeriesError> errors, std::size_t num_levels) {
    std::vector<double> sums(num_levels, 0.0);
    std::vector<std::size_t> counts(num_levels, 0);
    for (const auto& e : errors) {
        if (e.level < 1 || e.level > num_levels) {
            throw std::invalid_argument("series error on level " + std::to_string(e.level) + " outside 1.." +
                                        std::to_string(num_levels));
        }
        sums[e.level - 1] += e.value;
        ++counts[e.level - 1];
    }
    double total = 0.0;
    for (std::size_t j = 0; j < num_levels; ++j) {
        if (counts[j] == 0) throw EmptyLevelError("every series of level " + std::to_string(j + 1) + " is excluded");
        total += sums[j] / static_cast<double>(counts[j]);
    }
    return total / static_cast<double>(num_levels);
}

double pooled_average(std::span<const SeriesError> errors) {
    if (errors.empty()) throw EmptyLevelError("no series left to average");
    double sum = 0.0;
    for (const auto& e : errors) sum += e.value;
    return sum / static_cast<double>(errors.size());
}

double two_level_weighted(double e_top, double e_bottom, double w) {
    if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("top-level weight must lie in [0, 1]");
    return w * e_top + (1.0 - w) * e_bottom;
}

double level_average(std::span<const SeriesError> errors, std::size_t level) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& e : errors) {
        if (e.level != level) continue;
        sum += e.value;
        ++count;
    }
    if (count == 0) throw EmptyLevelError("every series of level " + std::to_string(level) + " is excluded");
    return sum / static_cast<double>(count);
}

double level_price_weighted(std::span<const SeriesError> errors, const PriceWeights& weights, std::size_t level) {
    const double k = static_cast<double>(weights.num_levels);
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& e : errors) {
        if (e.level != level) continue;
        if (e.series >= weights.size()) {
            throw std::out_of_range("series " + std::to_string(e.series) + " has no price weight");
        }
        total += k * weights.weights[e.series] * e.value;
        ++count;
    }
    if (count == 0) throw EmptyLevelError("every series of level " + std::to_string(level) + " is excluded");
    return total;
}

Evaluator::Evaluator(const HierarchicalDataset& data, std::optional<PriceWeights> weights, EvaluationOptions options)
    : data_(&data), weights_(std::move(weights)) {
    if (weights_) {
        if (weights_->size() != data.size()) {
            throw std::invalid_argument("price weights cover " + std::to_string(weights_->size()) +
                                        " series, dataset has " + std::to_string(data.size()));
        }
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (weights_->ids[i] != data.series(i).id) {
                throw std::invalid_argument("price weight order does not match series '" + data.series(i).id + "'");
            }
        }
    }
    scales_.reserve(data.size());
    test_abs_sum_.reserve(data.size());
    for (const auto& s : data.series()) {
        const auto scale = naive_scale(s.train, options.scale_from_first_nonzero);
        double abs_sum = 0.0;
        for (double y : s.test) abs_sum += std::abs(y);
        scales_.push_back(scale);
        test_abs_sum_.push_back(abs_sum);
        if (!(scale.abs_diff > 0.0)) ++exclusions_.by_measure[static_cast<std::size_t>(BaseMeasure::mase)];
        if (!(scale.sq_diff > 0.0)) ++exclusions_.by_measure[static_cast<std::size_t>(BaseMeasure::rmsse)];
        if (!(abs_sum > 0.0)) ++exclusions_.by_measure[static_cast<std::size_t>(BaseMeasure::wape)];
    }
}

AggregatedForecast Evaluator::aggregate(const ForecastSet& forecast) const {
    const auto& data = *data_;
    const std::size_t h = data.horizon();
    AggregatedForecast out{forecast.method_id, h, std::vector<double>(data.size() * h, 0.0)};

    const std::size_t bottom_begin = data.level_begin(data.num_levels());
    const auto bottom = data.bottom();
    for (std::size_t b = 0; b < bottom.size(); ++b) {
        auto it = forecast.forecasts.find(bottom[b].id);
        if (it == forecast.forecasts.end()) {
            throw DataError("method '" + forecast.method_id + "' has no forecast for series '" + bottom[b].id + "'");
        }
        const auto& values = it->second;
        if (values.size() != h) {
            throw DataError("forecast of method '" + forecast.method_id + "' for '" + bottom[b].id + "' has " +
                            std::to_string(values.size()) + " values, expected " + std::to_string(h));
        }
        for (std::size_t t = 0; t < h; ++t) {
            if (!std::isfinite(values[t])) {
                throw DataError("forecast of method '" + forecast.method_id + "' for '" + bottom[b].id +
                                "' is not finite");
            }
            out.values[(bottom_begin + b) * h + t] = values[t];
        }
    }
    for (std::size_t i = 0; i < bottom_begin; ++i) {
        double* row = out.values.data() + i * h;
        for (auto b : data.members(i)) {
            const double* src = out.values.data() + (bottom_begin + b) * h;
            for (std::size_t t = 0; t < h; ++t) row[t] += src[t];
        }
    }
    return out;
}

ErrorTable Evaluator::errors(const AggregatedForecast& forecast, double multiplier,
                             std::optional<std::size_t> only_level) const {
    const auto& data = *data_;
    const std::size_t h = data.horizon();
    if (forecast.horizon != h || forecast.values.size() != data.size() * h) {
        throw std::invalid_argument("aggregated forecast does not match the dataset");
    }
    std::size_t begin = 0;
    std::size_t end = data.size();
    if (only_level) {
        begin = data.level_begin(*only_level);
        end = begin + data.level_size(*only_level);
    }

    ErrorTable table;
    for (auto& list : table.by_measure) list.reserve(end - begin);
    const double hd = static_cast<double>(h);
    auto push = [&](BaseMeasure base, std::size_t i, std::size_t level, double value) {
        table.by_measure[static_cast<std::size_t>(base)].push_back(SeriesError{i, level, value});
    };

    for (std::size_t i = begin; i < end; ++i) {
        const auto& s = data.series(i);
        const auto f = forecast.row(i);
        double abs_sum = 0.0;
        double sq_sum = 0.0;
        double smape_sum = 0.0;
        for (std::size_t t = 0; t < h; ++t) {
            const double y = s.test[t];
            const double fc = multiplier * f[t];
            const double e = y - fc;
            abs_sum += std::abs(e);
            sq_sum += e * e;
            smape_sum += smape_term(y, fc);
        }
        const double mean_abs = abs_sum / hd;
        push(BaseMeasure::mae, i, s.level, mean_abs);
        push(BaseMeasure::smape, i, s.level, 200.0 / hd * smape_sum);
        if (scales_[i].abs_diff > 0.0) push(BaseMeasure::mase, i, s.level, mean_abs / scales_[i].abs_diff);
        if (scales_[i].sq_diff > 0.0) push(BaseMeasure::rmsse, i, s.level, std::sqrt(sq_sum / hd / scales_[i].sq_diff));
        if (test_abs_sum_[i] > 0.0) push(BaseMeasure::wape, i, s.level, abs_sum / test_abs_sum_[i]);
    }
    return table;
}

std::optional<std::size_t> Evaluator::single_level_of(const MeasureSpec& spec) const {
    if (spec.summarization.kind == Summarization::Kind::single_level) return spec.summarization.level;
    if (data_->num_levels() == 1) return 1;
    return std::nullopt;
}

double Evaluator::score(const ErrorTable& table, const MeasureSpec& spec) const {
    const std::size_t k = data_->num_levels();
    const auto errors = table[spec.base];
    const auto& sum = spec.summarization;
    if (sum.kind == Summarization::Kind::single_level && sum.level > k) {
        throw std::invalid_argument("measure " + spec.name() + " reads level " + std::to_string(sum.level) +
                                    " of a " + std::to_string(k) + "-level hierarchy");
    }

    if (spec.weighting == Weighting::none) {
        switch (sum.kind) {
        case Summarization::Kind::per_level_average:
            return per_level_average(errors, k);
        case Summarization::Kind::pooled_average:
            return pooled_average(errors);
        case Summarization::Kind::single_level:
            return level_average(errors, sum.level);
        case Summarization::Kind::two_level_weighted:
            return two_level_weighted(level_average(errors, 1), level_average(errors, k), sum.top_weight);
        }
    }

    if (!weights_) throw std::invalid_argument("measure " + spec.name() + " needs price weights");
    switch (sum.kind) {
    case Summarization::Kind::per_level_average:
    case Summarization::Kind::pooled_average:
        if (errors.empty()) throw EmptyLevelError("no series left to weight");
        return price_weighted_total(errors, *weights_);
    case Summarization::Kind::single_level:
        return level_price_weighted(errors, *weights_, sum.level);
    case Summarization::Kind::two_level_weighted:
        return two_level_weighted(level_price_weighted(errors, *weights_, 1),
                                  level_price_weighted(errors, *weights_, k), sum.top_weight);
    }
    throw std::logic_error("unhandled summarization");
}

} // namespace rankstab
