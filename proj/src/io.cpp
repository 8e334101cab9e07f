#include "rankstab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace rankstab::io {

namespace fs = std::filesystem;

namespace {

class CsvReader {
public:
    explicit CsvReader(const fs::path& path) : path_(path), in_(path) {
        if (!in_) throw DataError("cannot open " + path.string());
    }

    bool next(std::vector<std::string>& fields) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            fields = split_csv_line(line);
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw DataError(path_.string() + ":" + std::to_string(line_no_) + ": " + message);
    }

    double number(const std::string& text, const char* what) const {
        double v = 0.0;
        const char* begin = text.data();
        const char* end = begin + text.size();
        while (begin != end && *begin == ' ') ++begin;
        if (begin != end && *begin == '+') ++begin;
        auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc() || ptr != end) fail(std::string("non-numeric ") + what + " '" + text + "'");
        return v;
    }

    std::size_t line() const noexcept { return line_no_; }

private:
    fs::path path_;
    std::ifstream in_;
    std::size_t line_no_ = 0;
};

std::size_t column_of(const std::vector<std::string>& header, const std::string& name, const fs::path& path) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError(path.string() + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

} // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    out.push_back(std::move(field));
    return out;
}

LoadedData load_m5(const fs::path& sales_path, const fs::path& prices_path, const fs::path& calendar_path,
                   const M5Options& options) {
    static const std::vector<std::string> kAttributes = {"item_id", "dept_id", "cat_id", "store_id", "state_id"};

    CsvReader sales(sales_path);
    std::vector<std::string> header;
    if (!sales.next(header)) sales.fail("empty sales file");
    const std::size_t id_col = column_of(header, "id", sales_path);
    std::vector<std::size_t> attr_cols;
    for (const auto& a : kAttributes) attr_cols.push_back(column_of(header, a, sales_path));

    // Day columns must be d_1..d_T in order.
    std::vector<std::size_t> day_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c].rfind("d_", 0) != 0) continue;
        const auto expected = "d_" + std::to_string(day_cols.size() + 1);
        if (header[c] != expected) {
            throw DataError(sales_path.string() + ": expected day column " + expected + ", found " + header[c]);
        }
        day_cols.push_back(c);
    }
    const std::size_t days = day_cols.size();
    const std::size_t h = options.horizon;
    if (h == 0) throw DataError("test horizon must be positive");
    const std::size_t n = options.train_length.value_or(days >= h ? days - h : 0);
    if (n + h > days || n < 2) {
        throw DataError(sales_path.string() + ": " + std::to_string(days) + " day columns cannot hold " +
                        std::to_string(n) + " training and " + std::to_string(h) + " test days");
    }

    std::vector<BottomSeries> bottom;
    std::vector<std::string> fields;
    while (sales.next(fields)) {
        if (fields.size() != header.size()) sales.fail("expected " + std::to_string(header.size()) + " fields");
        BottomSeries s;
        s.id = fields[id_col];
        for (std::size_t a = 0; a < kAttributes.size(); ++a) {
            if (fields[attr_cols[a]].empty()) sales.fail("empty " + kAttributes[a]);
            s.attributes.emplace(kAttributes[a], fields[attr_cols[a]]);
        }
        s.train.reserve(n);
        s.test.reserve(h);
        for (std::size_t d = 0; d < n + h; ++d) {
            const double v = sales.number(fields[day_cols[d]], "sales value");
            (d < n ? s.train : s.test).push_back(v);
        }
        bottom.push_back(std::move(s));
    }

    LoadedData out;
    out.dataset = build_hierarchy(std::move(bottom), options.spec);

    // Week of every day in the price window.
    const std::size_t window = std::min(options.price_window, n);
    const std::size_t first_day = n - window;
    std::vector<std::string> week_of_day(window);
    {
        CsvReader calendar(calendar_path);
        std::vector<std::string> cal_header;
        if (!calendar.next(cal_header)) calendar.fail("empty calendar file");
        const auto d_col = column_of(cal_header, "d", calendar_path);
        const auto week_col = column_of(cal_header, "wm_yr_wk", calendar_path);
        while (calendar.next(fields)) {
            if (fields.size() <= std::max(d_col, week_col)) calendar.fail("short calendar row");
            const auto& d = fields[d_col];
            if (d.rfind("d_", 0) != 0) calendar.fail("bad day key '" + d + "'");
            const auto idx = static_cast<std::size_t>(calendar.number(d.substr(2), "day index"));
            if (idx >= first_day + 1 && idx <= n) {
                week_of_day[idx - 1 - first_day] = fields[week_col];
            }
        }
        for (std::size_t t = 0; t < window; ++t) {
            if (week_of_day[t].empty()) {
                throw DataError(calendar_path.string() + ": no week for day d_" + std::to_string(first_day + t + 1));
            }
        }
    }

    std::set<std::string> weeks(week_of_day.begin(), week_of_day.end());
    std::map<std::pair<std::string, std::string>, std::map<std::string, double>> price_of;
    {
        CsvReader prices(prices_path);
        std::vector<std::string> p_header;
        if (!prices.next(p_header)) prices.fail("empty price file");
        const auto store_col = column_of(p_header, "store_id", prices_path);
        const auto item_col = column_of(p_header, "item_id", prices_path);
        const auto week_col = column_of(p_header, "wm_yr_wk", prices_path);
        const auto price_col = column_of(p_header, "sell_price", prices_path);
        const auto width = std::max({store_col, item_col, week_col, price_col});
        while (prices.next(fields)) {
            if (fields.size() <= width) prices.fail("short price row");
            if (!weeks.count(fields[week_col])) continue;
            price_of[{fields[store_col], fields[item_col]}][fields[week_col]] = prices.number(fields[price_col], "price");
        }
    }

    PriceTable table;
    table.first_day = first_day;
    const auto& data = out.dataset;
    for (std::size_t b = 0; b < data.bottom_count(); ++b) {
        const auto& attrs = data.bottom_attributes(b);
        std::vector<double> daily(window, std::numeric_limits<double>::quiet_NaN());
        auto it = price_of.find({attrs.at("store_id"), attrs.at("item_id")});
        if (it != price_of.end()) {
            for (std::size_t t = 0; t < window; ++t) {
                auto w = it->second.find(week_of_day[t]);
                if (w != it->second.end()) daily[t] = w->second;
            }
        }
        table.prices.emplace(data.bottom()[b].id, std::move(daily));
    }
    out.prices = std::move(table);
    return out;
}

LoadedData load_long(const fs::path& sales_path, const std::optional<fs::path>& prices_path, const HierarchySpec& spec,
                     std::size_t horizon) {
    CsvReader sales(sales_path);
    std::vector<std::string> header;
    if (!sales.next(header)) sales.fail("empty sales file");
    const auto id_col = column_of(header, "series_id", sales_path);
    const auto date_col = column_of(header, "date", sales_path);
    const auto value_col = column_of(header, "value", sales_path);
    std::vector<std::size_t> attr_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c != id_col && c != date_col && c != value_col) attr_cols.push_back(c);
    }

    struct Pending {
        std::map<std::string, std::string> attributes;
        std::map<std::string, double> values;
    };
    std::vector<std::string> order;
    std::unordered_map<std::string, Pending> pending;
    std::set<std::string> dates;
    std::vector<std::string> fields;
    while (sales.next(fields)) {
        if (fields.size() != header.size()) sales.fail("expected " + std::to_string(header.size()) + " fields");
        const auto& id = fields[id_col];
        if (id.empty()) sales.fail("empty series_id");
        auto [it, inserted] = pending.try_emplace(id);
        if (inserted) {
            order.push_back(id);
            for (auto c : attr_cols) it->second.attributes.emplace(header[c], fields[c]);
        } else {
            for (auto c : attr_cols) {
                if (it->second.attributes.at(header[c]) != fields[c]) {
                    sales.fail("attribute '" + header[c] + "' of series '" + id + "' changes between rows");
                }
            }
        }
        const double v = sales.number(fields[value_col], "value");
        if (!it->second.values.emplace(fields[date_col], v).second) {
            sales.fail("duplicate date " + fields[date_col] + " for series '" + id + "'");
        }
        dates.insert(fields[date_col]);
    }
    if (horizon == 0 || horizon + 2 > dates.size()) {
        throw DataError(sales_path.string() + ": " + std::to_string(dates.size()) +
                        " dates cannot hold a test window of " + std::to_string(horizon) +
                        " and at least 2 training days");
    }
    const std::vector<std::string> date_list(dates.begin(), dates.end());
    const std::size_t n = date_list.size() - horizon;

    std::vector<BottomSeries> bottom;
    for (const auto& id : order) {
        auto& p = pending.at(id);
        BottomSeries s{id, std::move(p.attributes), {}, {}};
        for (std::size_t d = 0; d < date_list.size(); ++d) {
            auto it = p.values.find(date_list[d]);
            if (it == p.values.end()) {
                throw DataError(sales_path.string() + ": series '" + id + "' has no value for " + date_list[d]);
            }
            (d < n ? s.train : s.test).push_back(it->second);
        }
        bottom.push_back(std::move(s));
    }

    LoadedData out;
    out.dataset = build_hierarchy(std::move(bottom), spec);
    if (!prices_path) return out;

    std::unordered_map<std::string, std::size_t> train_day;
    for (std::size_t d = 0; d < n; ++d) train_day.emplace(date_list[d], d);

    CsvReader prices(*prices_path);
    if (!prices.next(header)) prices.fail("empty price file");
    const auto p_id = column_of(header, "series_id", *prices_path);
    const auto p_date = column_of(header, "date", *prices_path);
    const auto p_price = column_of(header, "price", *prices_path);
    PriceTable table;
    for (const auto& s : out.dataset.bottom()) {
        table.prices.emplace(s.id, std::vector<double>(n, std::numeric_limits<double>::quiet_NaN()));
    }
    std::size_t unknown = 0;
    while (prices.next(fields)) {
        if (fields.size() != header.size()) prices.fail("expected " + std::to_string(header.size()) + " fields");
        auto series = table.prices.find(fields[p_id]);
        auto day = train_day.find(fields[p_date]);
        if (series == table.prices.end()) {
            ++unknown;
            continue;
        }
        if (day == train_day.end()) continue; // test-period price
        series->second[day->second] = prices.number(fields[p_price], "price");
    }
    if (unknown > 0) {
        out.warnings.push_back(std::to_string(unknown) + " price rows refer to unknown series");
    }
    out.prices = std::move(table);
    return out;
}

ForecastSet load_forecast_csv(const fs::path& path, std::string method_id, std::size_t horizon) {
    CsvReader reader(path);
    std::vector<std::string> header;
    if (!reader.next(header)) reader.fail("empty forecast file");
    if (header.empty() || header[0] != "id") reader.fail("first column must be 'id'");
    if (header.size() < horizon + 1) {
        reader.fail("has " + std::to_string(header.size() - 1) + " forecast columns, horizon is " +
                    std::to_string(horizon));
    }
    for (std::size_t t = 1; t <= horizon; ++t) {
        if (header[t] != "F" + std::to_string(t)) reader.fail("expected column F" + std::to_string(t));
    }

    ForecastSet out{std::move(method_id), {}};
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        if (fields.size() != header.size()) reader.fail("expected " + std::to_string(header.size()) + " fields");
        std::vector<double> values;
        values.reserve(horizon);
        for (std::size_t t = 1; t <= horizon; ++t) {
            const double v = reader.number(fields[t], "forecast");
            if (!std::isfinite(v)) reader.fail("forecast is not finite");
            values.push_back(v);
        }
        if (!out.forecasts.emplace(fields[0], std::move(values)).second) {
            reader.fail("duplicate id '" + fields[0] + "'");
        }
    }
    return out;
}

std::vector<ForecastSet> load_forecast_manifest(const fs::path& manifest, std::size_t horizon) {
    CsvReader reader(manifest);
    std::vector<std::string> header;
    if (!reader.next(header)) reader.fail("empty manifest");
    const auto method_col = column_of(header, "method_id", manifest);
    const auto path_col = column_of(header, "path", manifest);
    std::vector<ForecastSet> out;
    std::set<std::string> seen;
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        if (fields.size() != header.size()) reader.fail("expected " + std::to_string(header.size()) + " fields");
        const auto& id = fields[method_col];
        if (!seen.insert(id).second) reader.fail("method '" + id + "' listed twice");
        fs::path file = fields[path_col];
        if (file.is_relative()) file = manifest.parent_path() / file;
        out.push_back(load_forecast_csv(file, id, horizon));
    }
    if (out.empty()) throw DataError(manifest.string() + ": no methods listed");
    return out;
}

ReferenceRanking load_reference(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::string> ids;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto id = split_csv_line(line).front();
        if (id.empty()) continue;
        if (first && (id == "method_id" || id == "method")) {
            first = false;
            continue;
        }
        first = false;
        ids.push_back(std::move(id));
    }
    try {
        return ReferenceRanking(std::move(ids));
    } catch (const std::invalid_argument& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_forecast_csv(const fs::path& path, const ForecastSet& forecast, const std::vector<std::string>& ids,
                        std::size_t horizon) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "id";
    for (std::size_t t = 1; t <= horizon; ++t) out << ",F" << t;
    out << '\n';
    char buf[64];
    for (const auto& id : ids) {
        const auto& values = forecast.forecasts.at(id);
        out << id;
        for (std::size_t t = 0; t < horizon; ++t) {
            auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), values[t]);
            out << ',' << std::string_view(buf, static_cast<std::size_t>(end - buf));
        }
        out << '\n';
    }
}

} // namespace rankstab::io
