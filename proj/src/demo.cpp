#include "rankstab/demo.hpp"

#include "rankstab/io.hpp"
#include "rankstab/rng.hpp"

#include "json.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

namespace rankstab::demo {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kTrainDays = 60;
constexpr std::size_t kTestDays = 14;
constexpr std::uint64_t kFixtureSeed = 0x5EED2024ULL;

// ISO dates from 2024-01-01 on.
std::string iso_date(std::size_t offset) {
    static constexpr std::array<int, 12> kMonthDays = {31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int month = 0;
    auto day = static_cast<int>(offset);
    while (day >= kMonthDays[static_cast<std::size_t>(month)]) {
        day -= kMonthDays[static_cast<std::size_t>(month)];
        ++month;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "2024-%02d-%02d", month + 1, day + 1);
    return buf;
}

int poisson(RandomEngine& rng, double lambda) {
    const double limit = std::exp(-lambda);
    double p = 1.0;
    int k = -1;
    do {
        ++k;
        p *= uniform_unit(rng);
    } while (p > limit);
    return k;
}

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

std::string number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

} // namespace

Fixture make_mini_fixture() {
    Fixture fx;
    fx.horizon = kTestDays;
    fx.spec = HierarchySpec(std::vector<LevelSpec>{
        {"total", {}}, {"store", {"store_id"}}, {"store_item", {"store_id", "item_id"}}});
    for (std::size_t d = 0; d < kTrainDays + kTestDays; ++d) fx.dates.push_back(iso_date(d));

    static constexpr std::array<const char*, 2> kStores = {"S1", "S2"};
    static constexpr std::array<const char*, 4> kItems = {"I1", "I2", "I3", "I4"};
    static constexpr std::array<double, 4> kRate = {0.4, 1.5, 4.0, 9.0};
    static constexpr std::array<double, 2> kStoreFactor = {1.0, 1.6};
    static constexpr std::array<double, 7> kWeekday = {1.0, 0.9, 0.9, 1.0, 1.2, 1.5, 1.4};
    static constexpr std::array<double, 4> kPrice = {2.5, 4.0, 1.25, 9.99};

    RandomEngine rng(kFixtureSeed);
    for (std::size_t s = 0; s < kStores.size(); ++s) {
        for (std::size_t i = 0; i < kItems.size(); ++i) {
            BottomSeries series;
            series.id = std::string(kStores[s]) + "_" + kItems[i];
            series.attributes = {{"store_id", kStores[s]}, {"item_id", kItems[i]}};
            std::vector<double> price;
            for (std::size_t d = 0; d < fx.dates.size(); ++d) {
                const double lambda = kRate[i] * kStoreFactor[s] * kWeekday[d % 7];
                const double units = poisson(rng, lambda);
                (d < kTrainDays ? series.train : series.test).push_back(units);
                // I2 goes on promotion from day 45.
                double p = kPrice[i] * (s == 0 ? 1.0 : 1.05);
                if (i == 1 && d >= 45) p *= 0.8;
                price.push_back(std::round(p * 100.0) / 100.0);
            }
            fx.bottom.push_back(std::move(series));
            fx.prices.push_back(std::move(price));
        }
    }

    static constexpr std::array<const char*, 6> kMethods = {"sharp", "good", "fair", "rough", "poor", "wild"};
    static constexpr std::array<double, 6> kNoise = {0.5, 1.0, 2.0, 3.0, 5.0, 8.0};
    for (std::size_t m = 0; m < kMethods.size(); ++m) {
        ForecastSet f{kMethods[m], {}};
        for (const auto& series : fx.bottom) {
            std::vector<double> values;
            for (double y : series.test) {
                const double z = 2.0 * uniform_unit(rng) - 1.0;
                values.push_back(round3(std::max(0.0, y + kNoise[m] * z)));
            }
            f.forecasts.emplace(series.id, std::move(values));
        }
        fx.forecasts.push_back(std::move(f));
    }
    return fx;
}

Benchmark make_benchmark(const Fixture& fixture) {
    Benchmark bench;
    bench.dataset = build_hierarchy(fixture.bottom, fixture.spec);
    PriceTable table;
    for (std::size_t b = 0; b < fixture.bottom.size(); ++b) {
        const auto& p = fixture.prices[b];
        table.prices.emplace(fixture.bottom[b].id, std::vector<double>(p.begin(), p.begin() + kTrainDays));
    }
    bench.prices = std::move(table);
    bench.forecasts = fixture.forecasts;
    std::vector<std::string> ids;
    for (const auto& f : fixture.forecasts) ids.push_back(f.method_id);
    bench.reference = ReferenceRanking(std::move(ids));
    return bench;
}

void write_fixture(const Fixture& fx, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir / "forecasts", ec);
    if (ec) throw DataError("cannot create " + (dir / "forecasts").string() + ": " + ec.message());

    auto open = [](const fs::path& path) {
        std::ofstream out(path);
        if (!out) throw DataError("cannot write " + path.string());
        return out;
    };

    {
        auto out = open(dir / "sales.csv");
        out << "series_id,store_id,item_id,date,value\n";
        for (const auto& s : fx.bottom) {
            for (std::size_t d = 0; d < fx.dates.size(); ++d) {
                const double v = d < s.train.size() ? s.train[d] : s.test[d - s.train.size()];
                out << s.id << ',' << s.attributes.at("store_id") << ',' << s.attributes.at("item_id") << ','
                    << fx.dates[d] << ',' << number(v) << '\n';
            }
        }
    }
    {
        auto out = open(dir / "prices.csv");
        out << "series_id,date,price\n";
        for (std::size_t b = 0; b < fx.bottom.size(); ++b) {
            for (std::size_t d = 0; d < fx.dates.size(); ++d) {
                out << fx.bottom[b].id << ',' << fx.dates[d] << ',' << number(fx.prices[b][d]) << '\n';
            }
        }
    }

    std::vector<std::string> ids;
    for (const auto& s : fx.bottom) ids.push_back(s.id);
    {
        auto manifest = open(dir / "manifest.csv");
        auto reference = open(dir / "reference.txt");
        manifest << "method_id,path\n";
        reference << "method_id\n";
        for (const auto& f : fx.forecasts) {
            const auto rel = fs::path("forecasts") / (f.method_id + ".csv");
            io::write_forecast_csv(dir / rel, f, ids, fx.horizon);
            manifest << f.method_id << ',' << rel.generic_string() << '\n';
            reference << f.method_id << '\n';
        }
    }

    nlohmann::ordered_json levels = nlohmann::ordered_json::array();
    for (const auto& l : fx.spec.levels()) levels.push_back({{"name", l.name}, {"keys", l.keys}});
    const nlohmann::ordered_json config = {
        {"dataset", {{"format", "long"}, {"sales", "sales.csv"}, {"prices", "prices.csv"}, {"horizon", fx.horizon}}},
        {"hierarchy", {{"levels", levels}}},
        {"price_window", 28},
        {"forecasts", "manifest.csv"},
        {"reference", "reference.txt"},
        {"measures", {"MAE", "MASE", "RMSSE", "SMAPE", "WAPE", "PRICE_MAE", "PRICE_MASE", "PRICE_RMSSE", "PRICE_SMAPE"}},
        {"n_splits", 8},
        {"seed", 20240101},
        {"top_ks", {3, 6}},
        {"threads", 1},
        {"temporal", {{"cut", 7}}},
        {"magic", {{"grid_points", 500}, {"min", 0.0}, {"max", 2.0}, {"measures", {"MAE", "PRICE_RMSSE", "SMAPE"}}}},
        {"sweep", {{"measure", "PRICE_RMSSE"}, {"weights", {0.0, 0.05, 0.1, 0.25, 0.5, 0.75, 1.0}}}},
        {"experiment", "all"},
        {"output_dir", "out"},
        {"format", "both"},
    };
    auto out = open(dir / "config.json");
    out << config.dump(2) << '\n';
}

} // namespace rankstab::demo
