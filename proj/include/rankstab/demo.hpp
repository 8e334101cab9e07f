#pragma once

#include "rankstab/experiments.hpp"
#include "rankstab/forecast.hpp"
#include "rankstab/hierarchy.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace rankstab::demo {

/// Small retail-like hierarchy: 2 stores x 4 items, 60 training and 14 test
/// days, and six methods whose noise levels are strictly graded.
struct Fixture {
    HierarchySpec spec;
    std::vector<BottomSeries> bottom;
    std::vector<std::string> dates; // training then test days
    /// Daily prices over every date, per bottom id.
    std::vector<std::vector<double>> prices;
    std::vector<ForecastSet> forecasts; // best first
    std::size_t horizon = 14;
};

Fixture make_mini_fixture();

/// Benchmark over the fixture with prices over the training days.
Benchmark make_benchmark(const Fixture& fixture);

/// Writes sales.csv, prices.csv, forecasts/<method>.csv, manifest.csv,
/// reference.txt and config.json into `dir`.
void write_fixture(const Fixture& fixture, const std::filesystem::path& dir);

} // namespace rankstab::demo
