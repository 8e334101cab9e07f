#pragma once

#include "rankstab/forecast.hpp"
#include "rankstab/hierarchy.hpp"
#include "rankstab/ranking.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rankstab::io {

/// Dataset plus the prices needed for dollar-sales weights.
struct LoadedData {
    HierarchicalDataset dataset;
    std::optional<PriceTable> prices;
    std::vector<std::string> warnings;
};

struct M5Options {
    std::size_t horizon = 28;
    /// Training days; defaults to all days before the last `horizon`.
    std::optional<std::size_t> train_length;
    /// Trailing training days covered by the price table.
    std::size_t price_window = 28;
    HierarchySpec spec = HierarchySpec::m5();
};

/// Reads the public M5 files: wide sales (id, item_id, dept_id, cat_id,
/// store_id, state_id, d_1..d_T), calendar (d -> wm_yr_wk) and sell prices
/// keyed by (store_id, item_id, wm_yr_wk).
LoadedData load_m5(const std::filesystem::path& sales, const std::filesystem::path& prices,
                   const std::filesystem::path& calendar, const M5Options& options = {});

/// Reads a long CSV with columns series_id, <attributes...>, date, value.
/// Dates sort lexicographically; the last `horizon` dates form the test window.
/// The optional price file has columns series_id, date, price.
LoadedData load_long(const std::filesystem::path& sales, const std::optional<std::filesystem::path>& prices,
                     const HierarchySpec& spec, std::size_t horizon);

/// One forecast file in the M5 submission layout: id, F1..Fm (m >= horizon).
ForecastSet load_forecast_csv(const std::filesystem::path& path, std::string method_id, std::size_t horizon);

/// Manifest with columns method_id, path; paths resolve against the manifest's folder.
std::vector<ForecastSet> load_forecast_manifest(const std::filesystem::path& manifest, std::size_t horizon);

/// One method id per line, best first. A leading "method_id" header is skipped.
ReferenceRanking load_reference(const std::filesystem::path& path);

void write_forecast_csv(const std::filesystem::path& path, const ForecastSet& forecast,
                        const std::vector<std::string>& ids, std::size_t horizon);

/// Splits one CSV record; double quotes group fields containing commas.
std::vector<std::string> split_csv_line(const std::string& line);

} // namespace rankstab::io
