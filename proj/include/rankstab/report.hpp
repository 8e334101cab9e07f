#pragma once

#include "rankstab/experiments.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace rankstab::report {

/// Correlation cell as printed in tables: fixed decimals, "*" when degenerate.
std::string format_cell(const std::optional<double>& value, int decimals = 2);

nlohmann::ordered_json to_json(const StabilityReport& report);
nlohmann::ordered_json to_json(const std::vector<LevelStability>& levels);
nlohmann::ordered_json to_json(const TemporalReport& report);
nlohmann::ordered_json to_json(const MagicResult& result);
nlohmann::ordered_json to_json(const SimilarityMatrix& matrix);
nlohmann::ordered_json to_json(const std::vector<SweepCurve>& curves);

/// Rows = measures, columns = top-k.
void write_stability_csv(std::ostream& out, const StabilityReport& report);
/// Rows = levels, columns = measures, for the given top-k.
void write_per_level_csv(std::ostream& out, const std::vector<LevelStability>& levels, std::size_t top_k);
void write_temporal_overall_csv(std::ostream& out, const TemporalReport& report);
void write_temporal_per_level_csv(std::ostream& out, const TemporalReport& report);
/// Rows = measures, columns = levels.
void write_magic_csv(std::ostream& out, const std::vector<MagicResult>& results);
void write_magic_multipliers_csv(std::ostream& out, const std::vector<MagicResult>& results);
void write_matrix_csv(std::ostream& out, const SimilarityMatrix& matrix);
void write_sweep_csv(std::ostream& out, const SweepCurve& curve);

/// Aligned plain-text table for the terminal.
void print_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

} // namespace rankstab::report
