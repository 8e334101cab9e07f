#pragma once

#include "rankstab/experiments.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rankstab::app {

/// Malformed or inconsistent configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum ExitCode : int { kOk = 0, kValidationFailure = 1, kRuntimeFailure = 2 };

inline constexpr const char* kOutDirEnv = "RANKSTAB_OUT_DIR";

inline const std::vector<std::string> kExperiments = {"stability", "per-level", "total", "temporal",
                                                      "magic",     "sweep",     "matrix", "all"};

struct DatasetConfig {
    std::string format = "long"; // long | m5
    std::string sales;
    std::string prices;   // optional
    std::string calendar; // m5 only
    std::size_t horizon = 28;
    std::optional<std::size_t> train_length; // m5 only
};

struct MagicConfig {
    std::size_t grid_points = 500;
    double min = 0.0;
    double max = 2.0;
    std::vector<std::string> measures = {"MAE", "PRICE_RMSSE", "SMAPE"};
    /// Empty: the top and the bottom level.
    std::vector<std::size_t> levels;
    std::size_t top_k = 0;
};

struct SweepConfig {
    std::string measure = "PRICE_RMSSE";
    std::vector<double> weights = {0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
};

/// Everything one invocation needs. Paths are kept as written and resolved
/// against `base_dir` (the config file's folder).
struct RunConfig {
    std::filesystem::path base_dir;
    DatasetConfig dataset;
    /// "m5" or explicit levels.
    HierarchySpec hierarchy;
    bool hierarchy_is_m5 = false;
    std::size_t price_window = 28;
    bool scale_from_first_nonzero = false;
    std::string forecasts; // manifest
    std::string reference; // optional
    std::vector<std::string> measures;
    /// Applied to measures that do not spell their own summarization.
    std::string summarization;
    std::size_t n_splits = 76;
    std::uint64_t seed = 0;
    std::vector<std::size_t> top_ks;
    unsigned threads = 1;
    std::string experiment = "stability";
    std::optional<std::size_t> temporal_cut; // default h/2
    std::size_t temporal_top_k = 0;
    std::size_t matrix_top_k = 0;
    MagicConfig magic;
    SweepConfig sweep;
    std::string output_dir = "out";
    std::string format = "both"; // csv | json | both

    std::filesystem::path resolve(const std::string& path) const;
    /// Measures with the default summarization applied.
    std::vector<MeasureSpec> measure_specs() const;
};

/// Command-line values that win over the file.
struct Overrides {
    std::optional<std::string> experiment;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> splits;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<unsigned> threads;
};

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);
/// Flags first, then RANKSTAB_OUT_DIR for the output directory, then the file.
void apply_overrides(RunConfig& config, const Overrides& overrides);

/// Settings that determine results (no output location or thread count).
nlohmann::ordered_json effective_config(const RunConfig& config);
/// FNV-1a 64 of the effective config, as 16 hex digits.
std::string config_hash(const RunConfig& config);

struct Finding {
    enum class Severity { warning, fatal };
    Severity severity = Severity::warning;
    std::string message;
};

struct ValidationReport {
    std::vector<std::string> summary;
    std::vector<Finding> findings;

    bool ok() const;
};

struct LoadedBenchmark {
    Benchmark bench;
    std::vector<std::string> warnings;
};

/// Reads dataset, prices, forecasts and reference. Throws DataError.
LoadedBenchmark load_benchmark(const RunConfig& config);

/// Checks a loaded benchmark against the config.
ValidationReport validate(const RunConfig& config, const LoadedBenchmark& loaded);

int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_seed_demo(const std::filesystem::path& dir, std::ostream& out, std::ostream& err);

/// Runs the configured experiment(s) on a loaded benchmark and returns the
/// JSON report; CSV tables are appended to `tables` as (file name, content).
nlohmann::ordered_json run_experiments(const RunConfig& config, const Benchmark& bench,
                                       std::vector<std::pair<std::string, std::string>>& tables,
                                       std::ostream& out);

} // namespace rankstab::app
