#include "rankstab/report.hpp"

#include <algorithm>
#include <cstdio>

namespace rankstab::report {

using nlohmann::ordered_json;

namespace {

constexpr int kCsvDecimals = 4;

ordered_json optional_number(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json exclusions_json(const ExclusionCounts& counts) {
    ordered_json out = ordered_json::object();
    for (auto base : kBaseMeasures) out[std::string(to_string(base))] = counts[base];
    return out;
}

ordered_json stability_cells(const StabilityReport& report) {
    ordered_json cells = ordered_json::array();
    for (const auto& c : report.cells) {
        ordered_json per_split = ordered_json::array();
        for (const auto& v : c.per_split) per_split.push_back(optional_number(v));
        cells.push_back({{"measure", c.measure},
                         {"top_k", c.top_k},
                         {"mean", optional_number(c.mean)},
                         {"degenerate", c.degenerate},
                         {"per_split", std::move(per_split)}});
    }
    return cells;
}

ordered_json diagnostics_json(const std::vector<SplitDiagnostics>& diagnostics) {
    ordered_json out = ordered_json::array();
    for (const auto& d : diagnostics) {
        ordered_json failures = ordered_json::object();
        for (const auto& [measure, reason] : d.failures) failures[measure] = reason;
        out.push_back({{"split", d.index},
                       {"seed", d.seed},
                       {"excluded", {exclusions_json(d.exclusions[0]), exclusions_json(d.exclusions[1])}},
                       {"missing_prices", {d.missing_prices[0], d.missing_prices[1]}},
                       {"failures", std::move(failures)}});
    }
    return out;
}

} // namespace

std::string format_cell(const std::optional<double>& value, int decimals) {
    if (!value) return "*";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, *value);
    std::string s(buf);
    // "-0.00" reads as a sign where there is none.
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
    return s;
}

ordered_json to_json(const StabilityReport& report) {
    return {{"measures", report.measures},
            {"top_ks", report.top_ks},
            {"split_seeds", report.split_seeds},
            {"cells", stability_cells(report)},
            {"diagnostics", diagnostics_json(report.diagnostics)}};
}

ordered_json to_json(const std::vector<LevelStability>& levels) {
    ordered_json out = ordered_json::array();
    for (const auto& l : levels) {
        out.push_back({{"level", l.level},
                       {"name", l.level_name},
                       {"measures", l.report.measures},
                       {"top_ks", l.report.top_ks},
                       {"cells", stability_cells(l.report)}});
    }
    return out;
}

ordered_json to_json(const TemporalReport& report) {
    ordered_json overall = ordered_json::object();
    for (std::size_t m = 0; m < report.measures.size(); ++m) overall[report.measures[m]] = optional_number(report.overall[m]);
    ordered_json levels = ordered_json::array();
    for (std::size_t j = 0; j < report.per_level.size(); ++j) {
        ordered_json row = ordered_json::object();
        for (std::size_t m = 0; m < report.measures.size(); ++m) row[report.measures[m]] = optional_number(report.per_level[j][m]);
        levels.push_back({{"level", j + 1}, {"name", report.level_names[j]}, {"correlations", std::move(row)}});
    }
    ordered_json failures = ordered_json::object();
    for (const auto& [measure, reason] : report.failures) failures[measure] = reason;
    return {{"cut", report.cut},
            {"top_k", report.top_k},
            {"overall", std::move(overall)},
            {"per_level", std::move(levels)},
            {"failures", std::move(failures)}};
}

ordered_json to_json(const MagicResult& result) {
    ordered_json methods = ordered_json::array();
    for (std::size_t i = 0; i < result.methods.size(); ++i) {
        const auto& m = result.optimal[i];
        methods.push_back({{"method", result.methods[i]},
                           {"multiplier", m.multiplier},
                           {"score", m.score},
                           {"all_tied", m.all_tied}});
    }
    return {{"measure", result.measure},
            {"level", result.level},
            {"similarity", optional_number(result.similarity.value)},
            {"methods", std::move(methods)}};
}

ordered_json to_json(const SimilarityMatrix& matrix) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : matrix.cells) {
        ordered_json r = ordered_json::array();
        for (const auto& c : row) r.push_back(optional_number(c.value));
        rows.push_back(std::move(r));
    }
    return {{"measures", matrix.measures}, {"cells", std::move(rows)}};
}

ordered_json to_json(const std::vector<SweepCurve>& curves) {
    ordered_json out = ordered_json::array();
    for (const auto& c : curves) {
        ordered_json points = ordered_json::array();
        for (std::size_t i = 0; i < c.weights.size(); ++i) {
            points.push_back({{"w", c.weights[i]}, {"stability", optional_number(c.stability[i])}});
        }
        out.push_back({{"top_k", c.top_k}, {"points", std::move(points)}});
    }
    return out;
}

void write_stability_csv(std::ostream& out, const StabilityReport& report) {
    out << "measure";
    for (auto k : report.top_ks) out << ",top" << k;
    out << '\n';
    for (const auto& m : report.measures) {
        out << m;
        for (auto k : report.top_ks) out << ',' << format_cell(report.cell(m, k).mean, kCsvDecimals);
        out << '\n';
    }
}

void write_per_level_csv(std::ostream& out, const std::vector<LevelStability>& levels, std::size_t top_k) {
    if (levels.empty()) return;
    out << "level";
    for (const auto& m : levels.front().report.measures) out << ',' << m;
    out << '\n';
    for (const auto& l : levels) {
        out << l.level;
        for (const auto& m : l.report.measures) out << ',' << format_cell(l.report.cell(m, top_k).mean, kCsvDecimals);
        out << '\n';
    }
}

void write_temporal_overall_csv(std::ostream& out, const TemporalReport& report) {
    out << "measure,correlation\n";
    for (std::size_t m = 0; m < report.measures.size(); ++m) {
        out << report.measures[m] << ',' << format_cell(report.overall[m], kCsvDecimals) << '\n';
    }
}

void write_temporal_per_level_csv(std::ostream& out, const TemporalReport& report) {
    out << "level";
    for (const auto& m : report.measures) out << ',' << m;
    out << '\n';
    for (std::size_t j = 0; j < report.per_level.size(); ++j) {
        out << j + 1;
        for (const auto& v : report.per_level[j]) out << ',' << format_cell(v, kCsvDecimals);
        out << '\n';
    }
}

void write_magic_csv(std::ostream& out, const std::vector<MagicResult>& results) {
    std::vector<std::size_t> levels;
    std::vector<std::string> measures;
    for (const auto& r : results) {
        if (std::find(levels.begin(), levels.end(), r.level) == levels.end()) levels.push_back(r.level);
        if (std::find(measures.begin(), measures.end(), r.measure) == measures.end()) measures.push_back(r.measure);
    }
    out << "measure";
    for (auto l : levels) out << ",level" << l;
    out << '\n';
    for (const auto& m : measures) {
        out << m;
        for (auto l : levels) {
            auto it = std::find_if(results.begin(), results.end(),
                                   [&](const MagicResult& r) { return r.measure == m && r.level == l; });
            out << ',' << (it == results.end() ? std::string() : format_cell(it->similarity.value, kCsvDecimals));
        }
        out << '\n';
    }
}

void write_magic_multipliers_csv(std::ostream& out, const std::vector<MagicResult>& results) {
    out << "measure,level,method,multiplier,score,all_tied\n";
    char buf[64];
    for (const auto& r : results) {
        for (std::size_t i = 0; i < r.methods.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.6f,%.10g", r.optimal[i].multiplier, r.optimal[i].score);
            out << r.measure << ',' << r.level << ',' << r.methods[i] << ',' << buf << ','
                << (r.optimal[i].all_tied ? "true" : "false") << '\n';
        }
    }
}

void write_matrix_csv(std::ostream& out, const SimilarityMatrix& matrix) {
    out << "measure";
    for (const auto& m : matrix.measures) out << ',' << m;
    out << '\n';
    for (std::size_t a = 0; a < matrix.measures.size(); ++a) {
        out << matrix.measures[a];
        for (const auto& c : matrix.cells[a]) out << ',' << format_cell(c.value, kCsvDecimals);
        out << '\n';
    }
}

void write_sweep_csv(std::ostream& out, const SweepCurve& curve) {
    out << "w,stability\n";
    char buf[32];
    for (std::size_t i = 0; i < curve.weights.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.6g", curve.weights[i]);
        out << buf << ',' << format_cell(curve.stability[i], kCsvDecimals) << '\n';
    }
}

void print_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size(), 0);
    auto widen = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) width[c] = std::max(width[c], row[c].size());
    };
    widen(header);
    for (const auto& r : rows) widen(r);
    auto line = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) {
            if (c == 0) {
                out << row[c] << std::string(width[c] - row[c].size(), ' ');
            } else {
                out << "  " << std::string(width[c] - row[c].size(), ' ') << row[c];
            }
        }
        out << '\n';
    };
    line(header);
    std::size_t total = 0;
    for (auto w : width) total += w + 2;
    out << std::string(total >= 2 ? total - 2 : 0, '-') << '\n';
    for (const auto& r : rows) line(r);
}

} // namespace rankstab::report
