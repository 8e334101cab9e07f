#include "rankstab/app.hpp"

#include "rankstab/demo.hpp"
#include "rankstab/io.hpp"
#include "rankstab/report.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace rankstab::app {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <class T>
T get_as(const json& node, const std::string& key) {
    try {
        return node.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

void reject_unknown(const json& node, const std::string& where, std::initializer_list<const char*> known) {
    for (const auto& [key, value] : node.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
            throw ConfigError("unknown config key '" + where + key + "'");
        }
    }
}

std::uint64_t parse_seed(const json& node) {
    if (node.is_number_unsigned()) return node.get<std::uint64_t>();
    if (node.is_string()) {
        const auto s = node.get<std::string>();
        std::uint64_t v = 0;
        const auto* end = s.data() + s.size();
        auto [ptr, ec] = std::from_chars(s.data(), end, v);
        if (ec == std::errc() && ptr == end && !s.empty()) return v;
    }
    throw ConfigError("config key 'seed' must be an unsigned 64-bit integer");
}

HierarchySpec parse_hierarchy(const json& node, bool& is_m5) {
    is_m5 = false;
    if (node.is_string()) {
        if (node.get<std::string>() != "m5") throw ConfigError("hierarchy must be \"m5\" or {\"levels\": [...]}");
        is_m5 = true;
        return HierarchySpec::m5();
    }
    if (!node.is_object() || !node.contains("levels") || !node["levels"].is_array()) {
        throw ConfigError("hierarchy must be \"m5\" or {\"levels\": [...]}");
    }
    reject_unknown(node, "hierarchy.", {"levels"});
    std::vector<LevelSpec> levels;
    for (const auto& l : node["levels"]) {
        if (!l.is_object()) throw ConfigError("hierarchy.levels entries must be objects with name and keys");
        reject_unknown(l, "hierarchy.levels[].", {"name", "keys"});
        LevelSpec spec;
        spec.name = get_as<std::string>(l.value("name", json("")), "hierarchy.levels[].name");
        if (l.contains("keys")) spec.keys = get_as<std::vector<std::string>>(l["keys"], "hierarchy.levels[].keys");
        levels.push_back(std::move(spec));
    }
    try {
        return HierarchySpec(std::move(levels));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("hierarchy: ") + e.what());
    }
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool wants_prices(const std::vector<MeasureSpec>& measures) {
    return std::any_of(measures.begin(), measures.end(),
                       [](const MeasureSpec& m) { return m.weighting == Weighting::price; });
}

std::vector<std::string> names_of(const std::vector<MeasureSpec>& measures) {
    std::vector<std::string> out;
    for (const auto& m : measures) out.push_back(m.name());
    return out;
}

SplitOptions split_options(const RunConfig& config) {
    SplitOptions o;
    o.n_splits = config.n_splits;
    o.seed = config.seed;
    o.top_ks = config.top_ks;
    o.threads = config.threads;
    return o;
}

std::size_t temporal_cut(const RunConfig& config, std::size_t horizon) {
    return config.temporal_cut.value_or(horizon / 2);
}

std::vector<std::size_t> magic_levels(const RunConfig& config, const HierarchicalDataset& data) {
    if (!config.magic.levels.empty()) return config.magic.levels;
    if (data.num_levels() == 1) return {1};
    return {1, data.num_levels()};
}

std::string csv_text(const std::string& hash, const std::function<void(std::ostream&)>& body) {
    std::ostringstream s;
    s << "# config_hash=" << hash << '\n';
    body(s);
    return s.str();
}

void print_stability(std::ostream& out, const std::string& title, const StabilityReport& report) {
    out << title << '\n';
    std::vector<std::string> header = {"measure"};
    for (auto k : report.top_ks) header.push_back("top" + std::to_string(k));
    std::vector<std::vector<std::string>> rows;
    for (const auto& m : report.measures) {
        std::vector<std::string> row = {m};
        for (auto k : report.top_ks) row.push_back(report::format_cell(report.cell(m, k).mean));
        rows.push_back(std::move(row));
    }
    report::print_table(out, header, rows);
}

// Degenerate splits and per-split failures, so nothing is dropped silently.
void print_conditions(std::ostream& out, const StabilityReport& report) {
    for (const auto& c : report.cells) {
        if (c.degenerate > 0) {
            out << "  note: " << c.measure << " top" << c.top_k << ": " << c.degenerate << " of "
                << c.per_split.size() << " splits degenerate (*)\n";
        }
    }
    std::map<std::string, std::size_t> failures;
    std::array<std::size_t, kNumBaseMeasures> excluded{};
    for (const auto& d : report.diagnostics) {
        for (const auto& [measure, reason] : d.failures) ++failures[measure + ": " + reason];
        for (std::size_t h = 0; h < 2; ++h) {
            for (std::size_t b = 0; b < kNumBaseMeasures; ++b) excluded[b] += d.exclusions[h].by_measure[b];
        }
    }
    for (const auto& [what, n] : failures) out << "  note: " << what << " (" << n << " splits)\n";
    for (auto base : kBaseMeasures) {
        const auto n = excluded[static_cast<std::size_t>(base)];
        if (n > 0) out << "  note: " << to_string(base) << ": " << n << " zero-scale series excluded across splits\n";
    }
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

} // namespace

fs::path RunConfig::resolve(const std::string& path) const {
    const fs::path p(path);
    return p.is_absolute() ? p : base_dir / p;
}

std::vector<MeasureSpec> RunConfig::measure_specs() const {
    std::vector<MeasureSpec> out;
    if (measures.empty()) {
        out = default_measures();
        if (!summarization.empty()) {
            for (auto& m : out) m = MeasureSpec::parse(m.canonical() + "/" + summarization);
        }
        return out;
    }
    for (const auto& text : measures) {
        try {
            if (!summarization.empty() && text.find('/') == std::string::npos) {
                out.push_back(MeasureSpec::parse(text + "/" + summarization));
            } else {
                out.push_back(MeasureSpec::parse(text));
            }
        } catch (const std::exception& e) {
            throw ConfigError("measure '" + text + "': " + e.what());
        }
    }
    return out;
}

RunConfig parse_config(const std::string& text, const fs::path& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(root, "", {"dataset", "hierarchy", "price_window", "scale_from_first_nonzero", "forecasts",
                              "reference", "measures", "summarization", "n_splits", "seed", "top_ks", "threads",
                              "experiment", "temporal", "matrix", "magic", "sweep", "output_dir", "format"});

    RunConfig c;
    c.base_dir = base_dir;

    if (!root.contains("dataset") || !root["dataset"].is_object()) throw ConfigError("config needs a 'dataset' object");
    const auto& ds = root["dataset"];
    reject_unknown(ds, "dataset.", {"format", "sales", "prices", "calendar", "horizon", "train_length"});
    c.dataset.format = get_as<std::string>(ds.value("format", json("long")), "dataset.format");
    if (c.dataset.format != "long" && c.dataset.format != "m5") throw ConfigError("dataset.format must be long or m5");
    if (!ds.contains("sales")) throw ConfigError("dataset.sales is required");
    c.dataset.sales = get_as<std::string>(ds["sales"], "dataset.sales");
    if (ds.contains("prices")) c.dataset.prices = get_as<std::string>(ds["prices"], "dataset.prices");
    if (ds.contains("calendar")) c.dataset.calendar = get_as<std::string>(ds["calendar"], "dataset.calendar");
    if (ds.contains("horizon")) c.dataset.horizon = get_as<std::size_t>(ds["horizon"], "dataset.horizon");
    if (ds.contains("train_length")) c.dataset.train_length = get_as<std::size_t>(ds["train_length"], "dataset.train_length");
    if (c.dataset.format == "m5" && (c.dataset.prices.empty() || c.dataset.calendar.empty())) {
        throw ConfigError("dataset.format m5 needs sales, prices and calendar");
    }

    if (root.contains("hierarchy")) {
        c.hierarchy = parse_hierarchy(root["hierarchy"], c.hierarchy_is_m5);
    } else if (c.dataset.format == "m5") {
        c.hierarchy = HierarchySpec::m5();
        c.hierarchy_is_m5 = true;
    } else {
        throw ConfigError("config needs a 'hierarchy'");
    }

    if (root.contains("price_window")) c.price_window = get_as<std::size_t>(root["price_window"], "price_window");
    if (root.contains("scale_from_first_nonzero")) {
        c.scale_from_first_nonzero = get_as<bool>(root["scale_from_first_nonzero"], "scale_from_first_nonzero");
    }
    if (!root.contains("forecasts")) throw ConfigError("config needs 'forecasts' (a manifest path)");
    c.forecasts = get_as<std::string>(root["forecasts"], "forecasts");
    if (root.contains("reference")) c.reference = get_as<std::string>(root["reference"], "reference");
    if (root.contains("measures")) c.measures = get_as<std::vector<std::string>>(root["measures"], "measures");
    if (root.contains("summarization")) c.summarization = get_as<std::string>(root["summarization"], "summarization");
    if (root.contains("n_splits")) c.n_splits = get_as<std::size_t>(root["n_splits"], "n_splits");
    if (root.contains("seed")) c.seed = parse_seed(root["seed"]);
    if (root.contains("top_ks")) c.top_ks = get_as<std::vector<std::size_t>>(root["top_ks"], "top_ks");
    if (root.contains("threads")) c.threads = get_as<unsigned>(root["threads"], "threads");
    if (root.contains("experiment")) c.experiment = get_as<std::string>(root["experiment"], "experiment");
    if (root.contains("temporal")) {
        const auto& t = root["temporal"];
        reject_unknown(t, "temporal.", {"cut", "top_k"});
        if (t.contains("cut")) c.temporal_cut = get_as<std::size_t>(t["cut"], "temporal.cut");
        if (t.contains("top_k")) c.temporal_top_k = get_as<std::size_t>(t["top_k"], "temporal.top_k");
    }
    if (root.contains("matrix")) {
        const auto& m = root["matrix"];
        reject_unknown(m, "matrix.", {"top_k"});
        if (m.contains("top_k")) c.matrix_top_k = get_as<std::size_t>(m["top_k"], "matrix.top_k");
    }
    if (root.contains("magic")) {
        const auto& m = root["magic"];
        reject_unknown(m, "magic.", {"grid_points", "min", "max", "measures", "levels", "top_k"});
        if (m.contains("grid_points")) c.magic.grid_points = get_as<std::size_t>(m["grid_points"], "magic.grid_points");
        if (m.contains("min")) c.magic.min = get_as<double>(m["min"], "magic.min");
        if (m.contains("max")) c.magic.max = get_as<double>(m["max"], "magic.max");
        if (m.contains("measures")) c.magic.measures = get_as<std::vector<std::string>>(m["measures"], "magic.measures");
        if (m.contains("levels")) c.magic.levels = get_as<std::vector<std::size_t>>(m["levels"], "magic.levels");
        if (m.contains("top_k")) c.magic.top_k = get_as<std::size_t>(m["top_k"], "magic.top_k");
    }
    if (root.contains("sweep")) {
        const auto& s = root["sweep"];
        reject_unknown(s, "sweep.", {"measure", "weights"});
        if (s.contains("measure")) c.sweep.measure = get_as<std::string>(s["measure"], "sweep.measure");
        if (s.contains("weights")) c.sweep.weights = get_as<std::vector<double>>(s["weights"], "sweep.weights");
    }
    if (root.contains("output_dir")) c.output_dir = get_as<std::string>(root["output_dir"], "output_dir");
    if (root.contains("format")) c.format = get_as<std::string>(root["format"], "format");

    // Invariants that need no data.
    if (std::find(kExperiments.begin(), kExperiments.end(), c.experiment) == kExperiments.end()) {
        throw ConfigError("unknown experiment '" + c.experiment + "'");
    }
    if (c.format != "csv" && c.format != "json" && c.format != "both") {
        throw ConfigError("format must be csv, json or both");
    }
    if (c.dataset.horizon == 0) throw ConfigError("dataset.horizon must be positive");
    if (c.n_splits == 0) throw ConfigError("n_splits must be positive");
    if (c.threads == 0) throw ConfigError("threads must be positive");
    if (!std::is_sorted(c.top_ks.begin(), c.top_ks.end()) ||
        std::adjacent_find(c.top_ks.begin(), c.top_ks.end()) != c.top_ks.end()) {
        throw ConfigError("top_ks must be strictly ascending");
    }
    if (c.magic.grid_points == 0 || !(c.magic.min <= c.magic.max)) {
        throw ConfigError("magic grid needs grid_points >= 1 and min <= max");
    }
    if (c.sweep.weights.empty()) throw ConfigError("sweep.weights must not be empty");
    for (double w : c.sweep.weights) {
        if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("sweep.weights must lie in [0, 1]");
    }
    if (std::adjacent_find(c.sweep.weights.begin(), c.sweep.weights.end(), std::greater_equal<>()) !=
        c.sweep.weights.end()) {
        throw ConfigError("sweep.weights must be strictly increasing");
    }
    c.measure_specs(); // parse errors surface now
    for (const auto& m : c.magic.measures) {
        try {
            MeasureSpec::parse(m);
        } catch (const std::exception& e) {
            throw ConfigError("magic measure '" + m + "': " + e.what());
        }
    }
    try {
        MeasureSpec::parse(c.sweep.measure);
    } catch (const std::exception& e) {
        throw ConfigError("sweep measure '" + c.sweep.measure + "': " + e.what());
    }
    return c;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    auto base = path.parent_path();
    if (base.empty()) base = ".";
    return parse_config(buf.str(), base);
}

void apply_overrides(RunConfig& config, const Overrides& o) {
    if (o.experiment) {
        if (std::find(kExperiments.begin(), kExperiments.end(), *o.experiment) == kExperiments.end()) {
            throw ConfigError("unknown experiment '" + *o.experiment + "'");
        }
        config.experiment = *o.experiment;
    }
    if (o.seed) config.seed = *o.seed;
    if (o.splits) {
        if (*o.splits == 0) throw ConfigError("--splits must be positive");
        config.n_splits = *o.splits;
    }
    if (o.format) {
        if (*o.format != "csv" && *o.format != "json" && *o.format != "both") {
            throw ConfigError("--format must be csv, json or both");
        }
        config.format = *o.format;
    }
    if (o.threads) {
        if (*o.threads == 0) throw ConfigError("--threads must be positive");
        config.threads = *o.threads;
    }
    if (o.out) {
        config.output_dir = fs::absolute(*o.out).string();
    } else if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
        config.output_dir = fs::absolute(env).string();
    }
}

ordered_json effective_config(const RunConfig& c) {
    ordered_json levels = ordered_json::array();
    for (const auto& l : c.hierarchy.levels()) levels.push_back({{"name", l.name}, {"keys", l.keys}});
    ordered_json dataset = {{"format", c.dataset.format},
                            {"sales", c.dataset.sales},
                            {"prices", c.dataset.prices},
                            {"calendar", c.dataset.calendar},
                            {"horizon", c.dataset.horizon},
                            {"train_length", c.dataset.train_length ? ordered_json(*c.dataset.train_length)
                                                                    : ordered_json(nullptr)}};
    return {{"dataset", std::move(dataset)},
            {"hierarchy", std::move(levels)},
            {"price_window", c.price_window},
            {"scale_from_first_nonzero", c.scale_from_first_nonzero},
            {"forecasts", c.forecasts},
            {"reference", c.reference},
            {"measures", names_of(c.measure_specs())},
            {"n_splits", c.n_splits},
            {"seed", c.seed},
            {"top_ks", c.top_ks},
            {"experiment", c.experiment},
            {"temporal", {{"cut", c.temporal_cut ? ordered_json(*c.temporal_cut) : ordered_json(nullptr)},
                          {"top_k", c.temporal_top_k}}},
            {"matrix", {{"top_k", c.matrix_top_k}}},
            {"magic", {{"grid_points", c.magic.grid_points},
                       {"min", c.magic.min},
                       {"max", c.magic.max},
                       {"measures", c.magic.measures},
                       {"levels", c.magic.levels},
                       {"top_k", c.magic.top_k}}},
            {"sweep", {{"measure", c.sweep.measure}, {"weights", c.sweep.weights}}}};
}

std::string config_hash(const RunConfig& config) { return fnv1a_hex(effective_config(config).dump()); }

bool ValidationReport::ok() const {
    return std::none_of(findings.begin(), findings.end(),
                        [](const Finding& f) { return f.severity == Finding::Severity::fatal; });
}

LoadedBenchmark load_benchmark(const RunConfig& config) {
    LoadedBenchmark out;
    io::LoadedData data;
    if (config.dataset.format == "m5") {
        io::M5Options options;
        options.horizon = config.dataset.horizon;
        options.train_length = config.dataset.train_length;
        options.price_window = config.price_window;
        options.spec = config.hierarchy;
        data = io::load_m5(config.resolve(config.dataset.sales), config.resolve(config.dataset.prices),
                           config.resolve(config.dataset.calendar), options);
    } else {
        std::optional<fs::path> prices;
        if (!config.dataset.prices.empty()) prices = config.resolve(config.dataset.prices);
        data = io::load_long(config.resolve(config.dataset.sales), prices, config.hierarchy, config.dataset.horizon);
    }
    out.bench.dataset = std::move(data.dataset);
    out.bench.prices = std::move(data.prices);
    out.warnings = std::move(data.warnings);
    out.bench.price_window = config.price_window;
    out.bench.evaluation.scale_from_first_nonzero = config.scale_from_first_nonzero;
    out.bench.forecasts = io::load_forecast_manifest(config.resolve(config.forecasts), config.dataset.horizon);
    if (!config.reference.empty()) out.bench.reference = io::load_reference(config.resolve(config.reference));
    return out;
}

ValidationReport validate(const RunConfig& config, const LoadedBenchmark& loaded) {
    ValidationReport r;
    const auto& bench = loaded.bench;
    const auto& data = bench.dataset;
    auto fatal = [&](std::string m) { r.findings.push_back({Finding::Severity::fatal, std::move(m)}); };
    auto warn = [&](std::string m) { r.findings.push_back({Finding::Severity::warning, std::move(m)}); };

    r.summary.push_back("levels: " + std::to_string(data.num_levels()));
    r.summary.push_back("bottom series: " + std::to_string(data.bottom_count()));
    r.summary.push_back("total series: " + std::to_string(data.size()));
    for (std::size_t j = 1; j <= data.num_levels(); ++j) {
        r.summary.push_back("  level " + std::to_string(j) + " (" + data.spec().level(j).name +
                            "): " + std::to_string(data.level_size(j)));
    }
    r.summary.push_back("training days: " + std::to_string(data.train_length()) +
                        ", horizon: " + std::to_string(data.horizon()));
    r.summary.push_back("methods: " + std::to_string(bench.forecasts.size()));
    for (const auto& w : loaded.warnings) warn(w);

    // Forecast coverage.
    std::set<std::string> method_ids;
    for (const auto& f : bench.forecasts) {
        if (!method_ids.insert(f.method_id).second) fatal("duplicate method id '" + f.method_id + "'");
        for (const auto& s : data.bottom()) {
            auto it = f.forecasts.find(s.id);
            if (it == f.forecasts.end()) {
                fatal("method '" + f.method_id + "': no forecast for series '" + s.id + "'");
                continue;
            }
            const auto& v = it->second;
            if (v.size() < data.horizon()) {
                fatal("method '" + f.method_id + "': series '" + s.id + "' has " + std::to_string(v.size()) +
                      " values, horizon is " + std::to_string(data.horizon()));
            } else if (std::any_of(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(data.horizon()),
                                   [](double x) { return !std::isfinite(x); })) {
                fatal("method '" + f.method_id + "': series '" + s.id + "' has a non-finite forecast");
            } else if (std::any_of(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(data.horizon()),
                                   [](double x) { return x < 0.0; })) {
                warn("method '" + f.method_id + "': series '" + s.id + "' has negative forecasts (scored as given)");
            }
        }
        std::size_t extra = 0;
        for (const auto& [id, v] : f.forecasts) {
            if (!data.find(id) || *data.find(id) < data.level_begin(data.num_levels())) ++extra;
        }
        if (extra > 0) {
            warn("method '" + f.method_id + "': " + std::to_string(extra) + " forecast ids not in the bottom level (ignored)");
        }
    }
    if (bench.forecasts.size() < 2) fatal("at least two methods are needed to rank");

    // Zero-scale census.
    std::size_t flat = 0;
    std::size_t zero_test = 0;
    for (const auto& s : data.series()) {
        const auto scale = naive_scale(s.train, config.scale_from_first_nonzero);
        if (scale.abs_diff == 0.0) ++flat;
        if (std::all_of(s.test.begin(), s.test.end(), [](double y) { return y == 0.0; })) ++zero_test;
    }
    r.summary.push_back("zero-scale series: MASE/RMSSE " + std::to_string(flat) + ", WAPE " + std::to_string(zero_test));
    if (flat > 0) warn(std::to_string(flat) + " series have a constant history and are excluded from MASE/RMSSE");
    if (zero_test > 0) warn(std::to_string(zero_test) + " series have all-zero test actuals and are excluded from WAPE");

    // Prices.
    const auto measures = config.measure_specs();
    std::vector<MeasureSpec> all = measures;
    for (const auto& m : config.magic.measures) all.push_back(MeasureSpec::parse(m));
    all.push_back(MeasureSpec::parse(config.sweep.measure));
    if (bench.prices) {
        try {
            const auto w = compute_price_weights(data, *bench.prices, bench.price_window);
            r.summary.push_back("price window: " + std::to_string(bench.price_window) + " days");
            if (w.missing_prices > 0) {
                warn(std::to_string(w.missing_prices) + " sold (series, day) cells lack a price and count as zero sales");
            }
        } catch (const std::exception& e) {
            fatal(std::string("price weights: ") + e.what());
        }
    } else if (wants_prices(all)) {
        fatal("price-weighted measures requested but no prices configured");
    }

    // Reference and subsets.
    const auto reference = bench.effective_reference();
    for (const auto& m : reference.methods) {
        if (!method_ids.count(m)) fatal("reference method '" + m + "' has no forecasts");
    }
    if (!bench.reference.methods.empty()) {
        for (const auto& f : bench.forecasts) {
            const auto& ref = bench.reference.methods;
            if (std::find(ref.begin(), ref.end(), f.method_id) == ref.end()) {
                warn("method '" + f.method_id + "' is not in the reference and is left out of top-K subsets");
            }
        }
    }
    for (auto k : config.top_ks) {
        if (k < 2 || k > reference.methods.size()) {
            fatal("top_k " + std::to_string(k) + " must lie in [2, " + std::to_string(reference.methods.size()) + "]");
        }
    }
    for (auto k : {config.temporal_top_k, config.matrix_top_k, config.magic.top_k}) {
        if (k != 0 && (k < 2 || k > reference.methods.size())) fatal("top_k " + std::to_string(k) + " out of range");
    }
    const auto cut = temporal_cut(config, data.horizon());
    if (cut < 1 || cut >= data.horizon()) {
        fatal("temporal cut " + std::to_string(cut) + " must lie in [1, " + std::to_string(data.horizon() - 1) + "]");
    }
    for (auto l : config.magic.levels) {
        if (l < 1 || l > data.num_levels()) fatal("magic level " + std::to_string(l) + " out of range");
    }
    for (const auto& m : all) {
        if (m.summarization.kind == Summarization::Kind::single_level &&
            (m.summarization.level < 1 || m.summarization.level > data.num_levels())) {
            fatal("measure '" + m.name() + "' reads a level the hierarchy does not have");
        }
    }
    if (data.bottom_count() < 2 && config.experiment != "temporal" && config.experiment != "magic" &&
        config.experiment != "matrix") {
        fatal("cross-sectional splits need at least two bottom series");
    }
    return r;
}

ordered_json run_experiments(const RunConfig& config, const Benchmark& bench,
                             std::vector<std::pair<std::string, std::string>>& tables, std::ostream& out) {
    const auto hash = config_hash(config);
    const auto measures = config.measure_specs();
    const auto options = split_options(config);
    const auto& e = config.experiment;
    auto selected = [&](const char* name) { return e == "all" || e == name; };
    auto add_csv = [&](std::string name, const std::function<void(std::ostream&)>& body) {
        tables.emplace_back(std::move(name), csv_text(hash, body));
    };

    ordered_json experiments = ordered_json::object();

    if (selected("stability")) {
        const auto rep = cross_sectional_stability(bench, measures, options);
        experiments["stability"] = report::to_json(rep);
        add_csv("stability.csv", [&](std::ostream& s) { report::write_stability_csv(s, rep); });
        print_stability(out, "cross-sectional stability (" + std::to_string(config.n_splits) + " splits)", rep);
        print_conditions(out, rep);
        out << '\n';
    }
    if (selected("per-level")) {
        const auto levels = per_level_stability(bench, measures, options);
        experiments["per_level"] = report::to_json(levels);
        if (!levels.empty()) {
            for (auto k : levels.front().report.top_ks) {
                add_csv("per_level_top" + std::to_string(k) + ".csv",
                        [&](std::ostream& s) { report::write_per_level_csv(s, levels, k); });
            }
            const auto k = levels.front().report.top_ks.front();
            out << "per-level stability (top" << k << ")\n";
            std::vector<std::string> header = {"level"};
            for (const auto& m : levels.front().report.measures) header.push_back(m);
            std::vector<std::vector<std::string>> rows;
            for (const auto& l : levels) {
                std::vector<std::string> row = {std::to_string(l.level) + " " + l.level_name};
                for (const auto& m : l.report.measures) row.push_back(report::format_cell(l.report.cell(m, k).mean));
                rows.push_back(std::move(row));
            }
            report::print_table(out, header, rows);
            for (const auto& l : levels) print_conditions(out, l.report);
            out << '\n';
        }
    }
    if (selected("total")) {
        const auto rep = total_aggregation_stability(bench, measures, options);
        experiments["total"] = report::to_json(rep);
        add_csv("total.csv", [&](std::ostream& s) { report::write_stability_csv(s, rep); });
        print_stability(out, "total-aggregation stability (" + std::to_string(config.n_splits) + " splits)", rep);
        print_conditions(out, rep);
        out << '\n';
    }
    if (selected("temporal")) {
        const auto cut = temporal_cut(config, bench.dataset.horizon());
        const auto rep = temporal_stability(bench, measures, cut, config.temporal_top_k);
        experiments["temporal"] = report::to_json(rep);
        add_csv("temporal_overall.csv", [&](std::ostream& s) { report::write_temporal_overall_csv(s, rep); });
        add_csv("temporal_per_level.csv", [&](std::ostream& s) { report::write_temporal_per_level_csv(s, rep); });
        out << "temporal stability (days 1.." << cut << " vs " << cut + 1 << ".." << bench.dataset.horizon() << ")\n";
        std::vector<std::vector<std::string>> rows;
        for (std::size_t m = 0; m < rep.measures.size(); ++m) {
            rows.push_back({rep.measures[m], report::format_cell(rep.overall[m])});
        }
        report::print_table(out, {"measure", "correlation"}, rows);
        for (const auto& [m, reason] : rep.failures) out << "  note: " << m << ": " << reason << '\n';
        out << '\n';
    }
    if (selected("magic")) {
        const auto grid = magic_grid(config.magic.grid_points, config.magic.min, config.magic.max);
        std::vector<MagicResult> results;
        ordered_json arr = ordered_json::array();
        for (const auto& text : config.magic.measures) {
            const auto m = MeasureSpec::parse(text);
            for (auto level : magic_levels(config, bench.dataset)) {
                results.push_back(magic_number_similarity(bench, m, level, grid, config.magic.top_k));
                arr.push_back(report::to_json(results.back()));
            }
        }
        experiments["magic"] = {{"grid", {{"points", config.magic.grid_points},
                                          {"min", config.magic.min},
                                          {"max", config.magic.max}}},
                                {"results", std::move(arr)}};
        add_csv("magic.csv", [&](std::ostream& s) { report::write_magic_csv(s, results); });
        add_csv("magic_multipliers.csv", [&](std::ostream& s) { report::write_magic_multipliers_csv(s, results); });
        out << "magic-number similarity\n";
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : results) {
            rows.push_back({r.measure, std::to_string(r.level), report::format_cell(r.similarity.value)});
        }
        report::print_table(out, {"measure", "level", "similarity"}, rows);
        out << '\n';
    }
    if (selected("sweep")) {
        const auto base = MeasureSpec::parse(config.sweep.measure);
        const auto curves = top_level_weight_sweep(bench, base, config.sweep.weights, options);
        experiments["sweep"] = {{"measure", base.name()}, {"curves", report::to_json(curves)}};
        for (const auto& c : curves) {
            add_csv("sweep_top" + std::to_string(c.top_k) + ".csv",
                    [&](std::ostream& s) { report::write_sweep_csv(s, c); });
        }
        out << "top-level weight sweep (" << base.name() << ")\n";
        std::vector<std::string> header = {"w"};
        for (const auto& c : curves) header.push_back("top" + std::to_string(c.top_k));
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < config.sweep.weights.size(); ++i) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%g", config.sweep.weights[i]);
            std::vector<std::string> row = {buf};
            for (const auto& c : curves) row.push_back(report::format_cell(c.stability[i]));
            rows.push_back(std::move(row));
        }
        report::print_table(out, header, rows);
        out << '\n';
    }
    if (selected("matrix")) {
        const auto matrix = measure_similarity_matrix(bench, measures, config.matrix_top_k);
        experiments["matrix"] = report::to_json(matrix);
        add_csv("matrix.csv", [&](std::ostream& s) { report::write_matrix_csv(s, matrix); });
        out << "measure similarity matrix\n";
        std::vector<std::string> header = {"measure"};
        for (const auto& m : matrix.measures) header.push_back(m);
        std::vector<std::vector<std::string>> rows;
        for (std::size_t a = 0; a < matrix.measures.size(); ++a) {
            std::vector<std::string> row = {matrix.measures[a]};
            for (const auto& c : matrix.cells[a]) row.push_back(report::format_cell(c.value));
            rows.push_back(std::move(row));
        }
        report::print_table(out, header, rows);
        out << '\n';
    }

    return {{"tool", "rankstab"},
            {"config_hash", hash},
            {"config", effective_config(config)},
            {"dataset", {{"levels", bench.dataset.num_levels()},
                         {"bottom_series", bench.dataset.bottom_count()},
                         {"total_series", bench.dataset.size()},
                         {"train_length", bench.dataset.train_length()},
                         {"horizon", bench.dataset.horizon()},
                         {"methods", bench.forecasts.size()}}},
            {"experiments", std::move(experiments)}};
}

int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err) {
    LoadedBenchmark loaded;
    try {
        loaded = load_benchmark(config);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kValidationFailure;
    }
    const auto report = validate(config, loaded);
    for (const auto& line : report.summary) out << line << '\n';
    for (const auto& f : report.findings) {
        (f.severity == Finding::Severity::fatal ? err : out)
            << (f.severity == Finding::Severity::fatal ? "fatal: " : "warning: ") << f.message << '\n';
    }
    out << "findings: " << report.findings.size() << '\n';
    return report.ok() ? kOk : kValidationFailure;
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    LoadedBenchmark loaded;
    try {
        loaded = load_benchmark(config);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kValidationFailure;
    }
    const auto validation = validate(config, loaded);
    for (const auto& f : validation.findings) {
        err << (f.severity == Finding::Severity::fatal ? "fatal: " : "warning: ") << f.message << '\n';
    }
    if (!validation.ok()) return kValidationFailure;

    const fs::path dir = config.resolve(config.output_dir);
    std::vector<std::pair<std::string, std::string>> tables;
    ordered_json doc;
    try {
        doc = run_experiments(config, loaded.bench, tables, out);
    } catch (const std::exception& e) {
        err << "error: experiment failed: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    try {
        fs::create_directories(dir);
        if (config.format != "csv") write_file(dir / "report.json", doc.dump(2) + "\n");
        if (config.format != "json") {
            for (const auto& [name, content] : tables) write_file(dir / name, content);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    out << "config hash " << doc["config_hash"].get<std::string>() << "; outputs in " << dir.string() << '\n';
    return kOk;
}

int cmd_seed_demo(const fs::path& dir, std::ostream& out, std::ostream& err) {
    try {
        demo::write_fixture(demo::make_mini_fixture(), dir);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    out << "wrote mini fixture to " << dir.string() << " (run: rankstab run --config "
        << (dir / "config.json").string() << ")\n";
    return kOk;
}

} // namespace rankstab::app
