// Acceptance gate: one PASS/FAIL/SKIP line per criterion, exit status 1 on any FAIL.

#include "rankstab/app.hpp"
#include "rankstab/demo.hpp"
#include "rankstab/experiments.hpp"
#include "rankstab/io.hpp"
#include "rankstab/report.hpp"
#include "rankstab/rng.hpp"

#include "support/oracle.hpp"
#include "support/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

using namespace rankstab;
namespace fs = std::filesystem;

namespace {

enum class Outcome { pass, fail, skip };

struct Result {
    Outcome outcome = Outcome::fail;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), f, a);
    return buf;
}

Result verdict(bool ok, std::string detail) { return {ok ? Outcome::pass : Outcome::fail, std::move(detail)}; }

std::vector<MeasureSpec> parse_all(std::initializer_list<const char*> names) {
    std::vector<MeasureSpec> out;
    for (const char* n : names) out.push_back(MeasureSpec::parse(n));
    return out;
}

// ---------------------------------------------------------------------------
// 1. Measure oracle equivalence on the mini fixture.
Result measure_oracle() {
    const auto start = Clock::now();
    const auto fx = demo::make_mini_fixture();
    const auto bench = demo::make_benchmark(fx);
    std::vector<oracle::Series> flat;
    for (const auto& b : fx.bottom) flat.push_back({b.id, b.attributes, b.train, b.test});
    std::vector<oracle::Level> levels;
    for (const auto& l : fx.spec.levels()) levels.push_back({l.keys});
    const auto groups = oracle::enumerate_groups(flat, levels);
    std::vector<std::vector<double>> prices;
    for (const auto& p : fx.prices) prices.emplace_back(p.begin() + 32, p.begin() + 60);
    const int k = static_cast<int>(levels.size());
    const auto w = oracle::weights(groups, k, prices, 28);

    const Evaluator ev(bench.dataset, bench.weights_for(bench.dataset));
    const std::array<std::pair<BaseMeasure, oracle::Base>, 5> bases = {{{BaseMeasure::mae, oracle::MAE},
                                                                        {BaseMeasure::smape, oracle::SMAPE},
                                                                        {BaseMeasure::mase, oracle::MASE},
                                                                        {BaseMeasure::rmsse, oracle::RMSSE},
                                                                        {BaseMeasure::wape, oracle::WAPE}}};
    double worst = 0;
    std::size_t checks = 0;
    auto check = [&](double got, double want) {
        worst = std::max(worst, std::fabs(got - want));
        ++checks;
    };
    for (const auto& f : fx.forecasts) {
        std::vector<std::vector<double>> bf;
        for (const auto& b : fx.bottom) bf.push_back(f.forecasts.at(b.id));
        const auto table = ev.errors(f);
        // Per-series values.
        for (const auto& [base, ob] : bases) {
            for (const auto& e : table[base]) {
                const auto& s = bench.dataset.series(e.series);
                std::vector<double> fc(s.test.size(), 0.0);
                for (auto b : bench.dataset.members(e.series)) {
                    for (std::size_t t = 0; t < fc.size(); ++t) fc[t] += bf[b][t];
                }
                oracle::Group g;
                g.train = s.train;
                g.test = s.test;
                check(e.value, oracle::base_error(ob, g, fc));
            }
            const auto want = oracle::summarize(ob, groups, k, bf, w);
            const MeasureSpec plain{base, Weighting::none, {}, ""};
            const MeasureSpec price{base, Weighting::price, {}, ""};
            check(ev.score(table, plain), want.per_level);
            check(ev.score(table, plain.with(Summarization::pooled_average())), want.pooled);
            check(ev.score(table, price), want.price_total);
        }
    }
    const double elapsed = seconds_since(start);
    return verdict(worst <= 1e-9 && elapsed < 1.0,
                   std::to_string(checks) + " values, max |diff| " + fmt("%.2e", worst) + " (tol 1e-9), " +
                       fmt("%.3f", elapsed) + " s (limit 1 s)");
}

// 2. Spearman equals the closed form on tie-free rankings.
Result spearman_closed_form() {
    RandomEngine rng(2);
    double worst = 0;
    const std::array<std::size_t, 3> sizes = {5, 10, 50};
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t m = sizes[static_cast<std::size_t>(trial) % 3];
        const auto p1 = random_permutation(m, rng());
        const auto p2 = random_permutation(m, rng());
        std::vector<MethodScore> s1;
        std::vector<MethodScore> s2;
        double d2 = 0;
        for (std::size_t i = 0; i < m; ++i) {
            s1.push_back({"m" + std::to_string(i), static_cast<double>(p1[i])});
            s2.push_back({"m" + std::to_string(i), static_cast<double>(p2[i])});
            const double d = static_cast<double>(p1[i]) - static_cast<double>(p2[i]);
            d2 += d * d;
        }
        const double md = static_cast<double>(m);
        const double closed = 1.0 - 6.0 * d2 / (md * (md * md - 1.0));
        const auto s = spearman(rank_methods(s1), rank_methods(s2));
        if (!s.value) return {Outcome::fail, "unexpected degenerate ranking"};
        worst = std::max(worst, std::fabs(*s.value - closed));
    }
    return verdict(worst <= 1e-12, "1000 pairs, max |diff| " + fmt("%.2e", worst) + " (tol 1e-12)");
}

synth::Options random_instance(std::uint64_t seed) {
    RandomEngine rng(seed * 7919 + 1);
    synth::Options o;
    o.seed = seed;
    o.stores = 2 + uniform_below(rng, 3);
    o.items = 2 + uniform_below(rng, 5);
    o.train = 10 + uniform_below(rng, 30);
    o.horizon = 2 + uniform_below(rng, 12);
    o.intermittency = 0.6 * uniform_unit(rng);
    o.noise.clear();
    const auto methods = 3 + uniform_below(rng, 6);
    for (std::size_t m = 0; m < methods; ++m) o.noise.push_back(0.05 + 1.5 * uniform_unit(rng));
    o.multiplicative = uniform_below(rng, 2) == 0;
    return o;
}

// 3. Total aggregation makes the scale-dependent and scaled measures rank alike.
Result total_aggregation_equivalence() {
    const auto start = Clock::now();
    const auto measures = parse_all({"MAE", "MASE", "RMSSE", "WAPE", "PRICE_MAE", "PRICE_MASE", "PRICE_RMSSE",
                                     "PRICE_WAPE", "SMAPE"});
    std::size_t violations = 0;
    std::size_t smape_differs = 0;
    std::size_t instances = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto bench = synth::make(random_instance(seed));
        const auto total = total_aggregate(bench.dataset);
        const auto weights = bench.weights_for(bench.dataset);
        const Evaluator ev(total, single_series_weights(total, weights->total));
        if (ev.exclusions()[BaseMeasure::mase] > 0 || ev.exclusions()[BaseMeasure::wape] > 0) continue;
        ++instances;
        std::vector<std::vector<double>> scores(measures.size());
        for (const auto& f : bench.forecasts) {
            const auto table = ev.errors(total_aggregate(bench.dataset, f));
            for (std::size_t m = 0; m < measures.size(); ++m) scores[m].push_back(ev.score(table, measures[m]));
        }
        const auto& mae = scores[0];
        for (std::size_t m = 1; m < measures.size(); ++m) {
            bool same = true;
            for (std::size_t i = 0; i < mae.size(); ++i) {
                for (std::size_t j = 0; j < mae.size(); ++j) {
                    if (mae[i] < mae[j] && !(scores[m][i] <= scores[m][j])) same = false;
                    if (mae[i] == mae[j] && scores[m][i] != scores[m][j]) same = false;
                }
            }
            if (same) continue;
            if (measures[m].base == BaseMeasure::smape) {
                ++smape_differs;
            } else {
                ++violations;
            }
        }
    }
    const double elapsed = seconds_since(start);
    return verdict(violations == 0 && instances >= 90 && elapsed < 5.0,
                   std::to_string(instances) + " instances, " + std::to_string(violations) +
                       " order violations (SMAPE differs on " + std::to_string(smape_differs) + ", allowed), " +
                       fmt("%.2f", elapsed) + " s (limit 5 s)");
}

// 4. Level-1 rankings do not change under price weighting.
Result level_one_invariance() {
    std::size_t mismatches = 0;
    std::size_t compared = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto bench = synth::make(random_instance(seed));
        const Evaluator ev(bench.dataset, bench.weights_for(bench.dataset));
        for (auto base : kBaseMeasures) {
            const MeasureSpec plain{base, Weighting::none, Summarization::single_level(1), ""};
            const MeasureSpec price{base, Weighting::price, Summarization::single_level(1), ""};
            std::vector<MethodScore> a;
            std::vector<MethodScore> b;
            try {
                for (const auto& f : bench.forecasts) {
                    const auto table = ev.errors(f);
                    a.push_back({f.method_id, ev.score(table, plain)});
                    b.push_back({f.method_id, ev.score(table, price)});
                }
            } catch (const EmptyLevelError&) {
                continue; // zero-scale top series
            }
            ++compared;
            const auto ra = rank_methods(a);
            const auto rb = rank_methods(b);
            for (std::size_t i = 0; i < ra.size(); ++i) mismatches += ra.entries[i].rank != rb.entries[i].rank;
        }
    }
    return verdict(mismatches == 0 && compared > 0,
                   std::to_string(compared) + " (instance, measure) rankings, " + std::to_string(mismatches) +
                       " rank mismatches");
}

// 5. Scale-free measures ignore a common rescaling of one series; MAE scales with it.
Result scale_invariance() {
    double worst_free = 0;
    double worst_mae = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto o = random_instance(seed);
        o.stores = 1;
        o.items = 1;
        const auto bench = synth::make(o);
        const auto& s = bench.dataset.bottom()[0];
        const auto& f = bench.forecasts[0].forecasts.at(s.id);
        if (naive_scale(s.train).abs_diff == 0 || std::all_of(s.test.begin(), s.test.end(), [](double v) { return v == 0; })) {
            continue;
        }
        for (double c : {0.01, 3.0, 1000.0}) {
            std::vector<double> tc;
            std::vector<double> yc;
            std::vector<double> fc;
            for (double v : s.train) tc.push_back(c * v);
            for (double v : s.test) yc.push_back(c * v);
            for (double v : f) fc.push_back(c * v);
            auto rel = [](double a, double b) { return b == 0 ? std::fabs(a) : std::fabs(a - b) / std::fabs(b); };
            worst_free = std::max({worst_free, rel(smape(yc, fc), smape(s.test, f)),
                                   rel(mase(tc, yc, fc), mase(s.train, s.test, f)),
                                   rel(rmsse(tc, yc, fc), rmsse(s.train, s.test, f)), rel(wape(yc, fc), wape(s.test, f))});
            worst_mae = std::max(worst_mae, rel(mae(yc, fc), c * mae(s.test, f)));
        }
    }
    return verdict(worst_free < 1e-9 && worst_mae <= 1e-12,
                   "scale-free max rel " + fmt("%.2e", worst_free) + " (tol 1e-9), MAE max rel " +
                       fmt("%.2e", worst_mae) + " (tol 1e-12)");
}

std::pair<double, double> weight_sums(const HierarchicalDataset& data, const PriceWeights& w) {
    double total = 0;
    double worst_level = 0;
    const double k = static_cast<double>(data.num_levels());
    for (std::size_t j = 1; j <= data.num_levels(); ++j) {
        double s = 0;
        for (std::size_t i = data.level_begin(j); i < data.level_begin(j + 1); ++i) s += w.weights[i];
        worst_level = std::max(worst_level, std::fabs(s - 1.0 / k));
        total += s;
    }
    return {std::fabs(total - 1.0), worst_level};
}

std::optional<fs::path> m5_dir() {
    const char* env = std::getenv("RANKSTAB_M5_DIR");
    if (env == nullptr || *env == '\0') return std::nullopt;
    return fs::path(env);
}

std::optional<io::LoadedData> load_m5_if_present() {
    const auto dir = m5_dir();
    if (!dir) return std::nullopt;
    auto sales = *dir / "sales_train_evaluation.csv";
    if (!fs::exists(sales)) sales = *dir / "sales_train_validation.csv";
    if (!fs::exists(sales) || !fs::exists(*dir / "sell_prices.csv") || !fs::exists(*dir / "calendar.csv")) {
        return std::nullopt;
    }
    return io::load_m5(sales, *dir / "sell_prices.csv", *dir / "calendar.csv");
}

// 6. Weight normalization.
Result weight_normalization() {
    const auto bench = demo::make_benchmark(demo::make_mini_fixture());
    const auto w = compute_price_weights(bench.dataset, *bench.prices, 28);
    auto [total, level] = weight_sums(bench.dataset, w);
    std::string detail = "mini fixture |sum-1| " + fmt("%.1e", total) + ", max |level sum-1/k| " + fmt("%.1e", level);
    bool ok = total <= 1e-9 && level <= 1e-9;
    if (auto m5 = load_m5_if_present()) {
        const auto wm = compute_price_weights(m5->dataset, *m5->prices, 28);
        auto [t2, l2] = weight_sums(m5->dataset, wm);
        detail += "; M5 |sum-1| " + fmt("%.1e", t2) + ", max level " + fmt("%.1e", l2);
        ok = ok && t2 <= 1e-9 && l2 <= 1e-9;
    } else {
        detail += "; M5 files absent (fixture only)";
    }
    return verdict(ok, detail + " (tol 1e-9)");
}

// 7. Stability sanity on separated tiers and on exchangeable methods.
Result stability_sanity() {
    const auto start = Clock::now();
    const auto measures = default_measures();

    synth::Options tiers;
    tiers.stores = 10;
    tiers.items = 20;
    tiers.train = 56;
    tiers.horizon = 28;
    tiers.multiplicative = true;
    tiers.noise = {0.01, 0.02, 0.04, 0.15, 0.3, 0.6};
    tiers.seed = 70;
    const auto tb = synth::make(tiers);

    // Pooled MAE of the tiers must differ by at least 10x.
    const Evaluator ev(tb.dataset, std::nullopt);
    std::vector<double> pooled;
    for (const auto& f : tb.forecasts) pooled.push_back(ev.score(ev.errors(f), MeasureSpec::parse("MAE/pooled")));
    const double tier1 = (pooled[0] + pooled[1] + pooled[2]) / 3;
    const double tier2 = (pooled[3] + pooled[4] + pooled[5]) / 3;

    SplitOptions o;
    o.n_splits = 20;
    o.seed = 7;
    const auto sep = cross_sectional_stability(tb, measures, o);
    double min_sep = 1;
    for (const auto& c : sep.cells) min_sep = std::min(min_sep, c.mean.value_or(-2));

    synth::Options ex = tiers;
    ex.noise.assign(20, 0.2);
    ex.seed = 71;
    const auto eb = synth::make(ex);
    o.n_splits = 50;
    const auto exch = cross_sectional_stability(eb, measures, o);
    double max_abs = 0;
    for (const auto& c : exch.cells) max_abs = std::max(max_abs, std::fabs(c.mean.value_or(9)));

    const double elapsed = seconds_since(start);
    return verdict(tier2 / tier1 >= 10 && min_sep >= 0.95 && max_abs <= 0.3 && elapsed < 30,
                   "tier MAE ratio " + fmt("%.1f", tier2 / tier1) + ", min tiered stability " + fmt("%.3f", min_sep) +
                       " (>= 0.95), max |exchangeable mean| " + fmt("%.3f", max_abs) + " (<= 0.3), " +
                       fmt("%.1f", elapsed) + " s (limit 30 s)");
}

// 8. Magic-number boundary cases.
Result magic_boundaries() {
    std::vector<std::string> problems;
    const auto bench = demo::make_benchmark(demo::make_mini_fixture());
    const std::vector<double> unit{1.0};
    for (const auto& m : default_measures()) {
        for (std::size_t level : {std::size_t{1}, bench.dataset.num_levels()}) {
            const auto r = magic_number_similarity(bench, m, level, unit);
            if (!r.similarity.value || *r.similarity.value != 1.0) problems.push_back("grid {1} " + m.name());
        }
    }

    Benchmark single;
    single.dataset = build_hierarchy({BottomSeries{"s", {}, {1, 2, 3}, {10}}}, HierarchySpec(std::vector<LevelSpec>{{"only", {}}}));
    const ForecastSet f{"m", {{"s", {20}}}};
    single.forecasts = {f};
    const auto c = optimal_magic_number(single, f, MeasureSpec::parse("MAE"), std::vector<double>{0, 0.5, 1, 1.5, 2});
    if (c.multiplier != 0.5) problems.push_back("single-series c* = " + fmt("%g", c.multiplier));

    synth::Options o;
    o.seed = 88;
    auto inter = synth::make(o);
    std::vector<BottomSeries> bottom;
    for (std::size_t b = 0; b < inter.dataset.bottom_count(); ++b) {
        const auto& s = inter.dataset.bottom()[b];
        bottom.push_back({s.id, inter.dataset.bottom_attributes(b), s.train, std::vector<double>(s.test.size(), 0.0)});
    }
    inter.dataset = build_hierarchy(bottom, inter.dataset.spec());
    const auto r = magic_number_similarity(inter, MeasureSpec::parse("SMAPE"), inter.dataset.num_levels(), magic_grid());
    for (const auto& m : r.optimal) {
        if (m.multiplier != 0.0) problems.push_back("intermittent c* = " + fmt("%g", m.multiplier));
    }
    const auto cell = report::format_cell(r.similarity.value);
    if (cell != "*") problems.push_back("intermittent similarity printed as " + cell);

    std::string detail = "grid {1} -> 1 on 18 cases; single-series c* = " + fmt("%g", c.multiplier) +
                         "; intermittent SMAPE c* all 0, similarity '" + cell + "'";
    for (const auto& p : problems) detail += "; " + p;
    return verdict(problems.empty(), detail);
}

// 9. Sweep endpoints equal single-level stabilities under the same seeds.
Result sweep_endpoints() {
    double worst = 0;
    bool missing = false;
    std::vector<Benchmark> benches = {demo::make_benchmark(demo::make_mini_fixture())};
    synth::Options o;
    o.seed = 99;
    benches.push_back(synth::make(o));
    for (const auto& bench : benches) {
        SplitOptions opts;
        opts.n_splits = 12;
        opts.seed = 1234;
        const auto base = MeasureSpec::parse("PRICE_RMSSE");
        const std::vector<double> w{0.0, 0.05, 0.5, 1.0};
        const auto curves = top_level_weight_sweep(bench, base, w, opts);
        const auto levels = per_level_stability(bench, std::vector<MeasureSpec>{base}, opts);
        for (const auto& c : curves) {
            const auto bottom = levels.back().report.cell(base.name(), c.top_k).mean;
            const auto top = levels.front().report.cell(base.name(), c.top_k).mean;
            if (!bottom || !top || !c.stability.front() || !c.stability.back()) {
                missing = true;
                continue;
            }
            worst = std::max({worst, std::fabs(*c.stability.front() - *bottom), std::fabs(*c.stability.back() - *top)});
        }
    }
    return verdict(!missing && worst <= 1e-12, "max |diff| " + fmt("%.1e", worst) + " (tol 1e-12)");
}

// 10. Determinism of every experiment across runs and thread counts.
Result determinism() {
    const auto dir = fs::temp_directory_path() / "rankstab_acceptance_determinism";
    fs::remove_all(dir);
    demo::write_fixture(demo::make_mini_fixture(), dir);
    auto config = app::load_config(dir / "config.json");
    const auto loaded = app::load_benchmark(config);
    std::vector<std::string> differing;
    std::size_t runs = 0;
    for (const char* e : {"stability", "per-level", "total", "temporal", "magic", "sweep", "matrix"}) {
        config.experiment = e;
        std::string first;
        for (unsigned threads : {1u, 1u, 4u}) {
            config.threads = threads;
            std::vector<std::pair<std::string, std::string>> tables;
            std::ostringstream out;
            const auto doc = app::run_experiments(config, loaded.bench, tables, out).dump(2);
            std::string csv;
            for (const auto& [name, text] : tables) csv += name + "\n" + text;
            ++runs;
            if (first.empty()) {
                first = doc + csv;
            } else if (doc + csv != first) {
                differing.push_back(e);
            }
        }
    }
    std::string detail = std::to_string(runs) + " runs (threads 1, 1, 4 per experiment)";
    for (const auto& d : differing) detail += "; differs: " + d;
    return verdict(differing.empty(), detail);
}

// 11. Reproduction on the public data, when it is available.
Result m5_reproduction() {
    const auto dir = m5_dir();
    if (!dir) return {Outcome::skip, "RANKSTAB_M5_DIR not set (needs M5 files, 50 submissions, reference)"};
    const auto manifest = *dir / "submissions" / "manifest.csv";
    const auto reference = *dir / "reference.txt";
    auto data = load_m5_if_present();
    if (!data || !fs::exists(manifest) || !fs::exists(reference)) {
        return {Outcome::skip, "incomplete data under " + dir->string()};
    }
    Benchmark bench;
    bench.dataset = std::move(data->dataset);
    bench.prices = std::move(data->prices);
    bench.forecasts = io::load_forecast_manifest(manifest, 28);
    bench.reference = io::load_reference(reference);

    const std::vector<std::string> names = {"MAE", "MASE", "RMSSE", "SMAPE", "WAPE",
                                            "PRICE_MAE", "PRICE_MASE", "PRICE_RMSSE", "PRICE_SMAPE"};
    const std::vector<double> expected_overall = {-0.18, 0.08, 0.06, 0.10, -0.07, 0.04, -0.20, -0.14, -0.12};
    const std::vector<std::vector<double>> expected_levels = {
        {0.15, 0.15, 0.24, 0.07, 0.15, 0.15, 0.15, 0.24, 0.07},
        {-0.03, 0.06, 0.07, -0.02, 0.08, -0.05, -0.04, 0.07, -0.09},
        {0.27, 0.26, 0.12, 0.24, 0.29, 0.30, 0.25, 0.16, 0.20},
        {-0.01, -0.10, -0.07, -0.12, -0.09, 0.09, -0.11, 0.00, -0.20},
        {-0.20, 0.64, 0.64, 0.60, 0.64, -0.06, -0.15, -0.13, -0.17},
        {0.09, -0.02, -0.03, 0.01, -0.02, 0.17, -0.05, 0.03, -0.06},
        {0.01, 0.60, 0.65, 0.60, 0.68, -0.36, 0.06, 0.11, 0.09},
        {0.15, 0.28, 0.34, 0.31, 0.31, 0.34, 0.14, 0.18, 0.08},
        {0.21, 0.68, 0.70, 0.72, 0.73, 0.05, 0.35, 0.39, 0.35},
        {0.44, 0.67, 0.75, 0.85, -0.02, 0.73, 0.75, 0.77, 0.82},
        {0.45, 0.69, 0.75, 0.71, -0.04, 0.80, 0.76, 0.75, 0.87},
        {0.56, 0.91, 0.74, 0.83, 0.40, 0.84, 0.63, 0.74, 0.79}};
    std::vector<MeasureSpec> measures;
    for (const auto& n : names) measures.push_back(MeasureSpec::parse(n));
    const auto t = temporal_stability(bench, measures, 14, 50);
    double worst_overall = 0;
    double worst_levels = 0;
    for (std::size_t m = 0; m < names.size(); ++m) {
        worst_overall = std::max(worst_overall, std::fabs(t.overall[m].value_or(9) - expected_overall[m]));
        for (std::size_t j = 0; j < 12; ++j) worst_levels = std::max(worst_levels, std::fabs(t.per_level[j][m].value_or(9) - expected_levels[j][m]));
    }
    SplitOptions o;
    o.n_splits = 76;
    o.seed = 0;
    o.top_ks = {5};
    const auto cs = cross_sectional_stability(bench, std::vector<MeasureSpec>{MeasureSpec::parse("PRICE_RMSSE")}, o);
    const double top5 = cs.cells[0].mean.value_or(9);
    return verdict(worst_overall <= 0.005 && worst_levels <= 0.005 && std::fabs(top5 - 0.29) <= 0.08,
                   "temporal overall max |diff| " + fmt("%.3f", worst_overall) + ", per level " + fmt("%.3f", worst_levels) +
                       " (tol 0.005); PRICE_RMSSE top-5 stability " + fmt("%.3f", top5) + " (0.29 +- 0.08)");
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
        {"measure oracle equivalence", measure_oracle},
        {"spearman closed form", spearman_closed_form},
        {"total-aggregation equivalence", total_aggregation_equivalence},
        {"level-1 price-weighting invariance", level_one_invariance},
        {"scale-free invariance", scale_invariance},
        {"weight normalization", weight_normalization},
        {"stability sanity", stability_sanity},
        {"magic-number boundary cases", magic_boundaries},
        {"sweep endpoints", sweep_endpoints},
        {"determinism", determinism},
        {"conditional M5 reproduction", m5_reproduction},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Result r;
        try {
            r = criteria[i].second();
        } catch (const std::exception& e) {
            r = {Outcome::fail, std::string("exception: ") + e.what()};
        }
        const char* tag = r.outcome == Outcome::pass ? "PASS" : r.outcome == Outcome::fail ? "FAIL" : "SKIP";
        failures += r.outcome == Outcome::fail;
        std::cout << "[" << tag << "] criterion " << (i + 1) << " " << criteria[i].first << ": " << r.detail << '\n';
    }
    std::cout << (failures == 0 ? "acceptance: all criteria met or skipped\n" : "acceptance: failures present\n");
    return failures == 0 ? 0 : 1;
}
