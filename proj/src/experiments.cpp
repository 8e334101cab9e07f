#include "rankstab/experiments.hpp"

#include "rankstab/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace rankstab {

namespace {

enum class HalfTransform { none, total };

/// Scores of every measure for every scored method on one dataset.
struct ScoreSheet {
    std::vector<std::string> methods;
    /// scores[m][method]; NaN where the measure could not be scored.
    std::vector<std::vector<double>> scores;
    /// Per measure: reason it could not be scored, empty when fine.
    std::vector<std::string> failures;
    ExclusionCounts exclusions;
    std::size_t missing_prices = 0;
};

std::vector<std::size_t> resolve_top_ks(const ReferenceRanking& reference, const std::vector<std::size_t>& requested) {
    std::vector<std::size_t> ks = requested;
    if (ks.empty()) ks.push_back(reference.methods.size());
    for (auto k : ks) {
        if (k < 2) throw std::invalid_argument("top-k subsets need at least two methods");
        if (k > reference.methods.size()) {
            throw std::invalid_argument("top-" + std::to_string(k) + " exceeds the " +
                                        std::to_string(reference.methods.size()) + " ranked methods");
        }
    }
    return ks;
}

void check_measures(const Benchmark& bench, std::span<const MeasureSpec> measures, std::size_t num_levels) {
    if (measures.empty()) throw std::invalid_argument("no error measures selected");
    for (const auto& m : measures) {
        if (m.weighting == Weighting::price && !bench.prices) {
            throw std::invalid_argument("measure " + m.name() + " needs a price table");
        }
        if (m.summarization.kind == Summarization::Kind::single_level && m.summarization.level > num_levels) {
            throw std::invalid_argument("measure " + m.name() + " reads level " + std::to_string(m.summarization.level) +
                                        " but the hierarchy has " + std::to_string(num_levels));
        }
    }
}

/// Forecast sets of the first `count` reference methods, in reference order.
std::vector<const ForecastSet*> reference_forecasts(const Benchmark& bench, const ReferenceRanking& reference,
                                                    std::size_t count) {
    std::vector<const ForecastSet*> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto& id = reference.methods[i];
        auto it = std::find_if(bench.forecasts.begin(), bench.forecasts.end(),
                               [&](const ForecastSet& f) { return f.method_id == id; });
        if (it == bench.forecasts.end()) throw std::invalid_argument("reference method '" + id + "' has no forecasts");
        out.push_back(&*it);
    }
    return out;
}

ScoreSheet score_dataset(const Benchmark& bench, const HierarchicalDataset& data,
                         std::span<const ForecastSet* const> methods, std::span<const MeasureSpec> measures,
                         HalfTransform transform) {
    ScoreSheet sheet;
    sheet.failures.resize(measures.size());
    sheet.scores.assign(measures.size(), std::vector<double>(methods.size(), std::numeric_limits<double>::quiet_NaN()));
    for (const auto* f : methods) sheet.methods.push_back(f->method_id);

    std::optional<PriceWeights> weights;
    std::string weight_failure;
    try {
        weights = bench.weights_for(data);
        if (weights) sheet.missing_prices = weights->missing_prices;
    } catch (const DataError& e) {
        weight_failure = e.what();
    }

    const HierarchicalDataset* scored = &data;
    HierarchicalDataset collapsed;
    if (transform == HalfTransform::total) {
        collapsed = total_aggregate(data);
        scored = &collapsed;
        if (weights) weights = single_series_weights(collapsed, weights->total);
    }

    const Evaluator evaluator(*scored, weights, bench.evaluation);
    sheet.exclusions = evaluator.exclusions();

    for (std::size_t i = 0; i < methods.size(); ++i) {
        const ErrorTable table = transform == HalfTransform::total
                                     ? evaluator.errors(total_aggregate(data, *methods[i]))
                                     : evaluator.errors(*methods[i]);
        for (std::size_t m = 0; m < measures.size(); ++m) {
            if (!sheet.failures[m].empty()) continue;
            if (measures[m].weighting == Weighting::price && !weights) {
                sheet.failures[m] = weight_failure;
                continue;
            }
            try {
                sheet.scores[m][i] = evaluator.score(table, measures[m]);
            } catch (const EmptyLevelError& e) {
                sheet.failures[m] = e.what();
            }
        }
    }
    return sheet;
}

/// Similarity of the rankings two sheets give within the top-k methods.
Similarity compare_sheets(const ScoreSheet& a, const ScoreSheet& b, std::size_t measure, std::size_t k) {
    if (!a.failures[measure].empty() || !b.failures[measure].empty()) return {};
    std::vector<MethodScore> sa;
    std::vector<MethodScore> sb;
    for (std::size_t i = 0; i < k; ++i) {
        sa.push_back({a.methods[i], a.scores[measure][i]});
        sb.push_back({b.methods[i], b.scores[measure][i]});
    }
    return spearman(rank_methods(sa), rank_methods(sb));
}

struct SplitOutcome {
    std::vector<std::vector<Similarity>> similarity; // [measure][k index]
    SplitDiagnostics diagnostics;
};

StabilityReport run_split_experiment(const Benchmark& bench, std::span<const MeasureSpec> measures,
                                     const SplitOptions& options, HalfTransform transform) {
    if (options.n_splits < 1) throw std::invalid_argument("need at least one split");
    check_measures(bench, measures, bench.dataset.num_levels());
    const auto reference = bench.effective_reference();
    const auto ks = resolve_top_ks(reference, options.top_ks);
    const auto max_k = *std::max_element(ks.begin(), ks.end());
    const auto methods = reference_forecasts(bench, reference, max_k);
    const Splitter splitter = options.splitter ? options.splitter : Splitter(&split_bottom_half);

    std::vector<SplitOutcome> outcomes(options.n_splits);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t r = next.fetch_add(1);
            if (r >= options.n_splits) return;
            try {
                const auto seed = derive_split_seed(options.seed, r);
                const auto [first, second] = splitter(bench.dataset, seed);
                const auto a = score_dataset(bench, first, methods, measures, transform);
                const auto b = score_dataset(bench, second, methods, measures, transform);

                SplitOutcome& out = outcomes[r];
                out.diagnostics.index = r;
                out.diagnostics.seed = seed;
                out.diagnostics.exclusions = {a.exclusions, b.exclusions};
                out.diagnostics.missing_prices = {a.missing_prices, b.missing_prices};
                out.similarity.resize(measures.size());
                for (std::size_t m = 0; m < measures.size(); ++m) {
                    const auto& reason = a.failures[m].empty() ? b.failures[m] : a.failures[m];
                    if (!reason.empty()) out.diagnostics.failures.emplace(measures[m].name(), reason);
                    for (auto k : ks) out.similarity[m].push_back(compare_sheets(a, b, m, k));
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(options.n_splits);
                return;
            }
        }
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(options.n_splits)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);

    StabilityReport report;
    report.top_ks = ks;
    for (const auto& m : measures) report.measures.push_back(m.name());
    for (const auto& o : outcomes) {
        report.split_seeds.push_back(o.diagnostics.seed);
        report.diagnostics.push_back(o.diagnostics);
    }
    for (std::size_t m = 0; m < measures.size(); ++m) {
        for (std::size_t ki = 0; ki < ks.size(); ++ki) {
            StabilityCell cell;
            cell.measure = report.measures[m];
            cell.top_k = ks[ki];
            double sum = 0.0;
            std::size_t count = 0;
            for (const auto& o : outcomes) {
                const auto& s = o.similarity[m][ki];
                cell.per_split.push_back(s.value);
                if (s.value) {
                    sum += *s.value;
                    ++count;
                } else {
                    ++cell.degenerate;
                }
            }
            if (count > 0) cell.mean = sum / static_cast<double>(count);
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

} // namespace

ReferenceRanking Benchmark::effective_reference() const {
    if (!reference.methods.empty()) return reference;
    std::vector<std::string> ids;
    for (const auto& f : forecasts) ids.push_back(f.method_id);
    return ReferenceRanking(std::move(ids));
}

std::optional<PriceWeights> Benchmark::weights_for(const HierarchicalDataset& data) const {
    if (!prices) return std::nullopt;
    return compute_price_weights(data, *prices, price_window);
}

const StabilityCell& StabilityReport::cell(std::string_view measure, std::size_t top_k) const {
    for (const auto& c : cells) {
        if (c.measure == measure && c.top_k == top_k) return c;
    }
    throw std::out_of_range("no stability cell for " + std::string(measure) + " / top-" + std::to_string(top_k));
}

std::vector<double> magic_grid(std::size_t points, double lo, double hi) {
    if (points == 0) throw std::invalid_argument("magic-number grid needs at least one point");
    if (points == 1) return {lo};
    std::vector<double> grid(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) grid[i] = lo + step * static_cast<double>(i);
    grid.back() = hi;
    return grid;
}

StabilityReport cross_sectional_stability(const Benchmark& bench, std::span<const MeasureSpec> measures,
                                          const SplitOptions& options) {
    return run_split_experiment(bench, measures, options, HalfTransform::none);
}

std::vector<LevelStability> per_level_stability(const Benchmark& bench, std::span<const MeasureSpec> measures,
                                                const SplitOptions& options) {
    const std::size_t k = bench.dataset.num_levels();
    std::vector<MeasureSpec> expanded;
    for (std::size_t j = 1; j <= k; ++j) {
        for (const auto& m : measures) expanded.push_back(m.with(Summarization::single_level(j)));
    }
    const auto full = run_split_experiment(bench, expanded, options, HalfTransform::none);

    std::vector<LevelStability> out;
    const std::size_t nk = full.top_ks.size();
    for (std::size_t j = 1; j <= k; ++j) {
        LevelStability level;
        level.level = j;
        level.level_name = bench.dataset.spec().level(j).name;
        level.report.top_ks = full.top_ks;
        level.report.split_seeds = full.split_seeds;
        for (std::size_t m = 0; m < measures.size(); ++m) {
            const std::size_t src = (j - 1) * measures.size() + m;
            level.report.measures.push_back(measures[m].name());
            for (std::size_t ki = 0; ki < nk; ++ki) {
                StabilityCell cell = full.cells[src * nk + ki];
                cell.measure = measures[m].name();
                level.report.cells.push_back(std::move(cell));
            }
        }
        for (const auto& d : full.diagnostics) {
            SplitDiagnostics diag = d;
            diag.failures.clear();
            for (std::size_t m = 0; m < measures.size(); ++m) {
                auto it = d.failures.find(expanded[(j - 1) * measures.size() + m].name());
                if (it != d.failures.end()) diag.failures.emplace(measures[m].name(), it->second);
            }
            level.report.diagnostics.push_back(std::move(diag));
        }
        out.push_back(std::move(level));
    }
    return out;
}

StabilityReport total_aggregation_stability(const Benchmark& bench, std::span<const MeasureSpec> measures,
                                            const SplitOptions& options) {
    // A collapsed half has a single level; every summary reads that level.
    std::vector<MeasureSpec> collapsed;
    for (const auto& m : measures) {
        if (m.summarization.kind == Summarization::Kind::single_level && m.summarization.level != 1) {
            throw std::invalid_argument("measure " + m.name() + " reads a level that total aggregation removes");
        }
        collapsed.push_back(m);
    }
    return run_split_experiment(bench, collapsed, options, HalfTransform::total);
}

TemporalReport temporal_stability(const Benchmark& bench, std::span<const MeasureSpec> measures, std::size_t cut,
                                  std::size_t top_k) {
    const auto& data = bench.dataset;
    check_measures(bench, measures, data.num_levels());
    const auto reference = bench.effective_reference();
    const auto ks = resolve_top_ks(reference, top_k == 0 ? std::vector<std::size_t>{} : std::vector<std::size_t>{top_k});
    const auto methods = reference_forecasts(bench, reference, ks.front());

    const auto [early, late] = split_test_window(data, cut);
    std::vector<ForecastSet> early_f;
    std::vector<ForecastSet> late_f;
    for (const auto* f : methods) {
        auto [a, b] = split_forecast_window(*f, cut);
        early_f.push_back(std::move(a));
        late_f.push_back(std::move(b));
    }
    std::vector<const ForecastSet*> early_p;
    std::vector<const ForecastSet*> late_p;
    for (std::size_t i = 0; i < methods.size(); ++i) {
        early_p.push_back(&early_f[i]);
        late_p.push_back(&late_f[i]);
    }

    const std::size_t k = data.num_levels();
    std::vector<MeasureSpec> expanded(measures.begin(), measures.end());
    for (std::size_t j = 1; j <= k; ++j) {
        for (const auto& m : measures) expanded.push_back(m.with(Summarization::single_level(j)));
    }
    const auto a = score_dataset(bench, early, early_p, expanded, HalfTransform::none);
    const auto b = score_dataset(bench, late, late_p, expanded, HalfTransform::none);

    TemporalReport report;
    report.cut = cut;
    report.top_k = ks.front();
    for (const auto& m : measures) report.measures.push_back(m.name());
    for (std::size_t j = 1; j <= k; ++j) report.level_names.push_back(data.spec().level(j).name);
    for (std::size_t m = 0; m < expanded.size(); ++m) {
        const auto& reason = a.failures[m].empty() ? b.failures[m] : a.failures[m];
        if (!reason.empty()) report.failures.emplace(expanded[m].name(), reason);
    }
    for (std::size_t m = 0; m < measures.size(); ++m) report.overall.push_back(compare_sheets(a, b, m, ks.front()).value);
    report.per_level.resize(k);
    for (std::size_t j = 1; j <= k; ++j) {
        for (std::size_t m = 0; m < measures.size(); ++m) {
            const std::size_t idx = measures.size() * j + m;
            report.per_level[j - 1].push_back(compare_sheets(a, b, idx, ks.front()).value);
        }
    }
    return report;
}

MagicNumber optimal_magic_number(const Evaluator& evaluator, const AggregatedForecast& forecast,
                                 const MeasureSpec& measure, std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("magic-number grid is empty");
    const auto level = evaluator.single_level_of(measure);
    MagicNumber best;
    bool first = true;
    bool tied = true;
    double first_score = 0.0;
    for (double c : grid) {
        const double s = evaluator.score(evaluator.errors(forecast, c, level), measure);
        if (first) {
            best = {c, s, false};
            first_score = s;
            first = false;
            continue;
        }
        if (s != first_score) tied = false;
        if (s < best.score || (s == best.score && c < best.multiplier)) best = {c, s, false};
    }
    best.all_tied = tied && grid.size() > 1;
    return best;
}

MagicNumber optimal_magic_number(const Benchmark& bench, const ForecastSet& forecast, const MeasureSpec& measure,
                                 std::span<const double> grid) {
    check_measures(bench, std::span<const MeasureSpec>(&measure, 1), bench.dataset.num_levels());
    const Evaluator evaluator(bench.dataset, bench.weights_for(bench.dataset), bench.evaluation);
    return optimal_magic_number(evaluator, evaluator.aggregate(forecast), measure, grid);
}

MagicResult magic_number_similarity(const Benchmark& bench, const MeasureSpec& measure, std::size_t level,
                                    std::span<const double> grid, std::size_t top_k) {
    const auto at_level = measure.with(Summarization::single_level(level));
    check_measures(bench, std::span<const MeasureSpec>(&at_level, 1), bench.dataset.num_levels());
    const auto reference = bench.effective_reference();
    const auto ks = resolve_top_ks(reference, top_k == 0 ? std::vector<std::size_t>{} : std::vector<std::size_t>{top_k});
    const auto methods = reference_forecasts(bench, reference, ks.front());

    const Evaluator evaluator(bench.dataset, bench.weights_for(bench.dataset), bench.evaluation);
    MagicResult result;
    result.measure = measure.name();
    result.level = level;
    std::vector<MethodScore> plain;
    std::vector<MethodScore> adjusted;
    for (const auto* f : methods) {
        const auto agg = evaluator.aggregate(*f);
        const double s = evaluator.score(evaluator.errors(agg, 1.0, level), at_level);
        const auto magic = optimal_magic_number(evaluator, agg, at_level, grid);
        result.methods.push_back(f->method_id);
        result.optimal.push_back(magic);
        plain.push_back({f->method_id, s});
        adjusted.push_back({f->method_id, magic.score});
    }
    result.similarity = spearman(rank_methods(adjusted), rank_methods(plain));
    return result;
}

SimilarityMatrix measure_similarity_matrix(const Benchmark& bench, std::span<const MeasureSpec> measures,
                                           std::size_t top_k) {
    if (measures.size() < 2) throw std::invalid_argument("similarity matrix needs at least two measures");
    check_measures(bench, measures, bench.dataset.num_levels());
    const auto reference = bench.effective_reference();
    const auto ks = resolve_top_ks(reference, top_k == 0 ? std::vector<std::size_t>{} : std::vector<std::size_t>{top_k});
    const auto methods = reference_forecasts(bench, reference, ks.front());
    const auto sheet = score_dataset(bench, bench.dataset, methods, measures, HalfTransform::none);

    SimilarityMatrix out;
    for (const auto& m : measures) out.measures.push_back(m.name());
    std::vector<std::optional<Ranking>> rankings;
    for (std::size_t m = 0; m < measures.size(); ++m) {
        if (!sheet.failures[m].empty()) {
            rankings.emplace_back();
            continue;
        }
        std::vector<MethodScore> scores;
        for (std::size_t i = 0; i < sheet.methods.size(); ++i) scores.push_back({sheet.methods[i], sheet.scores[m][i]});
        rankings.emplace_back(rank_methods(scores));
    }
    out.cells.assign(measures.size(), std::vector<Similarity>(measures.size()));
    for (std::size_t a = 0; a < measures.size(); ++a) {
        for (std::size_t b = 0; b < measures.size(); ++b) {
            if (rankings[a] && rankings[b]) out.cells[a][b] = spearman(*rankings[a], *rankings[b]);
        }
    }
    return out;
}

std::vector<SweepCurve> top_level_weight_sweep(const Benchmark& bench, const MeasureSpec& base_measure,
                                               std::span<const double> w_grid, const SplitOptions& options) {
    if (w_grid.empty()) throw std::invalid_argument("weight grid is empty");
    std::vector<MeasureSpec> measures;
    for (std::size_t i = 0; i < w_grid.size(); ++i) {
        if (i > 0 && !(w_grid[i] > w_grid[i - 1])) throw std::invalid_argument("weight grid must be strictly increasing");
        measures.push_back(base_measure.with(Summarization::two_level_weighted(w_grid[i])));
    }
    const auto report = run_split_experiment(bench, measures, options, HalfTransform::none);

    std::vector<SweepCurve> curves;
    for (std::size_t ki = 0; ki < report.top_ks.size(); ++ki) {
        SweepCurve curve;
        curve.top_k = report.top_ks[ki];
        for (std::size_t i = 0; i < w_grid.size(); ++i) {
            curve.weights.push_back(w_grid[i]);
            curve.stability.push_back(report.cells[i * report.top_ks.size() + ki].mean);
        }
        curves.push_back(std::move(curve));
    }
    return curves;
}

} // namespace rankstab
