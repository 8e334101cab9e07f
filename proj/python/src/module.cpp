#include "rankstab/app.hpp"
#include "rankstab/measures.hpp"
#include "rankstab/ranking.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace rankstab;

namespace {

app::RunConfig configured(const std::string& path, std::optional<std::string> experiment,
                          std::optional<std::uint64_t> seed, std::optional<std::size_t> splits,
                          std::optional<unsigned> threads) {
    auto config = app::load_config(path);
    app::Overrides o;
    o.experiment = std::move(experiment);
    o.seed = seed;
    o.splits = splits;
    o.threads = threads;
    app::apply_overrides(config, o);
    return config;
}

// Report as a JSON string; the Python side decodes it.
std::string run_report(const std::string& path, std::optional<std::string> experiment,
                       std::optional<std::uint64_t> seed, std::optional<std::size_t> splits,
                       std::optional<unsigned> threads) {
    const auto config = configured(path, std::move(experiment), seed, splits, threads);
    py::gil_scoped_release release;
    const auto loaded = app::load_benchmark(config);
    const auto report = app::validate(config, loaded);
    if (!report.ok()) {
        std::string msg = "validation failed";
        for (const auto& f : report.findings) {
            if (f.severity == app::Finding::Severity::fatal) msg += "\n  " + f.message;
        }
        throw DataError(msg);
    }
    std::vector<std::pair<std::string, std::string>> tables;
    std::ostringstream sink;
    return app::run_experiments(config, loaded.bench, tables, sink).dump();
}

std::vector<std::pair<std::string, std::string>> validate_config(const std::string& path) {
    const auto config = app::load_config(path);
    const auto report = app::validate(config, app::load_benchmark(config));
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& f : report.findings) {
        out.emplace_back(f.severity == app::Finding::Severity::fatal ? "fatal" : "warning", f.message);
    }
    return out;
}

std::map<std::string, double> score_methods(const std::string& path, const std::string& measure) {
    const auto spec = MeasureSpec::parse(measure);
    const auto config = app::load_config(path);
    const auto loaded = app::load_benchmark(config);
    const auto& bench = loaded.bench;
    const Evaluator ev(bench.dataset, spec.weighting == Weighting::price ? bench.weights_for(bench.dataset) : std::nullopt);
    std::map<std::string, double> out;
    for (const auto& f : bench.forecasts) out[f.method_id] = ev.score(ev.errors(f), spec);
    return out;
}

std::vector<MethodScore> to_scores(const std::map<std::string, double>& scores) {
    std::vector<MethodScore> out;
    for (const auto& [m, s] : scores) out.push_back({m, s});
    return out;
}

std::map<std::string, double> rank(const std::map<std::string, double>& scores) {
    std::map<std::string, double> out;
    for (const auto& e : rank_methods(to_scores(scores)).entries) out[e.method] = e.rank;
    return out;
}

std::optional<double> spearman_of(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
    return spearman(rank_methods(to_scores(a)), rank_methods(to_scores(b))).value;
}

} // namespace

PYBIND11_MODULE(_rankstab, m) {
    m.doc() = "Rank stability of forecast evaluation measures on hierarchical data";

    auto base_error = py::register_exception<std::runtime_error>(m, "RankstabError", PyExc_RuntimeError);
    py::register_exception<app::ConfigError>(m, "ConfigError", base_error.ptr());
    py::register_exception<DataError>(m, "DataError", base_error.ptr());
    py::register_exception<ZeroScaleError>(m, "ZeroScaleError", PyExc_ValueError);

    m.def("mae", [](const std::vector<double>& y, const std::vector<double>& f) { return mae(y, f); }, py::arg("actual"),
          py::arg("forecast"));
    m.def("smape", [](const std::vector<double>& y, const std::vector<double>& f) { return smape(y, f); },
          py::arg("actual"), py::arg("forecast"));
    m.def("wape", [](const std::vector<double>& y, const std::vector<double>& f) { return wape(y, f); },
          py::arg("actual"), py::arg("forecast"));
    m.def("mase",
          [](const std::vector<double>& t, const std::vector<double>& y, const std::vector<double>& f) {
              return mase(t, y, f);
          },
          py::arg("train"), py::arg("actual"), py::arg("forecast"));
    m.def("rmsse",
          [](const std::vector<double>& t, const std::vector<double>& y, const std::vector<double>& f) {
              return rmsse(t, y, f);
          },
          py::arg("train"), py::arg("actual"), py::arg("forecast"));
    m.def("measure_name", [](const std::string& s) { return MeasureSpec::parse(s).name(); }, py::arg("spec"),
          "Canonical name of a measure spec such as 'PRICE_RMSSE' or 'MAE/level(3)'.");

    m.def("rank", &rank, py::arg("scores"), "Fractional ranks (1 = lowest error) of a method -> score mapping.");
    m.def("spearman", &spearman_of, py::arg("a"), py::arg("b"),
          "Rank correlation of two method -> score mappings; None when either ranking is fully tied.");

    m.def("seed_demo",
          [](const std::filesystem::path& dir) {
              std::ostringstream out;
              std::ostringstream err;
              if (app::cmd_seed_demo(dir, out, err) != app::kOk) throw std::runtime_error(err.str());
          },
          py::arg("dir"));
    m.def("validate", &validate_config, py::arg("config"), "List of (severity, message) findings.");
    m.def("score", &score_methods, py::arg("config"), py::arg("measure"));
    m.def("_run_json", &run_report, py::arg("config"), py::arg("experiment") = py::none(),
          py::arg("seed") = py::none(), py::arg("splits") = py::none(), py::arg("threads") = py::none());
    m.def("config_hash", [](const std::string& path) { return app::config_hash(app::load_config(path)); },
          py::arg("config"));
}
