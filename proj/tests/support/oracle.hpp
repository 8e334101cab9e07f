#pragma once

// Straight-loop reference implementation of the error measures, written
// without any library code so it can serve as an independent check.

#include <map>
#include <string>
#include <vector>

namespace oracle {

struct Series {
    std::string id;
    std::map<std::string, std::string> attrs;
    std::vector<double> train;
    std::vector<double> test;
};

struct Level {
    std::vector<std::string> keys;
};

/// One aggregate series: group key -> member bottom positions.
struct Group {
    int level = 0; // 1-based
    std::vector<int> members;
    std::vector<double> train;
    std::vector<double> test;
};

/// Aggregates by enumerating key combinations with nested loops.
std::vector<Group> enumerate_groups(const std::vector<Series>& bottom, const std::vector<Level>& levels);

double mae(const std::vector<double>& y, const std::vector<double>& f);
double smape(const std::vector<double>& y, const std::vector<double>& f);
/// Negative return: zero scale.
double mase(const std::vector<double>& train, const std::vector<double>& y, const std::vector<double>& f);
double rmsse(const std::vector<double>& train, const std::vector<double>& y, const std::vector<double>& f);
double wape(const std::vector<double>& y, const std::vector<double>& f);

enum Base { MAE, SMAPE, MASE, RMSSE, WAPE };
double base_error(Base b, const Group& g, const std::vector<double>& f);

/// (1/k) * dollar sales of each group over the last `window` training days.
std::vector<double> weights(const std::vector<Group>& groups, int k,
                            const std::vector<std::vector<double>>& bottom_prices, int window);

struct Summaries {
    double per_level = 0;
    double pooled = 0;
    double price_total = 0;
    std::vector<double> level_mean;  // per level, unweighted
    std::vector<double> level_price; // per level, weights * k
};

/// All summaries of one base measure for one method; bottom forecasts given in
/// the same order as `bottom`.
Summaries summarize(Base b, const std::vector<Group>& groups, int k, const std::vector<std::vector<double>>& bottom_f,
                    const std::vector<double>& w);

} // namespace oracle
