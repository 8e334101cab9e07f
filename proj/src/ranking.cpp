#include "rankstab/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace rankstab {

double Ranking::rank_of(std::string_view method) const {
    for (const auto& e : entries) {
        if (e.method == method) return e.rank;
    }
    throw std::out_of_range("method '" + std::string(method) + "' is not ranked");
}

std::vector<std::string> Ranking::order() const {
    std::vector<std::size_t> idx(entries.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return entries[a].rank < entries[b].rank; });
    std::vector<std::string> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(entries[i].method);
    return out;
}

ReferenceRanking::ReferenceRanking(std::vector<std::string> ids) : methods(std::move(ids)) {
    std::unordered_set<std::string> seen;
    for (const auto& id : methods) {
        if (!seen.insert(id).second) throw std::invalid_argument("reference ranking lists '" + id + "' twice");
    }
}

std::vector<double> fractional_ranks(std::span<const double> values) {
    const std::size_t m = values.size();
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return values[a] < values[b]; });

    std::vector<double> ranks(m);
    std::size_t i = 0;
    while (i < m) {
        std::size_t j = i + 1;
        while (j < m && values[idx[j]] == values[idx[i]]) ++j;
        // positions i..j-1 hold ranks i+1..j
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t p = i; p < j; ++p) ranks[idx[p]] = avg;
        i = j;
    }
    return ranks;
}

Ranking rank_methods(std::span<const MethodScore> scores) {
    if (scores.size() < 2) throw std::invalid_argument("ranking needs at least two methods");
    std::vector<double> values;
    values.reserve(scores.size());
    std::unordered_set<std::string_view> seen;
    for (const auto& s : scores) {
        if (std::isnan(s.score)) throw std::invalid_argument("score of method '" + s.method + "' is NaN");
        if (!seen.insert(s.method).second) throw std::invalid_argument("method '" + s.method + "' scored twice");
        values.push_back(s.score);
    }
    const auto ranks = fractional_ranks(values);
    Ranking out;
    out.entries.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out.entries.push_back({scores[i].method, scores[i].score, ranks[i]});
    return out;
}

Similarity rank_correlation(std::span<const double> r1, std::span<const double> r2) {
    if (r1.size() != r2.size()) throw std::invalid_argument("rank vectors differ in length");
    const std::size_t m = r1.size();
    if (m < 2) throw std::invalid_argument("rank correlation needs at least two methods");

    const double mean1 = std::accumulate(r1.begin(), r1.end(), 0.0) / static_cast<double>(m);
    const double mean2 = std::accumulate(r2.begin(), r2.end(), 0.0) / static_cast<double>(m);
    double cov = 0.0;
    double var1 = 0.0;
    double var2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double a = r1[i] - mean1;
        const double b = r2[i] - mean2;
        cov += a * b;
        var1 += a * a;
        var2 += b * b;
    }
    if (var1 == 0.0 || var2 == 0.0) return {};
    const double s = cov / std::sqrt(var1 * var2);
    return {std::clamp(s, -1.0, 1.0)};
}

Similarity spearman(const Ranking& r1, const Ranking& r2) {
    if (r1.size() != r2.size()) throw std::invalid_argument("rankings cover different numbers of methods");
    std::unordered_map<std::string_view, double> second;
    for (const auto& e : r2.entries) second.emplace(e.method, e.rank);
    std::vector<double> a;
    std::vector<double> b;
    a.reserve(r1.size());
    b.reserve(r1.size());
    for (const auto& e : r1.entries) {
        auto it = second.find(e.method);
        if (it == second.end()) throw std::invalid_argument("method '" + e.method + "' missing from second ranking");
        a.push_back(e.rank);
        b.push_back(it->second);
    }
    return rank_correlation(a, b);
}

std::vector<MethodScore> top_k_subset(const ReferenceRanking& reference, std::size_t k,
                                      std::span<const MethodScore> scores) {
    if (k > reference.methods.size()) {
        throw std::invalid_argument("top-" + std::to_string(k) + " subset of a reference with " +
                                    std::to_string(reference.methods.size()) + " methods");
    }
    std::unordered_map<std::string_view, const MethodScore*> by_id;
    for (const auto& s : scores) by_id.emplace(s.method, &s);
    std::vector<MethodScore> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto& id = reference.methods[i];
        auto it = by_id.find(id);
        if (it == by_id.end()) throw std::invalid_argument("reference method '" + id + "' has no score");
        out.push_back(*it->second);
    }
    return out;
}

} // namespace rankstab
