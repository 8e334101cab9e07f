#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rankstab {

struct MethodScore {
    std::string method;
    double score = 0.0;
};

struct RankEntry {
    std::string method;
    double score = 0.0;
    double rank = 0.0; // 1 = lowest error; ties share their average rank
};

/// Fractional ranking of methods, entries kept in input order.
struct Ranking {
    std::vector<RankEntry> entries;

    std::size_t size() const noexcept { return entries.size(); }
    double rank_of(std::string_view method) const;
    /// Method ids ordered best first (stable on ties).
    std::vector<std::string> order() const;
};

/// Method ids in the order of some reference result, best first.
struct ReferenceRanking {
    std::vector<std::string> methods;

    ReferenceRanking() = default;
    explicit ReferenceRanking(std::vector<std::string> ids);
};

/// Rank correlation, or nothing when one side is fully tied.
struct Similarity {
    std::optional<double> value;

    bool degenerate() const noexcept { return !value.has_value(); }
};

/// Average ranks of `values` (1-based, ascending).
std::vector<double> fractional_ranks(std::span<const double> values);

/// Ascending-by-error ranking; throws std::invalid_argument on NaN.
Ranking rank_methods(std::span<const MethodScore> scores);

/// Pearson correlation of two rank vectors.
Similarity rank_correlation(std::span<const double> r1, std::span<const double> r2);

/// Spearman similarity of two rankings over the same method set.
Similarity spearman(const Ranking& r1, const Ranking& r2);

/// Scores of the first k reference methods, in reference order.
std::vector<MethodScore> top_k_subset(const ReferenceRanking& reference, std::size_t k,
                                      std::span<const MethodScore> scores);

} // namespace rankstab
