#include "fpix/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fpix {

namespace {

void require_comparable(const IndexVector& x, const IndexVector& y) {
    if (x.mode != y.mode) {
        throw MatchError("cannot compare " + std::string(to_string(x.mode)) + " index with " +
                         std::string(to_string(y.mode)) + " index");
    }
    if (x.dim() != y.dim()) {
        throw MatchError("cannot compare indexes of dimension " + std::to_string(x.dim()) + " and " +
                         std::to_string(y.dim()));
    }
}

}  // namespace

double euclidean(const IndexVector& x, const IndexVector& y) {
    require_comparable(x, y);
    double sum = 0.0;
    for (std::size_t i = 0; i < x.dim(); ++i) {
        const double diff = x.components[i] - y.components[i];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

SimilarityMatrix similarity_matrix(std::span<const LabeledIndex> entries) {
    if (entries.empty()) throw MatchError("similarity matrix needs at least one index");
    for (const auto& e : entries) require_comparable(entries.front().second, e.second);

    const std::size_t n = entries.size();
    SimilarityMatrix m;
    m.labels.reserve(n);
    for (const auto& e : entries) m.labels.push_back(e.first);
    m.d.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dist = euclidean(entries[i].second, entries[j].second);
            m.d[i][j] = dist;
            m.d[j][i] = dist;
        }
    return m;
}

MatchDecision decide(const IndexVector& query, std::span<const LabeledIndex> records, double threshold) {
    if (records.empty()) throw MatchError("no enrolled records to match against");
    if (!(threshold > 0.0) || !std::isfinite(threshold)) throw MatchError("threshold must be a positive number");

    const LabeledIndex* best = nullptr;
    double best_distance = std::numeric_limits<double>::infinity();
    for (const auto& rec : records) {
        const double dist = euclidean(query, rec.second);
        if (!best || dist < best_distance || (dist == best_distance && rec.first < best->first)) {
            best = &rec;
            best_distance = dist;
        }
    }
    return MatchDecision{best->first, best_distance, best_distance <= threshold, threshold};
}

double suggest_threshold(const SimilarityMatrix& m) {
    if (m.size() < 2) throw MatchError("threshold suggestion needs at least two indexes");
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            if (i != j) smallest = std::min(smallest, m.d[i][j]);
    return 0.5 * smallest;
}

}  // namespace fpix
