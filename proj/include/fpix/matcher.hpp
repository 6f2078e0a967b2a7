// Euclidean comparison of index vectors and the accept/reject rule.
#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fpix/indexing.hpp"

namespace fpix {

/// Indexes of different mode or dimension, empty inputs, bad thresholds.
class MatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using LabeledIndex = std::pair<std::string, IndexVector>;

struct SimilarityMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> d;

    std::size_t size() const noexcept { return labels.size(); }
};

struct MatchDecision {
    std::string best_id;
    double distance = 0.0;
    bool accepted = false;
    double threshold = 0.0;
};

double euclidean(const IndexVector& x, const IndexVector& y);

/// Pairwise distances; each unordered pair is evaluated once and mirrored.
SimilarityMatrix similarity_matrix(std::span<const LabeledIndex> entries);

/// Nearest record (ties to the bytewise-smallest label); accepted iff the
/// distance is at most `threshold`.
MatchDecision decide(const IndexVector& query, std::span<const LabeledIndex> records, double threshold);

/// Half the smallest off-diagonal entry.
double suggest_threshold(const SimilarityMatrix& m);

}  // namespace fpix
