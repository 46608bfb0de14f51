#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "srf/corpus.hpp"

namespace srf {

struct NoValidLag : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Normalized cross-correlation of x(t) against y(t + tau) over their
/// overlapping time points, using the overlap segments' own means. Returns
/// nullopt when the overlap has fewer than 3 points or either segment has
/// zero variance (the lag is skipped rather than defined as 0).
std::optional<double> cross_correlation_at_lag(std::span<const double> x,
                                               std::span<const double> y, int tau);

/// Maximum cross-correlation over all lags tau in [-(len(y)-3), len(x)-3]
/// with a defined value. Throws NoValidLag when every lag is undefined
/// (e.g. a constant series).
double similarity(std::span<const double> x, std::span<const double> y);

/// Symmetric matrix of pairwise similarity scores; each unordered pair is
/// computed once, the diagonal is exactly 1.
struct SimilarityMatrix {
    std::vector<std::string> ids;
    std::vector<std::vector<double>> scores;

    int index_of(const std::string& id) const;
};

SimilarityMatrix build_matrix(const std::vector<DefectSeries>& pool);

void to_json(nlohmann::json& j, const SimilarityMatrix& matrix);

/// Result of clustering the similarity matrix and picking the target's
/// cluster mates as the training pool.
struct ClusterAssignment {
    int k = 0;
    std::vector<std::string> ids;
    std::vector<int> labels;  // parallel to ids
    int target_cluster = -1;
    std::vector<std::string> selected_ids;  // non-target members of the target's cluster
    bool fallback = false;   // target was a singleton; nearest series substituted
    bool collapsed = false;  // k-means ended with fewer than k clusters
};

void to_json(nlohmann::json& j, const ClusterAssignment& assignment);

/// K-means (k-means++ init, at most 300 iterations) over the matrix rows,
/// each series represented by its similarity profile. When the target ends
/// up alone in its cluster, the ceil(pool/k) series most similar to the
/// target are selected instead and the assignment is flagged.
ClusterAssignment cluster_and_select(const SimilarityMatrix& matrix,
                                     const std::string& target_id, int k = 3,
                                     std::uint64_t seed = 0);

/// Plain Lloyd k-means with k-means++ seeding; exposed for reuse and tests.
/// Returns one label per point; empty clusters are dropped and labels
/// re-packed, so the label count may be below k.
std::vector<int> kmeans(const std::vector<std::vector<double>>& points, int k,
                        std::uint64_t seed, int max_iterations = 300);

}  // namespace srf
