#include "srf/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "srf/rng.hpp"

namespace srf {

std::optional<double> cross_correlation_at_lag(std::span<const double> x,
                                               std::span<const double> y, int tau) {
    const int nx = static_cast<int>(x.size());
    const int ny = static_cast<int>(y.size());
    // Overlap: indices t with 0 <= t < nx and 0 <= t + tau < ny.
    const int lo = std::max(0, -tau);
    const int hi = std::min(nx, ny - tau);
    const int n = hi - lo;
    if (n < 3) return std::nullopt;

    double mean_x = 0.0, mean_y = 0.0;
    for (int t = lo; t < hi; ++t) {
        mean_x += x[static_cast<std::size_t>(t)];
        mean_y += y[static_cast<std::size_t>(t + tau)];
    }
    mean_x /= n;
    mean_y /= n;

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (int t = lo; t < hi; ++t) {
        const double dx = x[static_cast<std::size_t>(t)] - mean_x;
        const double dy = y[static_cast<std::size_t>(t + tau)] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return sxy / (std::sqrt(sxx) * std::sqrt(syy));
}

double similarity(std::span<const double> x, std::span<const double> y) {
    const int nx = static_cast<int>(x.size());
    const int ny = static_cast<int>(y.size());
    if (nx < 3 || ny < 3) throw NoValidLag("series shorter than 3 points");
    double best = -std::numeric_limits<double>::infinity();
    bool defined = false;
    for (int tau = -(ny - 3); tau <= nx - 3; ++tau) {
        const auto cc = cross_correlation_at_lag(x, y, tau);
        if (!cc.has_value()) continue;
        defined = true;
        best = std::max(best, *cc);
    }
    if (!defined) throw NoValidLag("no lag with a defined cross-correlation");
    return best;
}

int SimilarityMatrix::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] == id) return static_cast<int>(i);
    }
    return -1;
}

SimilarityMatrix build_matrix(const std::vector<DefectSeries>& pool) {
    const std::size_t n = pool.size();
    if (n < 2) throw std::invalid_argument("similarity matrix needs at least 2 series");
    SimilarityMatrix matrix;
    matrix.ids.reserve(n);
    for (const DefectSeries& series : pool) matrix.ids.push_back(series.id());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (matrix.ids[i] == matrix.ids[j]) {
                throw std::invalid_argument("duplicate series id '" + matrix.ids[i] +
                                            "' in pool");
            }
        }
    }
    matrix.scores.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        matrix.scores[i][i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            double score;
            try {
                score = similarity(pool[i].counts(), pool[j].counts());
            } catch (const NoValidLag& e) {
                throw NoValidLag("pair ('" + pool[i].id() + "', '" + pool[j].id() +
                                 "'): " + e.what());
            }
            matrix.scores[i][j] = score;
            matrix.scores[j][i] = score;
        }
    }
    return matrix;
}

void to_json(nlohmann::json& j, const SimilarityMatrix& matrix) {
    j = nlohmann::json{{"ids", matrix.ids}, {"scores", matrix.scores}};
}

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        total += d * d;
    }
    return total;
}

}  // namespace

std::vector<int> kmeans(const std::vector<std::vector<double>>& points, int k,
                        std::uint64_t seed, int max_iterations) {
    const std::size_t n = points.size();
    if (n == 0) return {};
    k = std::max(1, std::min<int>(k, static_cast<int>(n)));
    Rng rng(seed);

    // k-means++ seeding.
    std::vector<std::vector<double>> centers;
    centers.reserve(static_cast<std::size_t>(k));
    centers.push_back(points[rng.below(n)]);
    std::vector<double> min_dist(n);
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double nearest = squared_distance(points[i], centers[0]);
            for (std::size_t c = 1; c < centers.size(); ++c) {
                nearest = std::min(nearest, squared_distance(points[i], centers[c]));
            }
            min_dist[i] = nearest;
            total += nearest;
        }
        std::size_t pick;
        if (total > 0.0) {
            const double threshold = rng.uniform01() * total;
            double cumulative = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                cumulative += min_dist[i];
                if (cumulative >= threshold) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.below(n);  // all points coincide with a center
        }
        centers.push_back(points[pick]);
    }

    std::vector<int> labels(n, 0);
    const std::size_t dims = points[0].size();
    for (int iter = 0; iter < max_iterations; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_dist = squared_distance(points[i], centers[0]);
            for (std::size_t c = 1; c < centers.size(); ++c) {
                const double d = squared_distance(points[i], centers[c]);
                if (d < best_dist) {
                    best_dist = d;
                    best = static_cast<int>(c);
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;

        std::vector<std::vector<double>> sums(centers.size(), std::vector<double>(dims, 0.0));
        std::vector<int> sizes(centers.size(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(labels[i]);
            ++sizes[c];
            for (std::size_t d = 0; d < dims; ++d) sums[c][d] += points[i][d];
        }
        // Drop empty clusters and re-pack labels.
        std::vector<int> remap(centers.size(), -1);
        std::size_t kept = 0;
        for (std::size_t c = 0; c < centers.size(); ++c) {
            if (sizes[c] == 0) continue;
            for (std::size_t d = 0; d < dims; ++d) sums[c][d] /= sizes[c];
            centers[kept] = std::move(sums[c]);
            remap[c] = static_cast<int>(kept);
            ++kept;
        }
        centers.resize(kept);
        for (std::size_t i = 0; i < n; ++i) labels[i] = remap[static_cast<std::size_t>(labels[i])];
        if (!changed) break;
    }
    return labels;
}

ClusterAssignment cluster_and_select(const SimilarityMatrix& matrix,
                                     const std::string& target_id, int k, std::uint64_t seed) {
    const int target = matrix.index_of(target_id);
    if (target < 0) {
        throw std::invalid_argument("target id '" + target_id + "' not in similarity matrix");
    }
    const std::size_t n = matrix.ids.size();

    ClusterAssignment assignment;
    assignment.k = k;
    assignment.ids = matrix.ids;
    assignment.labels = kmeans(matrix.scores, k, seed);
    const int clusters =
        assignment.labels.empty()
            ? 0
            : 1 + *std::max_element(assignment.labels.begin(), assignment.labels.end());
    assignment.collapsed = clusters < std::min<int>(k, static_cast<int>(n));
    assignment.target_cluster = assignment.labels[static_cast<std::size_t>(target)];

    for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<int>(i) != target &&
            assignment.labels[i] == assignment.target_cluster) {
            assignment.selected_ids.push_back(matrix.ids[i]);
        }
    }
    if (assignment.selected_ids.empty()) {
        // Singleton target cluster: fall back to the ceil(pool/k) series most
        // similar to the target so the pipeline stays total.
        assignment.fallback = true;
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < n; ++i) {
            if (static_cast<int>(i) != target) order.push_back(i);
        }
        const auto& row = matrix.scores[static_cast<std::size_t>(target)];
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
        const std::size_t want = std::min<std::size_t>(
            order.size(), (n + static_cast<std::size_t>(k) - 1) / static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < want; ++i) {
            assignment.selected_ids.push_back(matrix.ids[order[i]]);
        }
    }
    return assignment;
}

void to_json(nlohmann::json& j, const ClusterAssignment& assignment) {
    j = nlohmann::json{{"k", assignment.k},
                       {"ids", assignment.ids},
                       {"labels", assignment.labels},
                       {"target_cluster", assignment.target_cluster},
                       {"selected_ids", assignment.selected_ids},
                       {"fallback", assignment.fallback},
                       {"collapsed", assignment.collapsed}};
}

}  // namespace srf
