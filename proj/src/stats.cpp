#include "srf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace srf {

void to_json(nlohmann::json& j, const MetricTriple& m) {
    j = nlohmann::json{{"rmse", m.rmse}, {"mae", m.mae}, {"mape", m.mape}};
}

void from_json(const nlohmann::json& j, MetricTriple& m) {
    m.rmse = j.at("rmse").get<double>();
    m.mae = j.at("mae").get<double>();
    m.mape = j.at("mape").get<double>();
}

namespace {

std::string join_indices(const std::vector<std::size_t>& indices) {
    std::ostringstream out;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (i) out << ", ";
        out << indices[i];
    }
    return out.str();
}

}  // namespace

MapeUndefined::MapeUndefined(std::vector<std::size_t> indices)
    : std::runtime_error("MAPE undefined: actual value is zero at indices [" +
                         join_indices(indices) + "]"),
      zero_indices(std::move(indices)) {}

MetricTriple metrics(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size() || actual.empty()) {
        throw std::invalid_argument("metrics: sequences must have equal nonzero length");
    }
    std::vector<std::size_t> zeros;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) zeros.push_back(i);
    }
    if (!zeros.empty()) throw MapeUndefined(std::move(zeros));

    const auto n = static_cast<double>(actual.size());
    double sq = 0.0, abs_sum = 0.0, pct = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double err = predicted[i] - actual[i];
        sq += err * err;
        abs_sum += std::abs(err);
        pct += std::abs(err / actual[i]);
    }
    return MetricTriple{std::sqrt(sq / n), abs_sum / n, 100.0 * pct / n};
}

void to_json(nlohmann::json& j, const WtlTally& t) {
    j = nlohmann::json{{"win", t.wins}, {"tie", t.ties}, {"loss", t.losses}};
}

WtlTally wtl(std::span<const double> errors_a, std::span<const double> errors_b,
             double threshold) {
    if (errors_a.size() != errors_b.size()) {
        throw std::invalid_argument("wtl: target lists must align");
    }
    WtlTally tally;
    for (std::size_t i = 0; i < errors_a.size(); ++i) {
        const double a = errors_a[i];
        const double b = errors_b[i];
        if (a == b) {
            ++tally.ties;
        } else if (a < b) {
            ((b - a) / b >= threshold) ? ++tally.wins : ++tally.ties;
        } else {
            ((a - b) / a >= threshold) ? ++tally.losses : ++tally.ties;
        }
    }
    return tally;
}

namespace {

struct RankedDiffs {
    std::vector<double> ranks;  // average ranks of |d|, parallel to diffs
    std::vector<bool> positive;
    double w_plus = 0.0;
    int n = 0;
    double tie_correction = 0.0;  // sum over groups of (t^3 - t)
};

RankedDiffs rank_differences(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("signed-rank: samples must pair up");
    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty()) throw AllZeroDifferences("all paired differences are zero");

    std::vector<std::size_t> order(diffs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return std::abs(diffs[i]) < std::abs(diffs[j]);
    });

    RankedDiffs out;
    out.n = static_cast<int>(diffs.size());
    out.ranks.resize(diffs.size());
    out.positive.resize(diffs.size());
    for (std::size_t i = 0; i < diffs.size(); ++i) out.positive[i] = diffs[i] > 0.0;

    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() &&
               std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) {
            ++j;
        }
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        const auto group = static_cast<double>(j - i + 1);
        out.tie_correction += group * group * group - group;
        for (std::size_t k = i; k <= j; ++k) out.ranks[order[k]] = avg_rank;
        i = j + 1;
    }
    for (std::size_t k = 0; k < diffs.size(); ++k) {
        if (out.positive[k]) out.w_plus += out.ranks[k];
    }
    return out;
}

/// Exact two-sided p over the 2^n equiprobable sign assignments, computed
/// with a distribution-of-sums recursion on doubled ranks (average ranks of
/// tied groups double to integers, so the arithmetic stays exact).
double exact_p(const RankedDiffs& ranked) {
    std::vector<int> doubled(ranked.ranks.size());
    long long max_sum = 0;
    for (std::size_t i = 0; i < ranked.ranks.size(); ++i) {
        doubled[i] = static_cast<int>(std::llround(2.0 * ranked.ranks[i]));
        max_sum += doubled[i];
    }
    std::vector<double> counts(static_cast<std::size_t>(max_sum) + 1, 0.0);
    counts[0] = 1.0;
    long long reach = 0;
    for (int r : doubled) {
        reach += r;
        for (long long s = reach; s >= r; --s) {
            counts[static_cast<std::size_t>(s)] += counts[static_cast<std::size_t>(s - r)];
        }
    }
    const auto w2 = static_cast<long long>(std::llround(2.0 * ranked.w_plus));
    const double total = std::ldexp(1.0, ranked.n);  // 2^n
    double below = 0.0, above = 0.0;
    for (long long s = 0; s <= max_sum; ++s) {
        if (s <= w2) below += counts[static_cast<std::size_t>(s)];
        if (s >= w2) above += counts[static_cast<std::size_t>(s)];
    }
    return std::min(1.0, 2.0 * std::min(below, above) / total);
}

double normal_p(const RankedDiffs& ranked) {
    const double n = ranked.n;
    const double mean = n * (n + 1.0) / 4.0;
    const double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - ranked.tie_correction / 48.0;
    if (variance <= 0.0) return 1.0;
    double shifted = ranked.w_plus - mean;
    // Continuity correction toward the mean.
    if (shifted > 0.5) {
        shifted -= 0.5;
    } else if (shifted < -0.5) {
        shifted += 0.5;
    } else {
        shifted = 0.0;
    }
    const double z = std::abs(shifted) / std::sqrt(variance);
    return std::min(1.0, 2.0 * normal_sf(z));
}

constexpr int kExactLimit = 25;

}  // namespace

double wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    const RankedDiffs ranked = rank_differences(a, b);
    return ranked.n <= kExactLimit ? exact_p(ranked) : normal_p(ranked);
}

double wilcoxon_exact_p(std::span<const double> a, std::span<const double> b) {
    return exact_p(rank_differences(a, b));
}

double wilcoxon_normal_p(std::span<const double> a, std::span<const double> b) {
    return normal_p(rank_differences(a, b));
}

FriedmanResult friedman(const std::vector<std::vector<double>>& errors) {
    const std::size_t targets = errors.size();
    if (targets < 2) throw std::invalid_argument("friedman: need at least 2 targets");
    const std::size_t models = errors[0].size();
    if (models < 2) throw std::invalid_argument("friedman: need at least 2 models");
    for (const auto& row : errors) {
        if (row.size() != models) throw std::invalid_argument("friedman: ragged matrix");
    }

    std::vector<double> rank_sums(models, 0.0);
    bool any_varying_row = false;
    std::vector<std::size_t> order(models);
    for (const auto& row : errors) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t i, std::size_t j) { return row[i] < row[j]; });
        std::size_t i = 0;
        while (i < models) {
            std::size_t j = i;
            while (j + 1 < models && row[order[j + 1]] == row[order[i]]) ++j;
            const double avg_rank =
                (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
            for (std::size_t k = i; k <= j; ++k) rank_sums[order[k]] += avg_rank;
            i = j + 1;
        }
        if (row[order[0]] != row[order[models - 1]]) any_varying_row = true;
    }
    if (!any_varying_row) {
        throw DegenerateRanks("every target ranks all models equally");
    }

    const auto n = static_cast<double>(targets);
    const auto k = static_cast<double>(models);
    double sum_sq = 0.0;
    for (double rank_sum : rank_sums) sum_sq += rank_sum * rank_sum;
    FriedmanResult result;
    result.statistic = 12.0 / (n * k * (k + 1.0)) * sum_sq - 3.0 * n * (k + 1.0);
    result.df = static_cast<int>(models) - 1;
    result.p_value = chi_square_sf(result.statistic, result.df);
    return result;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty set");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return (values[mid - 1] + values[mid]) / 2.0;
}

namespace {

/// Regularized upper incomplete gamma Q(a, x); series expansion of P for
/// x < a+1 (where Q is not small), Lentz continued fraction for Q otherwise
/// so tiny tail probabilities keep full precision.
double gamma_q(double a, double x) {
    if (x <= 0.0) return 1.0;
    const double log_prefactor = a * std::log(x) - x - std::lgamma(a);
    if (x < a + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        double denom = a;
        for (int i = 0; i < 500; ++i) {
            denom += 1.0;
            term *= x / denom;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return 1.0 - sum * std::exp(log_prefactor);
    }
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(log_prefactor) * h;
}

}  // namespace

double chi_square_sf(double x, int df) {
    if (df <= 0) throw std::invalid_argument("chi_square_sf: df must be positive");
    if (x <= 0.0) return 1.0;
    return gamma_q(df / 2.0, x / 2.0);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace srf
