#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace srf {

struct MetricTriple {
    double rmse = 0.0;
    double mae = 0.0;
    double mape = 0.0;  // percent
};

void to_json(nlohmann::json& j, const MetricTriple& m);
void from_json(const nlohmann::json& j, MetricTriple& m);

struct MapeUndefined : std::runtime_error {
    explicit MapeUndefined(std::vector<std::size_t> indices);
    std::vector<std::size_t> zero_indices;
};

/// RMSE, MAE and MAPE (in percent) of predictions against actuals.
/// Throws MapeUndefined listing the indices where the actual value is zero.
MetricTriple metrics(std::span<const double> actual, std::span<const double> predicted);

struct WtlTally {
    int wins = 0;
    int ties = 0;
    int losses = 0;
};

void to_json(nlohmann::json& j, const WtlTally& t);

/// Per-target win/tie/loss comparison of candidate errors `a` against
/// baseline errors `b`. A wins on a target when its error is at least
/// `threshold` relatively lower than b's ((b-a)/b >= threshold), loses when
/// (a-b)/a >= threshold, ties otherwise; a pair of exact zeros ties.
WtlTally wtl(std::span<const double> errors_a, std::span<const double> errors_b,
             double threshold = 0.05);

struct AllZeroDifferences : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two-sided signed-rank test p-value for paired samples. Zero differences
/// are dropped; tied absolute differences receive average ranks. The exact
/// sign-assignment distribution is used for up to 25 effective pairs, the
/// normal approximation with continuity and tie correction above that.
double wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

/// Forced-method variants, exposed so the two routes can be compared.
double wilcoxon_exact_p(std::span<const double> a, std::span<const double> b);
double wilcoxon_normal_p(std::span<const double> a, std::span<const double> b);

struct DegenerateRanks : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FriedmanResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
};

/// Friedman rank test over an errors matrix (rows = targets, columns =
/// models), chi-square approximation with average-rank ties. Throws
/// DegenerateRanks when every row is constant.
FriedmanResult friedman(const std::vector<std::vector<double>>& errors);

/// Median with the midpoint convention for even counts. Takes a copy.
double median(std::vector<double> values);

/// Upper tail of the chi-square distribution with `df` degrees of freedom.
double chi_square_sf(double x, int df);

/// Upper tail of the standard normal distribution.
double normal_sf(double z);

}  // namespace srf
