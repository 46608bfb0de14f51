#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "srf/corpus.hpp"
#include "srf/srgm.hpp"

namespace srf {

struct FitConfig {
    int max_iterations = 500;
    double rel_tolerance = 1e-10;  // relative residual-sum change per accepted step
    int starts = 16;               // deterministic low-discrepancy multi-start
};

/// Outcome of fitting one model kind. `mse` is the mean squared residual on
/// the fitted prefix; fits where every start diverges or produces
/// non-finite residuals carry converged=false and mse=+infinity.
struct FitResult {
    SrgmSpec spec;
    double mse = std::numeric_limits<double>::infinity();
    bool converged = false;
};

struct AllFitsFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Least-squares fit of one kind to a series prefix. Damped least squares
/// (Levenberg-Marquardt) runs in a transformed parameter space (log for a,
/// b, c; logit for r and the Gompertz b, c) so box constraints hold by
/// construction; b's unit upper bound is relaxed to b > 0 for GO/YDSS/ISS.
/// Sixteen deterministic starts from a Halton grid over the transformed
/// space guard against initialization sensitivity. Never throws; failure is
/// encoded in the result.
FitResult fit(const DefectSeries& prefix, ModelKind kind, const FitConfig& config = {});

/// Fit all six kinds and return the one with the lowest MSE. MSEs equal
/// within a small relative margin count as ties, broken by the fixed kind
/// order GO, YDSS, ISS, GG, Logistic, Gompertz. Throws AllFitsFailed when
/// every kind fails.
std::pair<ModelKind, FitResult> select_best(const DefectSeries& prefix,
                                            const FitConfig& config = {});

void to_json(nlohmann::json& j, const FitResult& result);
void from_json(const nlohmann::json& j, FitResult& result);

/// JSON report of all six fits plus the selected best kind.
nlohmann::json fit_report(const DefectSeries& prefix, const FitConfig& config = {});

}  // namespace srf
