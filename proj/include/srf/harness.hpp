#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "srf/corpus.hpp"
#include "srf/forecaster.hpp"
#include "srf/similarity.hpp"
#include "srf/stats.hpp"
#include "srf/synthgen.hpp"

namespace srf {

inline constexpr const char* kVersion = "0.1.0";

enum class PoolMode { SyntheticOnly, RealOnly, Hybrid };

const char* to_string(PoolMode mode);
PoolMode pool_mode_from_string(std::string_view name);

enum class VariantKind { Dsc, Dc, Hybrid, BestSrgm, Naive };

/// One model variant of a campaign. Deep variants may scale the synthetic
/// pool by `multiplier` (1n..5n of the leave-one-out pool size).
struct VariantSpec {
    VariantKind kind = VariantKind::Dsc;
    int multiplier = 1;

    std::string name() const;
};

VariantSpec variant_from_string(const std::string& name);

/// Full configuration of a leave-one-out campaign.
struct ExperimentConfig {
    std::filesystem::path corpus_dir;
    PoolMode pool_mode = PoolMode::SyntheticOnly;
    SynthConfig synth;
    TrainConfig train;
    int k = 3;
    int synth_multiplier = 1;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "out";
    std::vector<VariantSpec> variants;  // empty: deep variant from pool_mode + best_srgm
    double wtl_threshold = 0.05;
    int jobs = 0;  // 0 = hardware concurrency
    bool clamp_forecasts = false;

    std::vector<VariantSpec> resolved_variants() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& config);
void from_json(const nlohmann::json& j, ExperimentConfig& config);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Result of one variant run on one target.
struct RunOutput {
    MetricTriple metrics;
    std::vector<double> forecast;
    int horizon = 0;
    std::vector<std::string> selected_ids;
    bool fallback = false;
    bool collapsed = false;
    std::optional<std::string> best_kind;  // traditional-model baseline only
    std::optional<double> best_fit_mse;
    nlohmann::json pool_manifest;  // synthesizing variants only
};

/// Synthetic-pool pipeline: generate a per-target pool, cluster it together
/// with the target's observed half, train on the selected synthetic series
/// and score the forecast against the holdout. `real_pool` is the
/// leave-one-out set and only sizes the synthetic pool.
RunOutput run_dsc(const DefectSeries& target, const std::vector<DefectSeries>& real_pool,
                  const ExperimentConfig& config, std::uint64_t target_seed,
                  int multiplier = 1);

/// Same pipeline with the leave-one-out real series as the candidate pool
/// (no synthesis).
RunOutput run_dc(const DefectSeries& target, const std::vector<DefectSeries>& real_pool,
                 const ExperimentConfig& config, std::uint64_t target_seed);

/// Candidate pool = leave-one-out real series plus a synthetic pool.
RunOutput run_hybrid(const DefectSeries& target, const std::vector<DefectSeries>& real_pool,
                     const ExperimentConfig& config, std::uint64_t target_seed,
                     int multiplier = 1);

/// Fit all six traditional models to the observed half, extrapolate the
/// best one over the holdout times. Throws AllFitsFailed (target gets
/// excluded upstream).
RunOutput run_baseline_srgm(const DefectSeries& target);

/// Constant extrapolation of the last observed value.
RunOutput run_naive(const DefectSeries& target);

/// Leave-one-out campaign over the corpus: runs every resolved variant per
/// target, aggregates medians, win/tie/loss tallies, signed-rank tests per
/// pair and the Friedman test for 3+ variants. Writes report.json,
/// per_target/*.json, pools/* manifests and plots/*.svg under
/// config.output_dir, and returns the report. Targets where any variant
/// failed are recorded under "excluded" and left out of the aggregates.
nlohmann::json run_campaign(const ExperimentConfig& config);

enum class AblationKind { Threshold, Noise };

/// Sweep the synthetic-generation termination threshold
/// {0.85, 0.90, 0.95, 0.99} or the noise level {0.000 .. 0.007}, running
/// the synthetic-pool variant per setting. Writes ablation_report.json and
/// a line plot of median MAE per setting.
nlohmann::json run_ablation(AblationKind kind, const ExperimentConfig& config);

}  // namespace srf
