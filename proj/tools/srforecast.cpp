// Command-line front door: synthetic pool generation, model fitting,
// similarity clustering, single-target prediction, full campaigns and
// ablation sweeps. All randomness funnels through --seed so any output can
// be reproduced with one line.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "srf/corpus.hpp"
#include "srf/forecaster.hpp"
#include "srf/harness.hpp"
#include "srf/rng.hpp"
#include "srf/similarity.hpp"
#include "srf/srgm_fit.hpp"
#include "srf/stats.hpp"
#include "srf/svg.hpp"
#include "srf/synthgen.hpp"

namespace {

void emit(const nlohmann::json& j, const std::optional<std::string>& out_path) {
    if (out_path) {
        std::ofstream out(*out_path);
        if (!out) throw std::runtime_error("cannot write " + *out_path);
        out << j.dump(2) << '\n';
    } else {
        std::cout << j.dump(2) << '\n';
    }
}

srf::ExperimentConfig load_config_with_overrides(const std::string& config_path,
                                                 const std::optional<std::uint64_t>& seed,
                                                 const std::optional<std::string>& out_dir,
                                                 const std::optional<int>& jobs,
                                                 const std::optional<int>& epochs) {
    srf::ExperimentConfig config;
    if (!config_path.empty()) config = srf::load_experiment_config(config_path);
    if (seed) config.seed = *seed;
    if (out_dir) config.output_dir = *out_dir;
    if (jobs) config.jobs = *jobs;
    if (epochs) config.train.epochs = *epochs;
    return config;
}

void print_campaign_summary(const nlohmann::json& report) {
    std::cout << "targets: " << report.at("targets").size() << " (included "
              << report.at("included_targets").size() << ", excluded entries "
              << report.at("excluded").size() << ")\n";
    const auto& aggregates = report.at("aggregates");
    for (auto it = aggregates.begin(); it != aggregates.end(); ++it) {
        const auto& median = it.value().at("median");
        std::printf("  %-12s median rmse %.4f  mae %.4f  mape %.4f\n", it.key().c_str(),
                    median.at("rmse").get<double>(), median.at("mae").get<double>(),
                    median.at("mape").get<double>());
    }
    if (report.contains("wtl")) {
        const auto& wtl = report.at("wtl");
        for (auto it = wtl.begin(); it != wtl.end(); ++it) {
            const auto& mae = it.value().at("mae");
            std::printf("  %-28s W/T/L (mae) %d/%d/%d\n", it.key().c_str(),
                        mae.at("win").get<int>(), mae.at("tie").get<int>(),
                        mae.at("loss").get<int>());
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Defect-discovery forecasting with synthetic growth-curve training pools"};
    app.require_subcommand(1);

    // --- synth ---------------------------------------------------------
    auto* synth_cmd = app.add_subcommand(
        "synth", "Generate a pool of synthetic cumulative defect series");
    int synth_count = 59;
    std::uint64_t synth_seed = 0;
    std::string synth_out = "pools";
    srf::SynthConfig synth_config;
    synth_cmd->add_option("--count", synth_count, "Number of series (default 59)");
    synth_cmd->add_option("--seed", synth_seed, "Random seed (default 0)");
    synth_cmd->add_option("--out", synth_out, "Output directory (CSV files + manifest.json)");
    synth_cmd->add_option("--noise", synth_config.noise_sd,
                          "Multiplicative noise standard deviation (default 0.001)");
    synth_cmd->add_option("--threshold", synth_config.termination_fraction,
                          "Termination fraction of the asymptote a (default 0.95)");
    synth_cmd->add_option("--max-length", synth_config.max_length,
                          "Maximum series length (default 512)");
    synth_cmd->add_option("--min-length", synth_config.min_length,
                          "Minimum series length (default 9 = window 8 + 1)");

    // --- fit -----------------------------------------------------------
    auto* fit_cmd =
        app.add_subcommand("fit", "Fit all six growth models and report the best by MSE");
    std::string fit_input;
    bool fit_half = false;
    std::optional<std::string> fit_out;
    fit_cmd->add_option("--input", fit_input, "Series file (.csv or .json)")->required();
    fit_cmd->add_flag("--half", fit_half, "Fit the first ceil(L/2) points only");
    fit_cmd->add_option("--out", fit_out, "Write the JSON report here instead of stdout");

    // --- cluster -------------------------------------------------------
    auto* cluster_cmd = app.add_subcommand(
        "cluster", "Similarity matrix + k-means selection for a target series");
    std::string cluster_pool, cluster_target;
    int cluster_k = 3;
    std::uint64_t cluster_seed = 0;
    std::optional<std::string> cluster_out;
    bool cluster_full = false;
    cluster_cmd->add_option("--pool", cluster_pool, "Directory of candidate series")->required();
    cluster_cmd->add_option("--target", cluster_target, "Target series file")->required();
    cluster_cmd->add_option("--k", cluster_k, "Number of clusters (default 3)");
    cluster_cmd->add_option("--seed", cluster_seed, "Random seed (default 0)");
    cluster_cmd->add_flag("--full", cluster_full,
                          "Use the whole target series instead of its observed half");
    cluster_cmd->add_option("--out", cluster_out, "Write JSON here instead of stdout");

    // --- predict -------------------------------------------------------
    auto* predict_cmd = app.add_subcommand(
        "predict", "Run the full pipeline on one target and forecast its holdout half");
    std::string predict_target, predict_config_path, predict_corpus;
    std::string predict_mode = "synthetic";
    std::optional<std::uint64_t> predict_seed;
    std::optional<std::string> predict_out;
    std::optional<int> predict_epochs;
    predict_cmd->add_option("--target", predict_target, "Target series file")->required();
    predict_cmd->add_option("--config", predict_config_path, "Experiment config JSON");
    predict_cmd->add_option("--corpus", predict_corpus,
                            "Real corpus directory (real/hybrid modes)");
    predict_cmd->add_option("--mode", predict_mode,
                            "Training pool: synthetic | real | hybrid (default synthetic)");
    predict_cmd->add_option("--seed", predict_seed, "Random seed override");
    predict_cmd->add_option("--epochs", predict_epochs, "Training epochs override (default 300)");
    predict_cmd->add_option("--out", predict_out, "Write JSON here instead of stdout");

    // --- campaign ------------------------------------------------------
    auto* campaign_cmd = app.add_subcommand(
        "campaign", "Leave-one-out evaluation campaign over a corpus directory");
    std::string campaign_config_path;
    std::optional<std::uint64_t> campaign_seed;
    std::optional<std::string> campaign_out;
    std::optional<int> campaign_jobs, campaign_epochs;
    campaign_cmd->add_option("--config", campaign_config_path, "Experiment config JSON")
        ->required();
    campaign_cmd->add_option("--seed", campaign_seed, "Random seed override");
    campaign_cmd->add_option("--out", campaign_out, "Output directory override");
    campaign_cmd->add_option("--jobs", campaign_jobs,
                             "Worker threads (default: available parallelism)");
    campaign_cmd->add_option("--epochs", campaign_epochs,
                             "Training epochs override (default 300)");

    // --- ablate --------------------------------------------------------
    auto* ablate_cmd = app.add_subcommand(
        "ablate", "Sweep the generation termination threshold or the noise level");
    std::string ablate_kind, ablate_config_path;
    std::optional<std::uint64_t> ablate_seed;
    std::optional<std::string> ablate_out;
    std::optional<int> ablate_jobs, ablate_epochs;
    ablate_cmd->add_option("--kind", ablate_kind, "threshold | noise")->required();
    ablate_cmd->add_option("--config", ablate_config_path, "Experiment config JSON")->required();
    ablate_cmd->add_option("--seed", ablate_seed, "Random seed override");
    ablate_cmd->add_option("--out", ablate_out, "Output directory override");
    ablate_cmd->add_option("--jobs", ablate_jobs, "Worker threads");
    ablate_cmd->add_option("--epochs", ablate_epochs, "Training epochs override");

    // --- report --------------------------------------------------------
    auto* report_cmd =
        app.add_subcommand("report", "Print the summary of an existing report.json");
    std::string report_input;
    report_cmd->add_option("--input", report_input, "Path to report.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (*synth_cmd) {
            synth_config.count_n = synth_count;
            synth_config.seed = synth_seed;
            const auto pool = srf::generate_pool(synth_config);
            srf::save_pool(pool, synth_config, synth_out);
            std::cout << "wrote " << pool.size() << " series to " << synth_out << '\n';
        } else if (*fit_cmd) {
            srf::DefectSeries series = srf::load_series(fit_input);
            if (fit_half) series = srf::split_half(series).observed;
            emit(srf::fit_report(series), fit_out);
        } else if (*cluster_cmd) {
            std::vector<srf::DefectSeries> pool = srf::load_corpus_dir(cluster_pool);
            srf::DefectSeries target = srf::load_series(cluster_target);
            if (!cluster_full) target = srf::split_half(target).observed;
            pool.push_back(target);
            const srf::SimilarityMatrix matrix = srf::build_matrix(pool);
            const srf::ClusterAssignment assignment =
                srf::cluster_and_select(matrix, target.id(), cluster_k, cluster_seed);
            nlohmann::json j{{"matrix", matrix}, {"assignment", assignment}};
            emit(j, cluster_out);
        } else if (*predict_cmd) {
            srf::ExperimentConfig config = load_config_with_overrides(
                predict_config_path, predict_seed, std::nullopt, std::nullopt, predict_epochs);
            config.pool_mode = srf::pool_mode_from_string(predict_mode);
            if (!predict_corpus.empty()) config.corpus_dir = predict_corpus;

            const srf::DefectSeries target = srf::load_series(predict_target);
            std::vector<srf::DefectSeries> real_pool;
            if (config.pool_mode != srf::PoolMode::SyntheticOnly ||
                !config.corpus_dir.empty()) {
                if (!config.corpus_dir.empty() &&
                    std::filesystem::is_directory(config.corpus_dir)) {
                    for (auto& series : srf::load_corpus_dir(config.corpus_dir)) {
                        if (series.id() != target.id()) real_pool.push_back(std::move(series));
                    }
                }
            }
            const std::uint64_t target_seed = srf::derive_stream(config.seed, 0);
            srf::RunOutput output;
            switch (config.pool_mode) {
                case srf::PoolMode::SyntheticOnly:
                    // With a corpus the pool matches its leave-one-out size;
                    // without one the configured count_n applies.
                    output = srf::run_dsc(target, real_pool, config, target_seed,
                                          config.synth_multiplier);
                    break;
                case srf::PoolMode::RealOnly:
                    output = srf::run_dc(target, real_pool, config, target_seed);
                    break;
                case srf::PoolMode::Hybrid:
                    output = srf::run_hybrid(target, real_pool, config, target_seed,
                                             config.synth_multiplier);
                    break;
            }
            nlohmann::json j{{"target", target.id()},
                             {"mode", to_string(config.pool_mode)},
                             {"horizon", output.horizon},
                             {"forecast", output.forecast},
                             {"metrics", output.metrics},
                             {"selected_ids", output.selected_ids},
                             {"fallback", output.fallback}};
            emit(j, predict_out);
        } else if (*campaign_cmd) {
            const srf::ExperimentConfig config = load_config_with_overrides(
                campaign_config_path, campaign_seed, campaign_out, campaign_jobs,
                campaign_epochs);
            const nlohmann::json report = srf::run_campaign(config);
            std::cout << "report written to " << (config.output_dir / "report.json").string()
                      << '\n';
            print_campaign_summary(report);
        } else if (*ablate_cmd) {
            const srf::ExperimentConfig config = load_config_with_overrides(
                ablate_config_path, ablate_seed, ablate_out, ablate_jobs, ablate_epochs);
            srf::AblationKind kind;
            if (ablate_kind == "threshold") {
                kind = srf::AblationKind::Threshold;
            } else if (ablate_kind == "noise") {
                kind = srf::AblationKind::Noise;
            } else {
                std::cerr << "unknown ablation kind: " << ablate_kind << '\n';
                return 2;
            }
            const nlohmann::json report = srf::run_ablation(kind, config);
            std::cout << "ablation report written to "
                      << (config.output_dir / "ablation_report.json").string() << '\n';
            for (const auto& row : report.at("results")) {
                std::printf("  %s = %-7g median mae %.4f\n",
                            report.at("parameter").get<std::string>().c_str(),
                            row.at(report.at("parameter").get<std::string>()).get<double>(),
                            row.at("median").at("mae").get<double>());
            }
        } else if (*report_cmd) {
            std::ifstream in(report_input);
            if (!in) throw std::runtime_error("cannot open " + report_input);
            nlohmann::json report;
            in >> report;
            print_campaign_summary(report);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
