#include "srf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>

#include "srf/rng.hpp"
#include "srf/srgm_fit.hpp"
#include "srf/svg.hpp"

namespace srf {

const char* to_string(PoolMode mode) {
    switch (mode) {
        case PoolMode::SyntheticOnly: return "synthetic";
        case PoolMode::RealOnly: return "real";
        case PoolMode::Hybrid: return "hybrid";
    }
    return "?";
}

PoolMode pool_mode_from_string(std::string_view name) {
    if (name == "synthetic") return PoolMode::SyntheticOnly;
    if (name == "real") return PoolMode::RealOnly;
    if (name == "hybrid") return PoolMode::Hybrid;
    throw std::invalid_argument("unknown pool mode: " + std::string(name));
}

namespace {

const char* kind_name(VariantKind kind) {
    switch (kind) {
        case VariantKind::Dsc: return "dsc";
        case VariantKind::Dc: return "dc";
        case VariantKind::Hybrid: return "hybrid";
        case VariantKind::BestSrgm: return "best_srgm";
        case VariantKind::Naive: return "naive";
    }
    return "?";
}

// Seed roles of a per-target substream.
enum SeedRole : std::uint64_t { kSynthSeed = 0, kClusterSeed = 1, kSplitSeed = 2, kTrainSeed = 3 };

}  // namespace

std::string VariantSpec::name() const {
    std::string base = kind_name(kind);
    if (multiplier > 1 && (kind == VariantKind::Dsc || kind == VariantKind::Hybrid)) {
        base += "_" + std::to_string(multiplier) + "n";
    }
    return base;
}

VariantSpec variant_from_string(const std::string& name) {
    VariantSpec spec;
    std::string base = name;
    const auto underscore = name.rfind('_');
    if (underscore != std::string::npos && name.size() > underscore + 2 &&
        name.back() == 'n' && std::isdigit(static_cast<unsigned char>(name[underscore + 1]))) {
        base = name.substr(0, underscore);
        spec.multiplier = std::stoi(name.substr(underscore + 1, name.size() - underscore - 2));
    }
    if (base == "dsc") {
        spec.kind = VariantKind::Dsc;
    } else if (base == "dc") {
        spec.kind = VariantKind::Dc;
    } else if (base == "hybrid") {
        spec.kind = VariantKind::Hybrid;
    } else if (base == "best_srgm") {
        spec.kind = VariantKind::BestSrgm;
    } else if (base == "naive") {
        spec.kind = VariantKind::Naive;
    } else {
        throw std::invalid_argument("unknown variant: " + name);
    }
    return spec;
}

std::vector<VariantSpec> ExperimentConfig::resolved_variants() const {
    if (!variants.empty()) return variants;
    VariantSpec deep;
    deep.multiplier = synth_multiplier;
    switch (pool_mode) {
        case PoolMode::SyntheticOnly: deep.kind = VariantKind::Dsc; break;
        case PoolMode::RealOnly: deep.kind = VariantKind::Dc; break;
        case PoolMode::Hybrid: deep.kind = VariantKind::Hybrid; break;
    }
    return {deep, VariantSpec{VariantKind::BestSrgm, 1}};
}

void to_json(nlohmann::json& j, const ExperimentConfig& config) {
    nlohmann::json variants = nlohmann::json::array();
    for (const auto& v : config.variants) variants.push_back(v.name());
    j = nlohmann::json{{"corpus_dir", config.corpus_dir.string()},
                       {"pool_mode", to_string(config.pool_mode)},
                       {"synth", config.synth},
                       {"train", config.train},
                       {"k", config.k},
                       {"synth_multiplier", config.synth_multiplier},
                       {"seed", config.seed},
                       {"output_dir", config.output_dir.string()},
                       {"variants", std::move(variants)},
                       {"wtl_threshold", config.wtl_threshold},
                       {"jobs", config.jobs},
                       {"clamp_forecasts", config.clamp_forecasts}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& config) {
    config = ExperimentConfig{};
    if (j.contains("corpus_dir")) config.corpus_dir = j.at("corpus_dir").get<std::string>();
    if (j.contains("pool_mode")) {
        config.pool_mode = pool_mode_from_string(j.at("pool_mode").get<std::string>());
    }
    if (j.contains("synth")) config.synth = j.at("synth").get<SynthConfig>();
    if (j.contains("train")) config.train = j.at("train").get<TrainConfig>();
    config.k = j.value("k", config.k);
    config.synth_multiplier = j.value("synth_multiplier", config.synth_multiplier);
    config.seed = j.value("seed", config.seed);
    if (j.contains("output_dir")) config.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("variants")) {
        for (const auto& entry : j.at("variants")) {
            if (entry.is_string()) {
                config.variants.push_back(variant_from_string(entry.get<std::string>()));
            } else {
                VariantSpec spec = variant_from_string(entry.at("kind").get<std::string>());
                spec.multiplier = entry.value("multiplier", 1);
                config.variants.push_back(spec);
            }
        }
    }
    config.wtl_threshold = j.value("wtl_threshold", config.wtl_threshold);
    config.jobs = j.value("jobs", config.jobs);
    config.clamp_forecasts = j.value("clamp_forecasts", config.clamp_forecasts);
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return j.get<ExperimentConfig>();
}

namespace {

std::vector<double> clamp_non_decreasing(std::vector<double> forecast, double floor_value) {
    double running = floor_value;
    for (double& v : forecast) {
        running = std::max(running, v);
        v = running;
    }
    return forecast;
}

void check_leave_one_out(const std::string& target_id,
                         const std::vector<std::string>& selected_ids) {
    for (const auto& id : selected_ids) {
        if (id == target_id) {
            throw std::logic_error("leave-one-out violation: target '" + target_id +
                                   "' selected into its own training pool");
        }
    }
}

void ensure_finite(const MetricTriple& m) {
    if (!std::isfinite(m.rmse) || !std::isfinite(m.mae) || !std::isfinite(m.mape)) {
        throw std::runtime_error("non-finite forecast metrics");
    }
}

/// Shared deep pipeline: similarity over candidates + observed prefix,
/// clustering, training on the selected candidates, recursive forecast of
/// the holdout horizon.
RunOutput run_deep(const DefectSeries& target, std::vector<DefectSeries> candidates,
                   const ExperimentConfig& config, std::uint64_t target_seed) {
    const SplitSeries split = split_half(target);

    std::vector<DefectSeries> matrix_pool = candidates;
    matrix_pool.push_back(split.observed);
    const SimilarityMatrix matrix = build_matrix(matrix_pool);
    const ClusterAssignment assignment = cluster_and_select(
        matrix, target.id(), config.k, derive_stream(target_seed, kClusterSeed));
    check_leave_one_out(target.id(), assignment.selected_ids);

    std::vector<DefectSeries> selected;
    for (const auto& series : candidates) {
        if (std::find(assignment.selected_ids.begin(), assignment.selected_ids.end(),
                      series.id()) != assignment.selected_ids.end()) {
            selected.push_back(series);
        }
    }

    TrainConfig train_config = config.train;
    train_config.seed = derive_stream(target_seed, kTrainSeed);
    Rng split_rng(derive_stream(target_seed, kSplitSeed));
    const WindowSets windows = make_windows(selected, train_config, split_rng);
    const ForecastModel model = train(windows, train_config);

    RunOutput out;
    out.horizon = static_cast<int>(split.holdout.size());
    out.forecast = forecast(model, split.observed, out.horizon);
    if (config.clamp_forecasts) {
        out.forecast = clamp_non_decreasing(std::move(out.forecast), split.observed.counts().back());
    }
    out.metrics = metrics(split.holdout.counts(), out.forecast);
    ensure_finite(out.metrics);
    out.selected_ids = assignment.selected_ids;
    out.fallback = assignment.fallback;
    out.collapsed = assignment.collapsed;
    return out;
}

nlohmann::json pool_manifest_json(const std::vector<DefectSeries>& pool,
                                  std::uint64_t synth_seed, int count_n) {
    nlohmann::json series = nlohmann::json::array();
    for (const auto& s : pool) {
        nlohmann::json entry{{"id", s.id()}, {"length", s.size()}};
        if (s.generator().has_value()) entry["generator"] = *s.generator();
        series.push_back(std::move(entry));
    }
    return nlohmann::json{{"synth_seed", synth_seed}, {"count_n", count_n},
                          {"series", std::move(series)}};
}

std::vector<DefectSeries> make_synth_pool(const ExperimentConfig& config,
                                          std::size_t real_pool_size,
                                          std::uint64_t target_seed, int multiplier,
                                          nlohmann::json* manifest) {
    SynthConfig synth = config.synth;
    // Pool size matches the leave-one-out real pool; the configured count
    // only applies when no real corpus is in play.
    synth.count_n = multiplier * (real_pool_size > 0 ? static_cast<int>(real_pool_size)
                                                     : config.synth.count_n);
    synth.seed = derive_stream(target_seed, kSynthSeed);
    std::vector<DefectSeries> pool = generate_pool(synth);
    if (manifest) *manifest = pool_manifest_json(pool, synth.seed, synth.count_n);
    return pool;
}

}  // namespace

RunOutput run_dsc(const DefectSeries& target, const std::vector<DefectSeries>& real_pool,
                  const ExperimentConfig& config, std::uint64_t target_seed, int multiplier) {
    nlohmann::json manifest;
    std::vector<DefectSeries> pool =
        make_synth_pool(config, real_pool.size(), target_seed, multiplier, &manifest);
    RunOutput out = run_deep(target, std::move(pool), config, target_seed);
    out.pool_manifest = std::move(manifest);
    return out;
}

RunOutput run_dc(const DefectSeries& target, const std::vector<DefectSeries>& real_pool,
                 const ExperimentConfig& config, std::uint64_t target_seed) {
    if (real_pool.size() < 2) {
        throw std::invalid_argument("real-only pipeline needs at least 2 candidate series");
    }
    return run_deep(target, real_pool, config, target_seed);
}

RunOutput run_hybrid(const DefectSeries& target, const std::vector<DefectSeries>& real_pool,
                     const ExperimentConfig& config, std::uint64_t target_seed, int multiplier) {
    nlohmann::json manifest;
    std::vector<DefectSeries> pool =
        make_synth_pool(config, real_pool.size(), target_seed, multiplier, &manifest);
    std::vector<DefectSeries> combined = real_pool;
    combined.insert(combined.end(), pool.begin(), pool.end());
    RunOutput out = run_deep(target, std::move(combined), config, target_seed);
    out.pool_manifest = std::move(manifest);
    return out;
}

RunOutput run_baseline_srgm(const DefectSeries& target) {
    const SplitSeries split = split_half(target);
    auto [kind, fit_result] = select_best(split.observed);

    RunOutput out;
    out.horizon = static_cast<int>(split.holdout.size());
    out.forecast.reserve(split.holdout.size());
    for (int t : split.holdout.times()) {
        out.forecast.push_back(mean_value(fit_result.spec, static_cast<double>(t)));
    }
    out.metrics = metrics(split.holdout.counts(), out.forecast);
    ensure_finite(out.metrics);
    out.best_kind = to_string(kind);
    out.best_fit_mse = fit_result.mse;
    return out;
}

RunOutput run_naive(const DefectSeries& target) {
    const SplitSeries split = split_half(target);
    RunOutput out;
    out.horizon = static_cast<int>(split.holdout.size());
    out.forecast.assign(split.holdout.size(), split.observed.counts().back());
    out.metrics = metrics(split.holdout.counts(), out.forecast);
    ensure_finite(out.metrics);
    return out;
}

namespace {

struct VariantOutcome {
    bool ok = false;
    std::string error;
    RunOutput output;
};

VariantOutcome run_variant(const VariantSpec& variant, const DefectSeries& target,
                           const std::vector<DefectSeries>& loo_pool,
                           const ExperimentConfig& config, std::uint64_t target_seed) {
    VariantOutcome outcome;
    try {
        switch (variant.kind) {
            case VariantKind::Dsc:
                outcome.output = run_dsc(target, loo_pool, config, target_seed,
                                         variant.multiplier);
                break;
            case VariantKind::Dc:
                outcome.output = run_dc(target, loo_pool, config, target_seed);
                break;
            case VariantKind::Hybrid:
                outcome.output = run_hybrid(target, loo_pool, config, target_seed,
                                            variant.multiplier);
                break;
            case VariantKind::BestSrgm:
                outcome.output = run_baseline_srgm(target);
                break;
            case VariantKind::Naive:
                outcome.output = run_naive(target);
                break;
        }
        outcome.ok = true;
    } catch (const std::exception& e) {
        outcome.error = std::string("target '") + target.id() + "', variant '" +
                        variant.name() + "': " + e.what();
    }
    return outcome;
}

double metric_by_name(const MetricTriple& m, const std::string& name) {
    if (name == "rmse") return m.rmse;
    if (name == "mae") return m.mae;
    return m.mape;
}

const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names = {"rmse", "mae", "mape"};
    return names;
}

struct CampaignData {
    std::vector<DefectSeries> corpus;
    std::vector<VariantSpec> variants;
    // outcome[target][variant]
    std::vector<std::vector<VariantOutcome>> outcomes;
};

CampaignData execute_targets(const ExperimentConfig& config,
                             const std::vector<VariantSpec>& variants) {
    if (config.synth.min_length < config.train.window + 1) {
        throw std::invalid_argument(
            "synth.min_length must be at least train.window + 1 so every synthetic series "
            "yields a training sample");
    }
    CampaignData data;
    data.corpus = load_corpus_dir(config.corpus_dir);
    if (data.corpus.empty()) {
        throw std::runtime_error("no series found in " + config.corpus_dir.string());
    }
    data.variants = variants;
    data.outcomes.assign(data.corpus.size(), {});

    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    const int jobs = std::max(1, std::min<int>(config.jobs > 0 ? config.jobs : std::max(hw, 1),
                                               static_cast<int>(data.corpus.size())));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t index = next.fetch_add(1);
            if (index >= data.corpus.size()) break;
            const DefectSeries& target = data.corpus[index];
            std::vector<VariantOutcome> outcomes;
            try {
                std::vector<DefectSeries> loo_pool;
                loo_pool.reserve(data.corpus.size() - 1);
                for (std::size_t j = 0; j < data.corpus.size(); ++j) {
                    if (j != index) loo_pool.push_back(data.corpus[j]);
                }
                const std::uint64_t target_seed = derive_stream(config.seed, index);
                for (const VariantSpec& variant : data.variants) {
                    outcomes.push_back(
                        run_variant(variant, target, loo_pool, config, target_seed));
                }
            } catch (const std::exception& e) {
                outcomes.assign(data.variants.size(), VariantOutcome{});
                for (auto& outcome : outcomes) {
                    outcome.error = "target '" + target.id() + "': " + e.what();
                }
            }
            data.outcomes[index] = std::move(outcomes);
        }
    };

    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(jobs));
        for (int i = 0; i < jobs; ++i) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    return data;
}

nlohmann::json run_output_json(const RunOutput& output, bool include_forecast) {
    nlohmann::json j;
    j["metrics"] = output.metrics;
    j["horizon"] = output.horizon;
    if (include_forecast) j["forecast"] = output.forecast;
    if (!output.selected_ids.empty() || output.fallback) {
        j["selected_ids"] = output.selected_ids;
        j["fallback"] = output.fallback;
        j["collapsed"] = output.collapsed;
    }
    if (output.best_kind.has_value()) {
        j["best_kind"] = *output.best_kind;
        j["best_fit_mse"] = *output.best_fit_mse;
    }
    return j;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void write_campaign_plots(const std::filesystem::path& plots_dir,
                          const std::vector<VariantSpec>& variants,
                          const std::vector<std::size_t>& included,
                          const CampaignData& data, const nlohmann::json& wtl_section) {
    static const char* kColors[] = {"#3b6fb6", "#e08a2e", "#4a9a58", "#b65050", "#7d5ba6",
                                    "#5a5a5a"};
    static const char kMarkers[] = {'o', 'x', 's', 't', 'o', 'x'};
    for (const std::string& metric : metric_names()) {
        std::vector<PlotSeries> series;
        for (std::size_t vi = 0; vi < variants.size(); ++vi) {
            PlotSeries ps;
            ps.label = variants[vi].name();
            ps.color = kColors[vi % 6];
            ps.marker = kMarkers[vi % 6];
            for (std::size_t pos = 0; pos < included.size(); ++pos) {
                const auto& outcome = data.outcomes[included[pos]][vi];
                ps.x.push_back(static_cast<double>(pos));
                ps.y.push_back(metric_by_name(outcome.output.metrics, metric));
            }
            series.push_back(std::move(ps));
        }
        write_scatter_svg(plots_dir / ("scatter_" + metric + ".svg"),
                          "Per-target " + metric + " by variant", "target", metric, series,
                          /*log_y=*/true);
    }
    for (auto it = wtl_section.begin(); it != wtl_section.end(); ++it) {
        std::vector<BarGroup> groups;
        for (const std::string& metric : metric_names()) {
            const auto& tally = it.value().at(metric);
            groups.push_back(BarGroup{metric,
                                      {tally.at("win").get<double>(),
                                       tally.at("tie").get<double>(),
                                       tally.at("loss").get<double>()}});
        }
        write_bars_svg(plots_dir / ("wtl_" + it.key() + ".svg"), "Win/Tie/Loss: " + it.key(),
                       {"win", "tie", "loss"}, groups);
    }
}

nlohmann::json assemble_report(const ExperimentConfig& config, const CampaignData& data,
                               bool write_outputs) {
    const auto& variants = data.variants;
    std::vector<std::size_t> included;
    nlohmann::json excluded = nlohmann::json::array();
    for (std::size_t i = 0; i < data.corpus.size(); ++i) {
        bool all_ok = true;
        for (std::size_t v = 0; v < variants.size(); ++v) {
            if (!data.outcomes[i][v].ok) {
                all_ok = false;
                excluded.push_back({{"target", data.corpus[i].id()},
                                    {"variant", variants[v].name()},
                                    {"error", data.outcomes[i][v].error}});
            }
        }
        if (all_ok) included.push_back(i);
    }
    if (included.empty()) {
        throw std::runtime_error("every target failed; first error: " +
                                 (excluded.empty() ? std::string("?")
                                                   : excluded[0]["error"].get<std::string>()));
    }

    nlohmann::json report;
    {
        nlohmann::json cfg_json = config;
        report["provenance"] = {{"tool", "srforecast"},
                                {"version", kVersion},
                                {"seed", config.seed},
                                {"config", std::move(cfg_json)}};
    }
    {
        nlohmann::json names = nlohmann::json::array();
        for (const auto& v : variants) names.push_back(v.name());
        report["variants"] = std::move(names);
    }
    {
        nlohmann::json targets = nlohmann::json::array();
        for (const auto& s : data.corpus) targets.push_back(s.id());
        report["targets"] = std::move(targets);
        nlohmann::json included_ids = nlohmann::json::array();
        for (std::size_t i : included) included_ids.push_back(data.corpus[i].id());
        report["included_targets"] = std::move(included_ids);
    }
    report["excluded"] = std::move(excluded);

    nlohmann::json per_target = nlohmann::json::object();
    for (std::size_t i = 0; i < data.corpus.size(); ++i) {
        nlohmann::json entry = nlohmann::json::object();
        for (std::size_t v = 0; v < variants.size(); ++v) {
            const auto& outcome = data.outcomes[i][v];
            entry[variants[v].name()] =
                outcome.ok ? run_output_json(outcome.output, /*include_forecast=*/false)
                           : nlohmann::json{{"error", outcome.error}};
        }
        per_target[data.corpus[i].id()] = std::move(entry);
    }
    report["per_target"] = std::move(per_target);

    // Aggregates over the fully-successful targets.
    nlohmann::json aggregates = nlohmann::json::object();
    std::map<std::string, std::map<std::string, std::vector<double>>> errors;
    for (std::size_t v = 0; v < variants.size(); ++v) {
        const std::string name = variants[v].name();
        for (const std::string& metric : metric_names()) {
            auto& column = errors[name][metric];
            for (std::size_t i : included) {
                column.push_back(metric_by_name(data.outcomes[i][v].output.metrics, metric));
            }
        }
        aggregates[name] = {{"count", included.size()},
                            {"median",
                             {{"rmse", median(errors[name]["rmse"])},
                              {"mae", median(errors[name]["mae"])},
                              {"mape", median(errors[name]["mape"])}}}};
    }
    report["aggregates"] = std::move(aggregates);

    nlohmann::json wtl_section = nlohmann::json::object();
    nlohmann::json wilcoxon_section = nlohmann::json::object();
    for (std::size_t a = 0; a < variants.size(); ++a) {
        for (std::size_t b = a + 1; b < variants.size(); ++b) {
            const std::string key = variants[a].name() + "_vs_" + variants[b].name();
            nlohmann::json tallies = nlohmann::json::object();
            nlohmann::json pvalues = nlohmann::json::object();
            for (const std::string& metric : metric_names()) {
                const auto& ea = errors[variants[a].name()][metric];
                const auto& eb = errors[variants[b].name()][metric];
                tallies[metric] = wtl(ea, eb, config.wtl_threshold);
                try {
                    pvalues[metric] = wilcoxon_signed_rank(ea, eb);
                } catch (const AllZeroDifferences&) {
                    pvalues[metric] = nullptr;
                }
            }
            wtl_section[key] = std::move(tallies);
            wilcoxon_section[key] = std::move(pvalues);
        }
    }
    report["wtl"] = wtl_section;

    nlohmann::json tests{{"wilcoxon", std::move(wilcoxon_section)}};
    if (variants.size() >= 3 && included.size() >= 2) {
        nlohmann::json friedman_section = nlohmann::json::object();
        for (const std::string& metric : metric_names()) {
            std::vector<std::vector<double>> matrix;
            for (std::size_t pos = 0; pos < included.size(); ++pos) {
                std::vector<double> row;
                for (const auto& variant : variants) {
                    row.push_back(errors[variant.name()][metric][pos]);
                }
                matrix.push_back(std::move(row));
            }
            try {
                const FriedmanResult result = friedman(matrix);
                friedman_section[metric] = {{"statistic", result.statistic},
                                            {"df", result.df},
                                            {"p_value", result.p_value}};
            } catch (const DegenerateRanks&) {
                friedman_section[metric] = nullptr;
            }
        }
        tests["friedman"] = std::move(friedman_section);
    }
    report["tests"] = std::move(tests);

    if (write_outputs) {
        const auto& out_dir = config.output_dir;
        std::filesystem::create_directories(out_dir);
        write_json_file(out_dir / "report.json", report);
        for (std::size_t i = 0; i < data.corpus.size(); ++i) {
            nlohmann::json detail;
            detail["target"] = data.corpus[i].id();
            for (std::size_t v = 0; v < variants.size(); ++v) {
                const auto& outcome = data.outcomes[i][v];
                detail["variants"][variants[v].name()] =
                    outcome.ok ? run_output_json(outcome.output, /*include_forecast=*/true)
                               : nlohmann::json{{"error", outcome.error}};
                if (outcome.ok && !outcome.output.pool_manifest.is_null()) {
                    write_json_file(out_dir / "pools" /
                                        (data.corpus[i].id() + "__" + variants[v].name() +
                                         ".json"),
                                    outcome.output.pool_manifest);
                }
            }
            write_json_file(out_dir / "per_target" / (data.corpus[i].id() + ".json"), detail);
        }
        write_campaign_plots(out_dir / "plots", variants, included, data, wtl_section);
    }
    return report;
}

}  // namespace

nlohmann::json run_campaign(const ExperimentConfig& config) {
    const std::vector<VariantSpec> variants = config.resolved_variants();
    CampaignData data = execute_targets(config, variants);
    return assemble_report(config, data, /*write_outputs=*/true);
}

nlohmann::json run_ablation(AblationKind kind, const ExperimentConfig& config) {
    std::vector<double> settings;
    std::string parameter;
    if (kind == AblationKind::Threshold) {
        settings = {0.85, 0.90, 0.95, 0.99};
        parameter = "termination_fraction";
    } else {
        settings = {0.000, 0.001, 0.002, 0.003, 0.004, 0.005, 0.006, 0.007};
        parameter = "noise_sd";
    }

    VariantSpec deep;
    deep.kind = config.pool_mode == PoolMode::Hybrid ? VariantKind::Hybrid : VariantKind::Dsc;
    deep.multiplier = config.synth_multiplier;

    nlohmann::json per_setting = nlohmann::json::array();
    std::vector<double> median_mae;
    for (double value : settings) {
        ExperimentConfig adjusted = config;
        if (kind == AblationKind::Threshold) {
            adjusted.synth.termination_fraction = value;
        } else {
            adjusted.synth.noise_sd = value;
        }
        CampaignData data = execute_targets(adjusted, {deep});

        std::vector<double> mae, rmse, mape;
        nlohmann::json failures = nlohmann::json::array();
        for (std::size_t i = 0; i < data.corpus.size(); ++i) {
            const auto& outcome = data.outcomes[i][0];
            if (!outcome.ok) {
                failures.push_back(outcome.error);
                continue;
            }
            mae.push_back(outcome.output.metrics.mae);
            rmse.push_back(outcome.output.metrics.rmse);
            mape.push_back(outcome.output.metrics.mape);
        }
        if (mae.empty()) throw std::runtime_error("ablation setting with no successful target");
        per_setting.push_back({{parameter, value},
                               {"median", {{"mae", median(mae)},
                                           {"rmse", median(rmse)},
                                           {"mape", median(mape)}}},
                               {"targets_used", mae.size()},
                               {"failures", std::move(failures)}});
        median_mae.push_back(median(mae));
    }

    nlohmann::json report;
    {
        nlohmann::json cfg_json = config;
        report["provenance"] = {{"tool", "srforecast"},
                                {"version", kVersion},
                                {"seed", config.seed},
                                {"config", std::move(cfg_json)}};
    }
    report["kind"] = kind == AblationKind::Threshold ? "threshold" : "noise";
    report["parameter"] = parameter;
    report["variant"] = deep.name();
    report["settings"] = settings;
    report["results"] = std::move(per_setting);

    std::filesystem::create_directories(config.output_dir);
    write_json_file(config.output_dir / "ablation_report.json", report);
    write_line_svg(config.output_dir / "plots" /
                       (std::string("ablation_") + (kind == AblationKind::Threshold
                                                        ? "threshold"
                                                        : "noise") +
                        ".svg"),
                   "Median MAE vs " + parameter, parameter, "median MAE", settings, median_mae);
    return report;
}

}  // namespace srf
