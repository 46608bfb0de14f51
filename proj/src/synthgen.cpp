#include "srf/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

namespace srf {

void to_json(nlohmann::json& j, const SynthConfig& config) {
    j = nlohmann::json{{"count_n", config.count_n},
                       {"a_fixed", config.a_fixed},
                       {"b_log_lo", config.b_log_lo},
                       {"b_log_hi", config.b_log_hi},
                       {"r_lo", config.r_lo},
                       {"r_hi", config.r_hi},
                       {"c_lo", config.c_lo},
                       {"c_hi", config.c_hi},
                       {"termination_fraction", config.termination_fraction},
                       {"max_length", config.max_length},
                       {"noise_sd", config.noise_sd},
                       {"min_length", config.min_length},
                       {"seed", config.seed}};
}

void from_json(const nlohmann::json& j, SynthConfig& config) {
    config = SynthConfig{};
    config.count_n = j.value("count_n", config.count_n);
    config.a_fixed = j.value("a_fixed", config.a_fixed);
    config.b_log_lo = j.value("b_log_lo", config.b_log_lo);
    config.b_log_hi = j.value("b_log_hi", config.b_log_hi);
    config.r_lo = j.value("r_lo", config.r_lo);
    config.r_hi = j.value("r_hi", config.r_hi);
    config.c_lo = j.value("c_lo", config.c_lo);
    config.c_hi = j.value("c_hi", config.c_hi);
    config.termination_fraction = j.value("termination_fraction", config.termination_fraction);
    config.max_length = j.value("max_length", config.max_length);
    config.noise_sd = j.value("noise_sd", config.noise_sd);
    config.min_length = j.value("min_length", config.min_length);
    config.seed = j.value("seed", config.seed);
}

SrgmSpec sample_spec(const SynthConfig& config, Rng& rng) {
    static constexpr ModelKind kSamplingKinds[4] = {ModelKind::GO, ModelKind::YDSS,
                                                    ModelKind::ISS, ModelKind::GG};
    SrgmSpec spec;
    spec.kind = kSamplingKinds[rng.below(4)];
    spec.a = config.a_fixed;
    spec.b = rng.log_uniform(config.b_log_lo, config.b_log_hi);
    if (spec.kind == ModelKind::ISS) {
        spec.extra = rng.uniform(config.r_lo, config.r_hi);
    } else if (spec.kind == ModelKind::GG) {
        spec.extra = rng.uniform(config.c_lo, config.c_hi);
    }
    return spec;
}

std::vector<double> generate_trend(const SrgmSpec& spec, const SynthConfig& config) {
    if (spec.kind == ModelKind::Logistic || spec.kind == ModelKind::Gompertz) {
        throw DomainError("trend generation uses the GO/YDSS/ISS/GG families only");
    }
    validate_spec(spec);
    const double threshold = config.termination_fraction * spec.a;
    std::vector<double> trend;
    trend.reserve(static_cast<std::size_t>(config.max_length));
    for (int t = 1; t <= config.max_length; ++t) {
        const double value = mean_value_unchecked(spec, static_cast<double>(t));
        trend.push_back(value);
        if (value >= threshold) break;
    }
    if (static_cast<int>(trend.size()) < config.min_length) {
        throw TooShortError("trend saturates after " + std::to_string(trend.size()) +
                            " steps, need >= " + std::to_string(config.min_length));
    }
    return trend;
}

std::vector<double> apply_noise(const std::vector<double>& trend, const SynthConfig& config,
                                Rng& rng) {
    std::vector<double> noisy(trend.size());
    for (std::size_t i = 0; i < trend.size(); ++i) {
        noisy[i] = trend[i] * (1.0 + config.noise_sd * rng.normal());
    }
    return noisy;
}

DefectSeries enforce_cumulative(const std::vector<double>& noisy, std::string id,
                                std::optional<SrgmSpec> generator) {
    std::vector<double> counts(noisy.size());
    std::vector<int> times(noisy.size());
    double running = 0.0;
    for (std::size_t i = 0; i < noisy.size(); ++i) {
        running = std::max(running, std::max(0.0, noisy[i]));
        counts[i] = running;
        times[i] = static_cast<int>(i) + 1;
    }
    return DefectSeries(std::move(id), Source::Synthetic, std::move(times), std::move(counts),
                        std::move(generator));
}

std::vector<DefectSeries> generate_pool(const SynthConfig& config) {
    constexpr int kMaxDrawsPerSeries = 1000;
    std::vector<DefectSeries> pool;
    pool.reserve(static_cast<std::size_t>(std::max(config.count_n, 0)));
    for (int i = 0; i < config.count_n; ++i) {
        Rng rng(derive_stream(config.seed, static_cast<std::uint64_t>(i)));
        char id[16];
        std::snprintf(id, sizeof(id), "syn%04d", i);
        bool done = false;
        for (int attempt = 0; attempt < kMaxDrawsPerSeries && !done; ++attempt) {
            const SrgmSpec spec = sample_spec(config, rng);
            std::vector<double> trend;
            try {
                trend = generate_trend(spec, config);
            } catch (const TooShortError&) {
                continue;  // fresh spec on the next draw
            }
            const std::vector<double> noisy = apply_noise(trend, config, rng);
            pool.push_back(enforce_cumulative(noisy, id, spec));
            done = true;
        }
        if (!done) {
            throw GenerationStalled("series " + std::string(id) + ": " +
                                    std::to_string(kMaxDrawsPerSeries) +
                                    " consecutive draws were too short");
        }
    }
    return pool;
}

void save_pool(const std::vector<DefectSeries>& pool, const SynthConfig& config,
               const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::json entries = nlohmann::json::array();
    for (const DefectSeries& series : pool) {
        save_series(series, dir / (series.id() + ".csv"), SeriesFormat::Csv);
        nlohmann::json entry{{"id", series.id()},
                             {"length", series.size()},
                             {"final_count", series.counts().back()}};
        if (series.generator().has_value()) entry["generator"] = *series.generator();
        entries.push_back(std::move(entry));
    }
    nlohmann::json manifest{{"config", config}, {"series", std::move(entries)}};
    std::ofstream out(dir / "manifest.json");
    if (!out) throw ParseError("cannot write manifest in " + dir.string());
    out << manifest.dump(2) << '\n';
}

}  // namespace srf
