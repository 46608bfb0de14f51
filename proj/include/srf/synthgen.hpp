#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "srf/corpus.hpp"
#include "srf/rng.hpp"
#include "srf/srgm.hpp"

namespace srf {

/// Knobs of the synthetic dataset generator. Defaults: pools of 59 series,
/// a fixed at 100, b log-uniform on (0.0001, 1.0], r uniform on
/// (0.0001, 1.0], c uniform on (0.01, 2.0], termination at 95% of a, length
/// capped at 512, multiplicative Gaussian noise with sd 0.001.
struct SynthConfig {
    int count_n = 59;
    double a_fixed = 100.0;
    double b_log_lo = 1e-4;
    double b_log_hi = 1.0;
    double r_lo = 1e-4;
    double r_hi = 1.0;
    double c_lo = 0.01;
    double c_hi = 2.0;
    double termination_fraction = 0.95;
    int max_length = 512;
    double noise_sd = 0.001;
    int min_length = 9;  // forecaster window + 1
    std::uint64_t seed = 0;
};

void to_json(nlohmann::json& j, const SynthConfig& config);
void from_json(const nlohmann::json& j, SynthConfig& config);

struct GenerationStalled : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Draw one generator spec: kind uniform over {GO, YDSS, ISS, GG}, a fixed,
/// b log-uniform, r/c uniform per kind.
SrgmSpec sample_spec(const SynthConfig& config, Rng& rng);

/// Noiseless trend m(1..L). L is the smallest t with
/// m(t) >= termination_fraction * a, capped at max_length. Throws
/// TooShortError when L < min_length (callers resample).
std::vector<double> generate_trend(const SrgmSpec& spec, const SynthConfig& config);

/// Multiplicative Gaussian noise: each point scaled by (1 + eps),
/// eps ~ N(0, noise_sd^2), independent per point.
std::vector<double> apply_noise(const std::vector<double>& trend, const SynthConfig& config,
                                Rng& rng);

/// Cumulative-count repair: running maximum of max(0, value). Builds a
/// Synthetic series with unit time steps starting at t = 1.
DefectSeries enforce_cumulative(const std::vector<double>& noisy,
                                std::string id = "synthetic",
                                std::optional<SrgmSpec> generator = {});

/// Generate count_n series. Each series draws from its own substream
/// derived from (seed, index), so results do not depend on evaluation
/// order; too-short draws are resampled with a fresh spec. Throws
/// GenerationStalled when a series fails 1000 consecutive draws.
std::vector<DefectSeries> generate_pool(const SynthConfig& config);

/// Persist a pool as one CSV per series plus manifest.json recording the
/// config and each series' generator spec.
void save_pool(const std::vector<DefectSeries>& pool, const SynthConfig& config,
               const std::filesystem::path& dir);

}  // namespace srf
