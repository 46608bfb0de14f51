#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "srf/harness.hpp"
#include "srf/rng.hpp"
#include "srf/srgm_fit.hpp"

using namespace srf;

namespace {

SrgmSpec make_spec(ModelKind kind, double a, double b, std::optional<double> extra = {}) {
    SrgmSpec spec;
    spec.kind = kind;
    spec.a = a;
    spec.b = b;
    spec.extra = extra;
    return spec;
}

/// A noisy curve realization re-labelled as a real-world series.
DefectSeries pseudo_real(const std::string& id, const SrgmSpec& spec, double noise_sd,
                         std::uint64_t seed) {
    SynthConfig config;
    config.noise_sd = noise_sd;
    config.min_length = 18;
    Rng rng(seed);
    const auto trend = generate_trend(spec, config);
    const auto noisy = apply_noise(trend, config, rng);
    const DefectSeries synthetic = enforce_cumulative(noisy, id, spec);
    return DefectSeries(id, Source::Real, synthetic.times(), synthetic.counts(), spec);
}

std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Tiny corpus of four growth curves plus configuration tuned for test
/// runtime (small network, few epochs, short synthetic series).
struct Fixture {
    std::filesystem::path corpus_dir;
    ExperimentConfig config;

    explicit Fixture(const std::string& tag) {
        corpus_dir = fresh_dir("srf_harness_corpus_" + tag);
        save_series(pseudo_real("t0", make_spec(ModelKind::GO, 100.0, 0.15), 0.005, 1),
                    corpus_dir / "t0.csv");
        save_series(pseudo_real("t1", make_spec(ModelKind::GO, 100.0, 0.08), 0.005, 2),
                    corpus_dir / "t1.csv");
        save_series(pseudo_real("t2", make_spec(ModelKind::YDSS, 100.0, 0.25), 0.005, 3),
                    corpus_dir / "t2.csv");
        save_series(pseudo_real("t3", make_spec(ModelKind::ISS, 100.0, 0.2, 0.3), 0.005, 4),
                    corpus_dir / "t3.csv");

        config.corpus_dir = corpus_dir;
        config.output_dir = fresh_dir("srf_harness_out_" + tag);
        config.seed = 1234;
        config.k = 3;
        config.jobs = 1;
        config.synth.max_length = 96;
        config.train.layers = 1;
        config.train.hidden = 8;
        config.train.epochs = 6;
        config.train.batch = 32;
    }
};

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_CASE("run_dsc is deterministic and leaves the target out") {
    const Fixture fixture("dsc");
    const auto corpus = load_corpus_dir(fixture.corpus_dir);
    std::vector<DefectSeries> loo(corpus.begin() + 1, corpus.end());

    const RunOutput a = run_dsc(corpus[0], loo, fixture.config, 42);
    const RunOutput b = run_dsc(corpus[0], loo, fixture.config, 42);
    CHECK(a.metrics.rmse == b.metrics.rmse);
    CHECK(a.metrics.mae == b.metrics.mae);
    CHECK(a.metrics.mape == b.metrics.mape);
    CHECK(a.forecast == b.forecast);
    CHECK(a.horizon == static_cast<int>(split_half(corpus[0]).holdout.size()));
    for (const auto& id : a.selected_ids) CHECK(id != corpus[0].id());
    CHECK_FALSE(a.pool_manifest.is_null());
}

TEST_CASE("run_dc trains on the real leave-one-out pool") {
    const Fixture fixture("dc");
    const auto corpus = load_corpus_dir(fixture.corpus_dir);
    std::vector<DefectSeries> loo(corpus.begin(), corpus.end() - 1);
    const DefectSeries& target = corpus.back();

    const RunOutput out = run_dc(target, loo, fixture.config, 7);
    CHECK(out.horizon == static_cast<int>(split_half(target).holdout.size()));
    for (const auto& id : out.selected_ids) {
        CHECK(id != target.id());
        bool found = false;
        for (const auto& series : loo) found = found || series.id() == id;
        CHECK(found);  // selections come from the real pool only
    }
}

TEST_CASE("best traditional baseline nails data from its own family") {
    // Noiseless curve: the generating family is among the candidates, so
    // extrapolating the best fit should be near exact.
    SynthConfig generation;
    generation.noise_sd = 0.0;
    generation.min_length = 18;
    const SrgmSpec truth = make_spec(ModelKind::GO, 100.0, 0.1);
    const auto trend = generate_trend(truth, generation);
    const DefectSeries target =
        DefectSeries("go_target", Source::Real,
                     enforce_cumulative(trend, "tmp", truth).times(),
                     enforce_cumulative(trend, "tmp", truth).counts(), truth);

    const RunOutput out = run_baseline_srgm(target);
    CHECK(out.metrics.mape < 1.0);
    REQUIRE(out.best_kind.has_value());
    CHECK((*out.best_kind == "GO" || *out.best_kind == "ISS" || *out.best_kind == "GG"));
}

TEST_CASE("naive baseline extrapolates the last observed value") {
    const Fixture fixture("naive");
    const auto corpus = load_corpus_dir(fixture.corpus_dir);
    const RunOutput out = run_naive(corpus[0]);
    const SplitSeries split = split_half(corpus[0]);
    for (double v : out.forecast) CHECK(v == split.observed.counts().back());
}

TEST_CASE("campaign produces a structurally complete, self-consistent report") {
    Fixture fixture("campaign");
    fixture.config.variants = {VariantSpec{VariantKind::Dsc, 1},
                               VariantSpec{VariantKind::BestSrgm, 1},
                               VariantSpec{VariantKind::Naive, 1}};
    const nlohmann::json report = run_campaign(fixture.config);

    CHECK(report.at("variants").size() == 3);
    CHECK(report.at("targets").size() == 4);
    const auto included = report.at("included_targets");
    REQUIRE(!included.empty());

    // medians re-aggregate from the per-target table
    for (const auto& variant : {"dsc", "best_srgm", "naive"}) {
        std::vector<double> maes;
        for (const auto& id : included) {
            maes.push_back(report.at("per_target")
                               .at(id.get<std::string>())
                               .at(variant)
                               .at("metrics")
                               .at("mae")
                               .get<double>());
        }
        CHECK(report.at("aggregates").at(variant).at("median").at("mae").get<double>() ==
              doctest::Approx(median(maes)).epsilon(1e-12));
    }

    // WTL tallies cover every included target
    for (const auto& [pair, tallies] : report.at("wtl").items()) {
        for (const auto& metric : {"rmse", "mae", "mape"}) {
            const auto& tally = tallies.at(metric);
            CHECK(tally.at("win").get<int>() + tally.at("tie").get<int>() +
                      tally.at("loss").get<int>() ==
                  static_cast<int>(included.size()));
        }
    }

    // three variants: pairwise signed-rank tests plus the Friedman test
    CHECK(report.at("tests").at("wilcoxon").size() == 3);
    CHECK(report.at("tests").contains("friedman"));

    // files on disk
    CHECK(std::filesystem::exists(fixture.config.output_dir / "report.json"));
    CHECK(std::filesystem::exists(fixture.config.output_dir / "per_target" / "t0.json"));
    CHECK(std::filesystem::exists(fixture.config.output_dir / "plots" / "scatter_mae.svg"));
    CHECK(std::filesystem::exists(fixture.config.output_dir / "pools" / "t0__dsc.json"));
}

TEST_CASE("campaign reruns are byte-identical") {
    Fixture fixture("determinism");
    fixture.config.variants = {VariantSpec{VariantKind::Dsc, 1},
                               VariantSpec{VariantKind::Naive, 1}};
    run_campaign(fixture.config);
    const std::string first = read_file(fixture.config.output_dir / "report.json");
    run_campaign(fixture.config);
    const std::string second = read_file(fixture.config.output_dir / "report.json");
    CHECK(first == second);
    CHECK_FALSE(first.empty());
}

TEST_CASE("failed targets are recorded and excluded, not silently dropped") {
    Fixture fixture("exclusion");
    // A constant series has no valid similarity lag, so the deep pipeline
    // must fail on it while the flat-line baseline still succeeds.
    std::vector<int> times;
    std::vector<double> counts;
    for (int t = 1; t <= 20; ++t) {
        times.push_back(t);
        counts.push_back(4.0);
    }
    save_series(DefectSeries("zz_flat", Source::Real, times, counts),
                fixture.corpus_dir / "zz_flat.csv");

    fixture.config.variants = {VariantSpec{VariantKind::Dsc, 1},
                               VariantSpec{VariantKind::Naive, 1}};
    const nlohmann::json report = run_campaign(fixture.config);

    CHECK(report.at("targets").size() == 5);
    CHECK(report.at("included_targets").size() == 4);
    REQUIRE(report.at("excluded").size() == 1);
    CHECK(report.at("excluded")[0].at("target") == "zz_flat");
    CHECK(report.at("excluded")[0].at("variant") == "dsc");
    // the per-target table still carries the error
    CHECK(report.at("per_target").at("zz_flat").at("dsc").contains("error"));
}

TEST_CASE("worker count does not change results") {
    Fixture fixture("jobs");
    fixture.config.variants = {VariantSpec{VariantKind::Dsc, 1},
                               VariantSpec{VariantKind::Naive, 1}};
    fixture.config.jobs = 1;
    nlohmann::json serial = run_campaign(fixture.config);
    fixture.config.jobs = 3;
    nlohmann::json threaded = run_campaign(fixture.config);
    // identical except the echoed jobs knob
    serial["provenance"]["config"].erase("jobs");
    threaded["provenance"]["config"].erase("jobs");
    CHECK(serial == threaded);
}

TEST_CASE("experiment config round-trips through json") {
    ExperimentConfig config;
    config.corpus_dir = "corpus";
    config.pool_mode = PoolMode::Hybrid;
    config.k = 4;
    config.seed = 99;
    config.synth_multiplier = 2;
    config.variants = {variant_from_string("dsc_2n"), variant_from_string("best_srgm")};
    config.wtl_threshold = 0.1;

    nlohmann::json j = config;
    const auto parsed = j.get<ExperimentConfig>();
    CHECK(parsed.pool_mode == PoolMode::Hybrid);
    CHECK(parsed.k == 4);
    CHECK(parsed.seed == 99);
    CHECK(parsed.wtl_threshold == 0.1);
    REQUIRE(parsed.variants.size() == 2);
    CHECK(parsed.variants[0].kind == VariantKind::Dsc);
    CHECK(parsed.variants[0].multiplier == 2);
    CHECK(parsed.variants[0].name() == "dsc_2n");
    CHECK(parsed.variants[1].kind == VariantKind::BestSrgm);
}

TEST_CASE("ablation sweeps produce one median row per setting") {
    Fixture fixture("ablation");
    fixture.config.train.epochs = 3;
    const nlohmann::json report = run_ablation(AblationKind::Threshold, fixture.config);
    CHECK(report.at("settings").size() == 4);
    CHECK(report.at("results").size() == 4);
    for (const auto& row : report.at("results")) {
        CHECK(row.at("median").at("mae").is_number());
    }
    CHECK(std::filesystem::exists(fixture.config.output_dir / "ablation_report.json"));
    CHECK(std::filesystem::exists(fixture.config.output_dir / "plots" /
                                  "ablation_threshold.svg"));
}
