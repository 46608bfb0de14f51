#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "srf/corpus.hpp"
#include "srf/rng.hpp"

using namespace srf;

namespace {

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "srf_corpus_test";
    std::filesystem::create_directories(dir);
    return dir;
}

std::filesystem::path write_file(const std::string& name, const std::string& content) {
    const auto path = temp_dir() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

DefectSeries random_series(Rng& rng, std::size_t length) {
    std::vector<int> times;
    std::vector<double> counts;
    int t = 0;
    double c = 0.0;
    for (std::size_t i = 0; i < length; ++i) {
        t += 1 + static_cast<int>(rng.below(3));
        c += rng.uniform(0.0, 5.0);
        times.push_back(t);
        counts.push_back(c);
    }
    return DefectSeries("rnd", Source::Real, times, counts);
}

}  // namespace

TEST_CASE("csv load echoes valid rows") {
    const auto path = write_file("ok.csv", "time,cumulative_defects\n1,3\n2,5\n3,5\n");
    const DefectSeries series = load_series(path);
    CHECK(series.id() == "ok");
    CHECK(series.counts() == std::vector<double>{3.0, 5.0, 5.0});
    CHECK(series.times() == std::vector<int>{1, 2, 3});
}

TEST_CASE("decreasing counts are rejected, not repaired") {
    const auto path = write_file("dec.csv", "time,cumulative_defects\n1,5\n2,3\n");
    CHECK_THROWS_AS(load_series(path), ValidationError);
}

TEST_CASE("malformed rows raise ParseError") {
    CHECK_THROWS_AS(load_series(write_file("bad1.csv", "time,cumulative_defects\n1;3\n")),
                    ParseError);
    CHECK_THROWS_AS(load_series(write_file("bad2.csv", "time,cumulative_defects\n1,abc\n")),
                    ParseError);
    CHECK_THROWS_AS(load_series(write_file("bad3.csv", "wrong,header\n1,2\n")), ParseError);
}

TEST_CASE("too-short and invalid series") {
    CHECK_THROWS_AS(load_series(write_file("short.csv", "time,cumulative_defects\n1,2\n")),
                    TooShortError);
    // times must strictly increase
    CHECK_THROWS_AS(load_series(write_file("tdup.csv", "time,cumulative_defects\n1,1\n1,2\n")),
                    ValidationError);
    // negative counts
    CHECK_THROWS_AS(load_series(write_file("neg.csv", "time,cumulative_defects\n1,-1\n2,0\n")),
                    ValidationError);
}

TEST_CASE("20-interval series with 100 failures") {
    std::string body = "time,cumulative_defects\n";
    for (int t = 1; t <= 20; ++t) body += std::to_string(t) + "," + std::to_string(5 * t) + "\n";
    const DefectSeries series = load_series(write_file("ds1_like.csv", body));
    CHECK(series.size() == 20);
    CHECK(series.counts()[19] == doctest::Approx(100.0));
}

TEST_CASE("split_half uses the ceiling rule") {
    Rng rng(11);
    const DefectSeries s20 = random_series(rng, 20);
    const SplitSeries split20 = split_half(s20);
    CHECK(split20.observed.size() == 10);
    CHECK(split20.holdout.size() == 10);

    const DefectSeries s21 = random_series(rng, 21);
    const SplitSeries split21 = split_half(s21);
    CHECK(split21.observed.size() == 11);
    CHECK(split21.holdout.size() == 10);

    const DefectSeries s15 = random_series(rng, 15);
    CHECK_THROWS_AS(split_half(s15), TooShortError);  // observed would be 8
}

TEST_CASE("split concatenation reproduces the series exactly") {
    Rng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const DefectSeries series = random_series(rng, 17 + rng.below(40));
        const SplitSeries split = split_half(series);
        std::vector<int> times = split.observed.times();
        times.insert(times.end(), split.holdout.times().begin(), split.holdout.times().end());
        std::vector<double> counts = split.observed.counts();
        counts.insert(counts.end(), split.holdout.counts().begin(),
                      split.holdout.counts().end());
        CHECK(times == series.times());
        CHECK(counts == series.counts());
    }
}

TEST_CASE("save/load round trip is bit-exact in both formats") {
    Rng rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        const DefectSeries series = random_series(rng, 5 + rng.below(30));

        const auto csv = temp_dir() / "rt.csv";
        save_series(series, csv);
        const DefectSeries csv_loaded = load_series(csv);
        CHECK(csv_loaded.times() == series.times());
        CHECK(csv_loaded.counts() == series.counts());

        const auto json = temp_dir() / "rt.json";
        save_series(series, json);
        const DefectSeries json_loaded = load_series(json);
        CHECK(json_loaded.times() == series.times());
        CHECK(json_loaded.counts() == series.counts());
        CHECK(json_loaded.id() == series.id());
        CHECK(json_loaded.source() == series.source());
    }
}

TEST_CASE("json round trip keeps generator specs") {
    SrgmSpec spec;
    spec.kind = ModelKind::ISS;
    spec.a = 100.0;
    spec.b = 0.25;
    spec.extra = 0.4;
    const DefectSeries series("g1", Source::Synthetic, {1, 2, 3}, {1.0, 2.0, 3.0}, spec);
    const auto path = temp_dir() / "gen.json";
    save_series(series, path);
    const DefectSeries loaded = load_series(path);
    REQUIRE(loaded.generator().has_value());
    CHECK(loaded.generator()->kind == ModelKind::ISS);
    CHECK(loaded.generator()->a == 100.0);
    CHECK(loaded.generator()->b == 0.25);
    CHECK(loaded.generator()->extra == 0.4);
}

TEST_CASE("fuzzed invalid files never produce an invalid series") {
    Rng rng(91);
    int rejected = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::string body = "time,cumulative_defects\n";
        int t = 0;
        double c = 0.0;
        const int rows = 2 + static_cast<int>(rng.below(12));
        for (int row = 0; row < rows; ++row) {
            // occasionally corrupt time ordering or monotonicity
            t += rng.uniform01() < 0.15 ? 0 : 1;
            c += rng.uniform(-0.5, 2.0);
            body += std::to_string(t) + "," + std::to_string(c) + "\n";
        }
        const auto path = write_file("fuzz.csv", body);
        try {
            const DefectSeries series = load_series(path);
            for (std::size_t i = 0; i < series.size(); ++i) {
                CHECK(series.counts()[i] >= 0.0);
                if (i > 0) {
                    CHECK(series.counts()[i] >= series.counts()[i - 1]);
                    CHECK(series.times()[i] > series.times()[i - 1]);
                }
            }
        } catch (const ValidationError&) {
            ++rejected;
        } catch (const TooShortError&) {
            ++rejected;
        }
    }
    CHECK(rejected > 0);  // the fuzzer actually exercised rejection paths
}

TEST_CASE("corpus directory loads sorted by filename") {
    const auto dir = temp_dir() / "corpus";
    std::filesystem::create_directories(dir);
    for (const char* name : {"b.csv", "a.csv", "c.csv"}) {
        std::ofstream out(dir / name);
        out << "time,cumulative_defects\n1,1\n2,2\n";
    }
    std::ofstream(dir / "manifest.json") << "{}";
    const auto corpus = load_corpus_dir(dir);
    REQUIRE(corpus.size() == 3);
    CHECK(corpus[0].id() == "a");
    CHECK(corpus[1].id() == "b");
    CHECK(corpus[2].id() == "c");
}
