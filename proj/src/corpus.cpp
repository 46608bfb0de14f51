#include "srf/corpus.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace srf {

const char* to_string(Source source) {
    return source == Source::Real ? "real" : "synthetic";
}

Source source_from_string(std::string_view name) {
    if (name == "real") return Source::Real;
    if (name == "synthetic") return Source::Synthetic;
    throw ParseError("unknown source: " + std::string(name));
}

DefectSeries::DefectSeries(std::string id, Source source, std::vector<int> times,
                           std::vector<double> counts, std::optional<SrgmSpec> generator)
    : id_(std::move(id)),
      source_(source),
      times_(std::move(times)),
      counts_(std::move(counts)),
      generator_(std::move(generator)) {
    if (counts_.size() < 2) {
        throw TooShortError("series '" + id_ + "': length " +
                            std::to_string(counts_.size()) + " < 2");
    }
    if (times_.size() != counts_.size()) {
        throw ValidationError("series '" + id_ + "': times/counts length mismatch");
    }
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        if (!std::isfinite(counts_[i]) || counts_[i] < 0.0) {
            throw ValidationError("series '" + id_ + "': negative or non-finite count at row " +
                                  std::to_string(i));
        }
        if (times_[i] < 0) {
            throw ValidationError("series '" + id_ + "': negative time at row " +
                                  std::to_string(i));
        }
        if (i > 0) {
            if (times_[i] <= times_[i - 1]) {
                throw ValidationError("series '" + id_ + "': times not strictly increasing at row " +
                                      std::to_string(i));
            }
            if (counts_[i] < counts_[i - 1]) {
                throw ValidationError("series '" + id_ + "': cumulative count decreases at row " +
                                      std::to_string(i));
            }
        }
    }
}

bool DefectSeries::operator==(const DefectSeries& other) const {
    return id_ == other.id_ && source_ == other.source_ && times_ == other.times_ &&
           counts_ == other.counts_;
}

namespace {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw ParseError("cannot format value");
    return std::string(buf, ptr);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_double(std::string_view field, const std::filesystem::path& path, int line) {
    field = trim(field);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError(path.string() + ":" + std::to_string(line) + ": bad number '" +
                         std::string(field) + "'");
    }
    return value;
}

int parse_int(std::string_view field, const std::filesystem::path& path, int line) {
    field = trim(field);
    int value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError(path.string() + ":" + std::to_string(line) + ": bad integer '" +
                         std::string(field) + "'");
    }
    return value;
}

DefectSeries load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
    ++lineno;
    std::string_view header(line);
    if (header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
    if (trim(header) != "time,cumulative_defects") {
        throw ParseError(path.string() + ": expected header 'time,cumulative_defects'");
    }
    std::vector<int> times;
    std::vector<double> counts;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view row = trim(line);
        if (row.empty()) continue;
        std::size_t comma = row.find(',');
        if (comma == std::string_view::npos) {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": missing comma");
        }
        times.push_back(parse_int(row.substr(0, comma), path, lineno));
        counts.push_back(parse_double(row.substr(comma + 1), path, lineno));
    }
    return DefectSeries(path.stem().string(), Source::Real, std::move(times), std::move(counts));
}

DefectSeries load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    try {
        std::string id = j.value("id", path.stem().string());
        Source source = source_from_string(j.value("source", "real"));
        std::vector<int> times;
        std::vector<double> counts;
        for (const auto& point : j.at("points")) {
            times.push_back(point.at(0).get<int>());
            counts.push_back(point.at(1).get<double>());
        }
        std::optional<SrgmSpec> generator;
        if (j.contains("generator") && !j["generator"].is_null()) {
            generator = j["generator"].get<SrgmSpec>();
        }
        return DefectSeries(std::move(id), source, std::move(times), std::move(counts),
                            std::move(generator));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

}  // namespace

DefectSeries load_series(const std::filesystem::path& path, SeriesFormat format) {
    return format == SeriesFormat::Csv ? load_csv(path) : load_json(path);
}

DefectSeries load_series(const std::filesystem::path& path) {
    return load_series(path, path.extension() == ".json" ? SeriesFormat::Json
                                                         : SeriesFormat::Csv);
}

void save_series(const DefectSeries& series, const std::filesystem::path& path,
                 SeriesFormat format) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    if (format == SeriesFormat::Csv) {
        out << "time,cumulative_defects\n";
        for (std::size_t i = 0; i < series.size(); ++i) {
            out << series.times()[i] << ',' << format_double(series.counts()[i]) << '\n';
        }
    } else {
        nlohmann::json j;
        j["id"] = series.id();
        j["source"] = to_string(series.source());
        auto points = nlohmann::json::array();
        for (std::size_t i = 0; i < series.size(); ++i) {
            points.push_back({series.times()[i], series.counts()[i]});
        }
        j["points"] = std::move(points);
        if (series.generator().has_value()) j["generator"] = *series.generator();
        out << j.dump(2) << '\n';
    }
    if (!out) throw ParseError("write failed for " + path.string());
}

void save_series(const DefectSeries& series, const std::filesystem::path& path) {
    save_series(series, path,
                path.extension() == ".json" ? SeriesFormat::Json : SeriesFormat::Csv);
}

SplitSeries split_half(const DefectSeries& series) {
    const std::size_t total = series.size();
    const std::size_t observed_len = (total + 1) / 2;
    if (observed_len < 9) {
        throw TooShortError("series '" + series.id() + "': observed half would have " +
                            std::to_string(observed_len) + " points, need >= 9");
    }
    auto slice = [&](std::size_t begin, std::size_t end) {
        return DefectSeries(
            series.id(), series.source(),
            std::vector<int>(series.times().begin() + begin, series.times().begin() + end),
            std::vector<double>(series.counts().begin() + begin, series.counts().begin() + end),
            series.generator());
    };
    return SplitSeries{slice(0, observed_len), slice(observed_len, total)};
}

std::vector<DefectSeries> load_corpus_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw ParseError("not a directory: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().filename() == "manifest.json") continue;
        auto ext = entry.path().extension();
        if (ext == ".csv" || ext == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
    std::vector<DefectSeries> corpus;
    corpus.reserve(files.size());
    for (const auto& file : files) corpus.push_back(load_series(file));
    return corpus;
}

}  // namespace srf
