#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "srf/srgm.hpp"

namespace srf {

enum class Source { Real, Synthetic };

const char* to_string(Source source);
Source source_from_string(std::string_view name);

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TooShortError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A validated cumulative defect-discovery series. Counts are non-negative
/// and non-decreasing, times strictly increasing, length >= 2. Instances
/// are immutable after construction and safe to share across threads.
class DefectSeries {
public:
    DefectSeries(std::string id, Source source, std::vector<int> times,
                 std::vector<double> counts, std::optional<SrgmSpec> generator = {});

    const std::string& id() const { return id_; }
    Source source() const { return source_; }
    const std::vector<int>& times() const { return times_; }
    const std::vector<double>& counts() const { return counts_; }
    const std::optional<SrgmSpec>& generator() const { return generator_; }
    std::size_t size() const { return counts_.size(); }

    bool operator==(const DefectSeries& other) const;

private:
    std::string id_;
    Source source_;
    std::vector<int> times_;
    std::vector<double> counts_;
    std::optional<SrgmSpec> generator_;
};

/// First-ceil(L/2)-points prefix and the remaining holdout of one series.
struct SplitSeries {
    DefectSeries observed;
    DefectSeries holdout;
};

enum class SeriesFormat { Csv, Json };

/// Load one series from a CSV file (header `time,cumulative_defects`) or a
/// JSON file ({id, source, points, generator?}). Raw rows that violate
/// monotonicity are rejected, never repaired. For CSV the id is the file
/// stem and the source Real.
DefectSeries load_series(const std::filesystem::path& path, SeriesFormat format);
/// Format inferred from the extension (.csv / .json).
DefectSeries load_series(const std::filesystem::path& path);

void save_series(const DefectSeries& series, const std::filesystem::path& path,
                 SeriesFormat format);
void save_series(const DefectSeries& series, const std::filesystem::path& path);

/// Split into observed prefix (first ceil(L/2) points) and holdout rest.
/// Throws TooShortError when the observed half would have fewer than 9
/// points, the minimum needed to seed an 8-step input window plus target.
SplitSeries split_half(const DefectSeries& series);

/// All .csv/.json series in a directory, sorted by filename.
std::vector<DefectSeries> load_corpus_dir(const std::filesystem::path& dir);

}  // namespace srf
