#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "loadshield/types.hpp"

namespace loadshield {

// Readings arrive either wide (one row per business-day with p01..p48
// columns) or long (one row per reading). The header decides which.
enum class ReadingsLayout { autodetect, wide, longform };

struct IngestConfig {
    ReadingsLayout layout = ReadingsLayout::autodetect;
};

struct RejectedRow {
    std::size_t line_no = 0;
    std::string reason;
};

struct ParseResult {
    std::vector<RawReadingRow> rows;
    std::vector<RejectedRow> rejects;
    std::size_t data_lines = 0;  // non-empty lines after the header
};

// Yields every well-formed reading; malformed rows are recorded with line
// numbers and skipped. Structural problems (missing/unknown header) throw.
ParseResult parse_readings(std::istream& source, const IngestConfig& config = {});

struct DroppedDay {
    std::string business_id;
    Date date;
    std::string reason;
};

struct CleaningReport {
    std::size_t days_in = 0;
    std::size_t days_kept = 0;
    std::vector<DroppedDay> dropped;
    std::vector<std::string> warnings;

    double retention_ratio() const {
        return days_in == 0 ? 0.0 : static_cast<double>(days_kept) / static_cast<double>(days_in);
    }
    nlohmann::json to_json() const;
};

struct CleanResult {
    std::vector<LoadProfile> profiles;
    CleaningReport report;
    // First-seen industry label per business; later disagreements are warned
    // about and ignored.
    std::map<std::string, std::string> industry_by_business;
};

// Low-touch cleaning: a (business, date) day survives only if all 48 periods
// are present exactly once, finite, and >= 0. Days are dropped whole; no
// value is ever altered or imputed.
CleanResult clean_profiles(const std::vector<RawReadingRow>& rows);

std::vector<LoadProfile> filter_calendar(const std::vector<LoadProfile>& profiles,
                                         const SeasonRange& season, DayClassFilter day_class);

// Max-min normalization of one day: z = (x - min) / (max - min).
// A constant day (max == min) maps to all zeros, which keeps the all-zero
// bypass day representable.
PeriodVector normalize_values(const PeriodVector& values);
NormalizedProfile normalize(const LoadProfile& profile);

// Groups normalized profiles into per-business sets, ordered by business id
// and by date within a set.
std::vector<ProfileSet> assemble_sets(const std::vector<NormalizedProfile>& profiles,
                                      const std::map<std::string, std::string>& industry_by_business);

}  // namespace loadshield
