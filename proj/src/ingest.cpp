#include "loadshield/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <utility>

#include "loadshield/csv.hpp"

namespace loadshield {

namespace {

bool parse_number(std::string_view s, double& out) {
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

bool parse_int(std::string_view s, int& out) {
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

bool is_missing_token(std::string_view s) {
    return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan";
}

// Consumption cell: empty/NA means explicitly missing. Returns false on a
// token that is neither missing nor a number.
bool parse_consumption(std::string_view s, std::optional<double>& out) {
    if (is_missing_token(s)) {
        out = std::nullopt;
        return true;
    }
    double v = 0;
    if (!parse_number(s, v)) return false;
    out = v;
    return true;
}

ReadingsLayout detect_layout(const std::vector<std::string>& header) {
    if (header.size() == 5 && header[3] == "period" && header[4] == "kwh") {
        return ReadingsLayout::longform;
    }
    if (header.size() == static_cast<std::size_t>(3 + kPeriodsPerDay) && header[3] == "p01") {
        return ReadingsLayout::wide;
    }
    throw DataError("unrecognized readings header: expected "
                    "'business_id,industry_label,date,p01..p48' or "
                    "'business_id,industry_label,date,period,kwh'");
}

}  // namespace

ParseResult parse_readings(std::istream& source, const IngestConfig& config) {
    if (!source) throw DataError("unreadable readings stream");

    std::size_t line_no = 0;
    std::vector<std::string> fields;
    if (!csv::read_record(source, fields, line_no)) {
        throw DataError("readings stream has no header");
    }
    if (fields.size() < 3 || fields[0] != "business_id" || fields[1] != "industry_label" ||
        fields[2] != "date") {
        throw DataError("readings header must start with business_id,industry_label,date");
    }

    ReadingsLayout layout = config.layout;
    if (layout == ReadingsLayout::autodetect) layout = detect_layout(fields);
    const std::size_t expected_fields =
        layout == ReadingsLayout::wide ? 3 + static_cast<std::size_t>(kPeriodsPerDay) : 5;

    ParseResult result;
    while (csv::read_record(source, fields, line_no)) {
        ++result.data_lines;
        if (fields.size() != expected_fields) {
            result.rejects.push_back({line_no, "wrong field count"});
            continue;
        }
        const std::string& business = fields[0];
        const std::string& industry = fields[1];
        if (business.empty()) {
            result.rejects.push_back({line_no, "empty business_id"});
            continue;
        }
        if (industry.empty()) {
            result.rejects.push_back({line_no, "empty industry_label"});
            continue;
        }
        const auto date = Date::parse_iso(fields[2]);
        if (!date) {
            result.rejects.push_back({line_no, "bad date '" + fields[2] + "'"});
            continue;
        }

        if (layout == ReadingsLayout::wide) {
            std::array<std::optional<double>, kPeriodsPerDay> values;
            bool ok = true;
            for (int t = 0; t < kPeriodsPerDay; ++t) {
                if (!parse_consumption(fields[3 + t], values[t])) {
                    result.rejects.push_back(
                        {line_no, "bad consumption value '" + fields[3 + t] + "'"});
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            for (int t = 0; t < kPeriodsPerDay; ++t) {
                result.rows.push_back({business, industry, *date, t + 1, values[t]});
            }
        } else {
            int period = 0;
            if (!parse_int(fields[3], period)) {
                result.rejects.push_back({line_no, "bad period '" + fields[3] + "'"});
                continue;
            }
            if (period < 1 || period > kPeriodsPerDay) {
                result.rejects.push_back({line_no, "period out of range"});
                continue;
            }
            std::optional<double> value;
            if (!parse_consumption(fields[4], value)) {
                result.rejects.push_back({line_no, "bad consumption value '" + fields[4] + "'"});
                continue;
            }
            result.rows.push_back({business, industry, *date, period, value});
        }
    }
    return result;
}

nlohmann::json CleaningReport::to_json() const {
    nlohmann::json dropped_json = nlohmann::json::array();
    for (const auto& d : dropped) {
        dropped_json.push_back({{"business_id", d.business_id},
                                {"date", d.date.to_iso()},
                                {"reason", d.reason}});
    }
    return {{"days_in", days_in},
            {"days_kept", days_kept},
            {"retention_ratio", retention_ratio()},
            {"dropped", dropped_json},
            {"warnings", warnings}};
}

CleanResult clean_profiles(const std::vector<RawReadingRow>& rows) {
    struct DayBucket {
        std::array<bool, kPeriodsPerDay> seen{};
        std::array<std::optional<double>, kPeriodsPerDay> values{};
        bool duplicate = false;
    };
    // Ordered keys keep the output deterministic regardless of input order.
    std::map<std::pair<std::string, Date>, DayBucket> days;

    CleanResult result;
    for (const auto& row : rows) {
        auto [it, inserted] =
            result.industry_by_business.try_emplace(row.business_id, row.industry_label);
        if (!inserted && it->second != row.industry_label) {
            result.report.warnings.push_back("business " + row.business_id +
                                             ": industry label '" + row.industry_label +
                                             "' conflicts with '" + it->second + "', keeping first");
        }
        DayBucket& bucket = days[{row.business_id, row.date}];
        auto& slot = bucket.values[row.period_index - 1];
        if (bucket.seen[row.period_index - 1]) {
            bucket.duplicate = true;
        } else {
            bucket.seen[row.period_index - 1] = true;
            slot = row.consumption;
        }
    }

    result.report.days_in = days.size();
    for (const auto& [key, bucket] : days) {
        const auto& [business, date] = key;
        std::string reason;
        if (bucket.duplicate) {
            reason = "duplicate period";
        } else if (std::find(bucket.seen.begin(), bucket.seen.end(), false) != bucket.seen.end()) {
            reason = "incomplete day";
        } else {
            for (const auto& v : bucket.values) {
                if (!v.has_value()) {
                    reason = "missing value";
                    break;
                }
                if (!std::isfinite(*v)) {
                    reason = "non-finite value";
                    break;
                }
                if (*v < 0) {
                    reason = "negative consumption";
                    break;
                }
            }
        }
        if (!reason.empty()) {
            result.report.dropped.push_back({business, date, reason});
            continue;
        }
        LoadProfile profile;
        profile.business_id = business;
        profile.date = date;
        profile.day_class = day_class_of(date);
        for (int t = 0; t < kPeriodsPerDay; ++t) profile.values[t] = *bucket.values[t];
        result.profiles.push_back(std::move(profile));
    }
    result.report.days_kept = result.profiles.size();
    return result;
}

std::vector<LoadProfile> filter_calendar(const std::vector<LoadProfile>& profiles,
                                         const SeasonRange& season, DayClassFilter day_class) {
    if (season.end < season.start) {
        throw ConfigError("inverted date range: " + season.start.to_iso() + " > " +
                          season.end.to_iso());
    }
    std::vector<LoadProfile> kept;
    for (const auto& p : profiles) {
        if (!season.contains(p.date)) continue;
        if (day_class == DayClassFilter::weekday && p.day_class != DayClass::weekday) continue;
        if (day_class == DayClassFilter::weekend && p.day_class != DayClass::weekend) continue;
        kept.push_back(p);
    }
    return kept;
}

PeriodVector normalize_values(const PeriodVector& values) {
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    PeriodVector out{};
    if (hi == lo) return out;  // degenerate constant day -> all zeros
    const double range = hi - lo;
    for (int t = 0; t < kPeriodsPerDay; ++t) out[t] = (values[t] - lo) / range;
    return out;
}

NormalizedProfile normalize(const LoadProfile& profile) {
    for (double v : profile.values) {
        if (!std::isfinite(v)) {
            throw DataError("normalize: non-finite value for business " + profile.business_id +
                            " on " + profile.date.to_iso());
        }
    }
    return {profile.business_id, profile.date, normalize_values(profile.values)};
}

std::vector<ProfileSet> assemble_sets(const std::vector<NormalizedProfile>& profiles,
                                      const std::map<std::string, std::string>& industry_by_business) {
    std::map<std::string, std::vector<NormalizedProfile>> by_business;
    for (const auto& p : profiles) by_business[p.business_id].push_back(p);

    std::vector<ProfileSet> sets;
    sets.reserve(by_business.size());
    for (auto& [business, day_profiles] : by_business) {
        std::sort(day_profiles.begin(), day_profiles.end(),
                  [](const NormalizedProfile& a, const NormalizedProfile& b) {
                      return a.date < b.date;
                  });
        ProfileSet set;
        set.business_id = business;
        if (auto it = industry_by_business.find(business); it != industry_by_business.end()) {
            set.industry_label = it->second;
        }
        set.profiles = std::move(day_profiles);
        sets.push_back(std::move(set));
    }
    return sets;
}

}  // namespace loadshield
