#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace loadshield {

// One business day is metered as 48 half-hourly consumption windows.
inline constexpr int kPeriodsPerDay = 48;

using PeriodVector = std::array<double, kPeriodsPerDay>;

// Malformed configuration or CLI usage. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Inputs were readable but unusable (empty after cleaning, shape mismatch,
// non-finite values where finite ones are required). CLI exit code 3.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Proleptic Gregorian calendar date. Profiles are keyed by the meter's local
// calendar day; there is no timezone or DST handling.
struct Date {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31

    static bool valid(int y, int m, int d);
    static std::optional<Date> parse_iso(std::string_view text);  // YYYY-MM-DD

    std::int64_t to_days() const;  // days since 1970-01-01
    int day_of_week() const;       // 0 = Sunday .. 6 = Saturday
    bool is_weekend() const { int w = day_of_week(); return w == 0 || w == 6; }
    Date plus_days(std::int64_t n) const;
    std::string to_iso() const;

    auto operator<=>(const Date&) const = default;
};

enum class DayClass { weekday, weekend };

inline DayClass day_class_of(const Date& d) {
    return d.is_weekend() ? DayClass::weekend : DayClass::weekday;
}

enum class DayClassFilter { weekday, weekend, all };

std::optional<DayClassFilter> day_class_filter_from_string(std::string_view s);
std::string to_string(DayClassFilter f);

struct RawReadingRow {
    std::string business_id;
    std::string industry_label;
    Date date;
    int period_index = 0;                // 1..48
    std::optional<double> consumption;   // kWh; nullopt = explicitly missing
};

struct LoadProfile {
    std::string business_id;
    Date date;
    PeriodVector values{};  // kWh; cleaning guarantees finite and >= 0
    DayClass day_class = DayClass::weekday;
};

struct NormalizedProfile {
    std::string business_id;
    Date date;
    PeriodVector values{};  // unitless, in [0, 1]
};

// All normalized profiles of one business over the analysis window.
struct ProfileSet {
    std::string business_id;
    std::string industry_label;
    std::vector<NormalizedProfile> profiles;

    int n_days() const { return static_cast<int>(profiles.size()); }
};

// Inclusive calendar window, e.g. the summer season of one year.
struct SeasonRange {
    Date start;
    Date end;

    bool contains(const Date& d) const { return start <= d && d <= end; }
};

}  // namespace loadshield
