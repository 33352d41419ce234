#include "loadshield/types.hpp"

#include <charconv>

namespace loadshield {

namespace {

int days_in_month(int y, int m) {
    static constexpr int table[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2) {
        const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        return leap ? 29 : 28;
    }
    return table[m - 1];
}

bool parse_int(std::string_view s, int& out) {
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

}  // namespace

bool Date::valid(int y, int m, int d) {
    if (m < 1 || m > 12 || d < 1) return false;
    return d <= days_in_month(y, m);
}

std::optional<Date> Date::parse_iso(std::string_view text) {
    // Strict YYYY-MM-DD.
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
        !parse_int(text.substr(8, 2), d)) {
        return std::nullopt;
    }
    if (!valid(y, m, d)) return std::nullopt;
    return Date{y, m, d};
}

// Days-from-civil conversion for the proleptic Gregorian calendar.
std::int64_t Date::to_days() const {
    std::int64_t y = year;
    y -= month <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(month + (month > 2 ? -3 : 9)) + 2) / 5 +
                         static_cast<unsigned>(day) - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

int Date::day_of_week() const {
    // 1970-01-01 was a Thursday; 0 = Sunday.
    const std::int64_t d = to_days();
    return static_cast<int>(((d + 4) % 7 + 7) % 7);
}

Date Date::plus_days(std::int64_t n) const {
    // Civil-from-days inverse of to_days().
    std::int64_t z = to_days() + n + 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

std::string Date::to_iso() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

std::optional<DayClassFilter> day_class_filter_from_string(std::string_view s) {
    if (s == "weekday") return DayClassFilter::weekday;
    if (s == "weekend") return DayClassFilter::weekend;
    if (s == "all") return DayClassFilter::all;
    return std::nullopt;
}

std::string to_string(DayClassFilter f) {
    switch (f) {
        case DayClassFilter::weekday: return "weekday";
        case DayClassFilter::weekend: return "weekend";
        case DayClassFilter::all: return "all";
    }
    return "all";
}

}  // namespace loadshield
