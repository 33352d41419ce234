#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "loadshield/ingest.hpp"
#include "loadshield/redteam.hpp"
#include "reference.hpp"

using namespace loadshield;

namespace {

std::string wide_header_line() {
    std::string h = "business_id,industry_label,date";
    for (int t = 1; t <= 48; ++t) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), ",p%02d", t);
        h += buf;
    }
    return h;
}

std::string wide_row(const std::string& business, const std::string& industry,
                     const std::string& date, double value) {
    std::string row = business + "," + industry + "," + date;
    for (int t = 0; t < 48; ++t) row += "," + std::to_string(value);
    return row;
}

PeriodVector random_profile(Rng& rng, double scale = 1.0, double offset = 0.0) {
    PeriodVector v{};
    for (double& x : v) x = offset + scale * rng.uniform();
    return v;
}

}  // namespace

TEST_CASE("parse_readings accepts wide rows") {
    std::istringstream in(wide_header_line() + "\n" + wide_row("b1", "hotel", "2009-06-01", 1.5) +
                          "\n" + wide_row("b2", "pub", "2009-06-01", 2.0) + "\n");
    const auto result = parse_readings(in);
    CHECK(result.rejects.empty());
    CHECK(result.rows.size() == 2 * 48);
    CHECK(result.rows[0].business_id == "b1");
    CHECK(result.rows[0].period_index == 1);
    CHECK(result.rows[47].period_index == 48);
    CHECK(result.rows[0].consumption == 1.5);
}

TEST_CASE("parse_readings long form: valid rows, rejects, missing values") {
    std::istringstream in(
        "business_id,industry_label,date,period,kwh\n"
        "b1,hotel,2009-06-01,1,0.5\n"
        "b1,hotel,2009-06-01,2,\n"       // explicitly missing
        "b1,hotel,2009-06-01,49,0.5\n"   // period out of bounds
        "b1,hotel,2009-13-01,3,0.5\n"    // bad date
        "b1,hotel,2009-06-01,4,abc\n");  // bad value
    const auto result = parse_readings(in);
    CHECK(result.rows.size() == 2);
    CHECK(result.rows[0].consumption.has_value());
    CHECK_FALSE(result.rows[1].consumption.has_value());
    REQUIRE(result.rejects.size() == 3);
    CHECK(result.rejects[0].reason == "period out of range");
}

TEST_CASE("parse_readings rejects unknown header") {
    std::istringstream in("foo,bar\n1,2\n");
    CHECK_THROWS_AS(parse_readings(in), DataError);
}

TEST_CASE("clean_profiles keeps complete days and drops bad ones whole") {
    std::vector<RawReadingRow> rows;
    const Date good{2009, 6, 1};
    const Date incomplete{2009, 6, 2};
    const Date negative{2009, 6, 3};
    for (int t = 1; t <= 48; ++t) rows.push_back({"b1", "hotel", good, t, 1.0 + t});
    for (int t = 1; t <= 47; ++t) rows.push_back({"b1", "hotel", incomplete, t, 1.0});
    for (int t = 1; t <= 48; ++t) {
        rows.push_back({"b1", "hotel", negative, t, t == 7 ? -0.25 : 1.0});
    }

    const auto result = clean_profiles(rows);
    REQUIRE(result.profiles.size() == 1);
    CHECK(result.profiles[0].date == good);
    REQUIRE(result.report.dropped.size() == 2);
    CHECK(result.report.dropped[0].reason == "incomplete day");
    CHECK(result.report.dropped[1].reason == "negative consumption");
    CHECK(result.report.days_in == 3);
    CHECK(result.report.retention_ratio() == doctest::Approx(1.0 / 3.0));

    SUBCASE("retained values are bit-identical to the source readings") {
        for (int t = 0; t < 48; ++t) CHECK(result.profiles[0].values[t] == 1.0 + (t + 1));
    }
}

TEST_CASE("clean_profiles drops days with missing or duplicate readings") {
    std::vector<RawReadingRow> rows;
    const Date d1{2009, 6, 1};
    const Date d2{2009, 6, 2};
    for (int t = 1; t <= 48; ++t) {
        rows.push_back({"b1", "hotel", d1, t, t == 5 ? std::optional<double>{} : 1.0});
    }
    for (int t = 1; t <= 48; ++t) rows.push_back({"b1", "hotel", d2, t, 1.0});
    rows.push_back({"b1", "hotel", d2, 10, 2.0});  // duplicate period

    const auto result = clean_profiles(rows);
    CHECK(result.profiles.empty());
    REQUIRE(result.report.dropped.size() == 2);
    CHECK(result.report.dropped[0].reason == "missing value");
    CHECK(result.report.dropped[1].reason == "duplicate period");
}

TEST_CASE("clean_profiles groups 96 long rows into 2 days") {
    std::vector<RawReadingRow> rows;
    for (int d = 0; d < 2; ++d) {
        for (int t = 1; t <= 48; ++t) {
            rows.push_back({"b1", "hotel", Date{2009, 6, 1 + d}, t, 1.0});
        }
    }
    const auto result = clean_profiles(rows);
    CHECK(result.profiles.size() == 2);
}

TEST_CASE("clean_profiles warns on conflicting industry labels") {
    std::vector<RawReadingRow> rows;
    for (int t = 1; t <= 48; ++t) rows.push_back({"b1", "hotel", Date{2009, 6, 1}, t, 1.0});
    for (int t = 1; t <= 48; ++t) rows.push_back({"b1", "pub", Date{2009, 6, 2}, t, 1.0});
    const auto result = clean_profiles(rows);
    CHECK(result.industry_by_business.at("b1") == "hotel");
    CHECK_FALSE(result.report.warnings.empty());
}

TEST_CASE("filter_calendar applies season and day class") {
    LoadProfile saturday_july;  // 2009-07-18 was a Saturday
    saturday_july.date = Date{2009, 7, 18};
    saturday_july.day_class = day_class_of(saturday_july.date);
    LoadProfile january = saturday_july;
    january.date = Date{2009, 1, 14};
    january.day_class = day_class_of(january.date);

    const SeasonRange summer{{2009, 6, 1}, {2009, 9, 30}};
    CHECK(Date{2009, 7, 18}.is_weekend());

    const auto kept =
        filter_calendar({saturday_july, january}, summer, DayClassFilter::weekend);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].date == saturday_july.date);

    CHECK(filter_calendar({}, summer, DayClassFilter::all).empty());
    CHECK_THROWS_AS(filter_calendar({saturday_july}, SeasonRange{{2009, 9, 30}, {2009, 6, 1}},
                                    DayClassFilter::all),
                    ConfigError);

    SUBCASE("output is a subset and filter composition commutes") {
        Rng rng(99);
        std::vector<LoadProfile> profiles;
        for (int i = 0; i < 60; ++i) {
            LoadProfile p;
            p.date = Date{2009, 1, 1}.plus_days(static_cast<int>(rng.next_u64() % 365));
            p.day_class = day_class_of(p.date);
            p.business_id = "b" + std::to_string(i);
            profiles.push_back(p);
        }
        const SeasonRange wide{{2009, 1, 1}, {2009, 12, 31}};
        const auto a = filter_calendar(filter_calendar(profiles, summer, DayClassFilter::all),
                                       wide, DayClassFilter::weekend);
        const auto b = filter_calendar(filter_calendar(profiles, wide, DayClassFilter::weekend),
                                       summer, DayClassFilter::all);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].business_id == b[i].business_id);
            CHECK(a[i].date == b[i].date);
        }
        for (const auto& p : a) {
            CHECK(summer.contains(p.date));
            CHECK(p.day_class == DayClass::weekend);
        }
    }
}

TEST_CASE("normalize: ramp, constant, and all-zero days") {
    LoadProfile p;
    p.business_id = "b1";
    p.date = Date{2009, 6, 1};

    SUBCASE("ramp maps to i/47") {
        for (int t = 0; t < 48; ++t) p.values[t] = 10.0 + 3.0 * t;
        const auto z = normalize(p);
        for (int t = 0; t < 48; ++t) {
            CHECK(z.values[t] == doctest::Approx(t / 47.0).epsilon(1e-14));
        }
        CHECK(z.values[0] == 0.0);
        CHECK(z.values[47] == 1.0);
    }
    SUBCASE("constant day maps to zeros") {
        p.values.fill(5.0);
        const auto z = normalize(p);
        for (double v : z.values) CHECK(v == 0.0);
    }
    SUBCASE("all-zero bypass day maps to zeros") {
        p.values.fill(0.0);
        const auto z = normalize(p);
        for (double v : z.values) CHECK(v == 0.0);
    }
    SUBCASE("non-finite input throws") {
        p.values.fill(1.0);
        p.values[3] = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(normalize(p), DataError);
    }
}

TEST_CASE("normalize properties: range, idempotence, affine invariance, oracle") {
    Rng rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const PeriodVector x = random_profile(rng, 100.0, 5.0);
        const PeriodVector z = normalize_values(x);

        for (double v : z) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }

        const PeriodVector zz = normalize_values(z);
        for (int t = 0; t < 48; ++t) CHECK(zz[t] == doctest::Approx(z[t]).epsilon(1e-14));

        const double a = 0.1 + 10.0 * rng.uniform();
        const double b = -50.0 + 100.0 * rng.uniform();
        PeriodVector scaled{};
        for (int t = 0; t < 48; ++t) scaled[t] = a * x[t] + b;
        const PeriodVector zs = normalize_values(scaled);
        for (int t = 0; t < 48; ++t) CHECK(std::abs(zs[t] - z[t]) < 1e-12);

        const PeriodVector zref = ref::normalize_values(x);
        for (int t = 0; t < 48; ++t) CHECK(z[t] == zref[t]);
    }
}

TEST_CASE("assemble_sets groups by business and orders by date") {
    std::vector<NormalizedProfile> profiles;
    profiles.push_back({"b2", Date{2009, 6, 2}, {}});
    profiles.push_back({"b1", Date{2009, 6, 3}, {}});
    profiles.push_back({"b1", Date{2009, 6, 1}, {}});
    const std::map<std::string, std::string> industries{{"b1", "hotel"}, {"b2", "pub"}};

    const auto sets = assemble_sets(profiles, industries);
    REQUIRE(sets.size() == 2);
    CHECK(sets[0].business_id == "b1");
    CHECK(sets[0].industry_label == "hotel");
    CHECK(sets[0].n_days() == 2);
    CHECK(sets[0].profiles[0].date == Date{2009, 6, 1});
    CHECK(sets[1].business_id == "b2");
}

TEST_CASE("date arithmetic round trips") {
    const Date start{2008, 12, 28};
    for (int i = 0; i < 1000; ++i) {
        const Date d = start.plus_days(i);
        CHECK(d.to_days() == start.to_days() + i);
        CHECK(Date::parse_iso(d.to_iso()) == d);
    }
    CHECK(Date{2009, 7, 18}.day_of_week() == 6);  // Saturday
    CHECK(Date{2009, 7, 19}.day_of_week() == 0);  // Sunday
    CHECK_FALSE(Date::parse_iso("2009-02-29").has_value());
    CHECK(Date::parse_iso("2008-02-29").has_value());
}
