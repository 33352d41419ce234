#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "loadshield/pricing.hpp"
#include "loadshield/redteam.hpp"

using namespace loadshield;

namespace {

std::string price_header() {
    std::string h = "region,date";
    for (int t = 1; t <= 48; ++t) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), ",p%02d", t);
        h += buf;
    }
    return h;
}

std::string price_row(const std::string& region, const std::string& date, double value) {
    std::string row = region + "," + date;
    for (int t = 0; t < 48; ++t) row += "," + std::to_string(value);
    return row;
}

PeriodVector constant_curve(double v) {
    PeriodVector c{};
    c.fill(v);
    return c;
}

}  // namespace

TEST_CASE("parse_price_csv reads complete days and warns on gaps") {
    std::string incomplete = "north,2009-06-02";
    for (int t = 0; t < 47; ++t) incomplete += ",0.1";
    incomplete += ",";  // final cell missing

    std::istringstream in(price_header() + "\n" + price_row("north", "2009-06-01", 0.10) + "\n" +
                          incomplete + "\n" + price_row("south", "2009-06-01", -0.02) + "\n");
    const auto result = parse_price_csv(in);
    CHECK(result.table.prices.size() == 2);
    CHECK(result.table.prices.at("north").size() == 1);
    REQUIRE(result.warnings.size() == 1);
    // Negative prices are legitimate.
    CHECK(result.table.prices.at("south").at(Date{2009, 6, 1})[0] == -0.02);
}

TEST_CASE("parse_price_csv rejects a wrong header") {
    std::istringstream in("date,region,p01\n");
    CHECK_THROWS_AS(parse_price_csv(in), DataError);
}

TEST_CASE("average_regions") {
    const SeasonRange june{{2009, 6, 1}, {2009, 6, 30}};

    SUBCASE("one region, one day passes through") {
        RegionalPriceTable table;
        PeriodVector p{};
        for (int t = 0; t < 48; ++t) p[t] = 0.05 + 0.001 * t;
        table.prices["north"][Date{2009, 6, 3}] = p;
        const auto curve = average_regions(table, june);
        CHECK(curve.csp == p);
        CHECK(curve.region_days == 1);
        CHECK(curve.regions == std::vector<std::string>{"north"});
    }
    SUBCASE("two regions offset by 2 average to p + 1") {
        RegionalPriceTable table;
        PeriodVector p{};
        for (int t = 0; t < 48; ++t) p[t] = 1.0 + t;
        PeriodVector q = p;
        for (double& v : q) v += 2.0;
        table.prices["a"][Date{2009, 6, 1}] = p;
        table.prices["b"][Date{2009, 6, 1}] = q;
        const auto curve = average_regions(table, june);
        for (int t = 0; t < 48; ++t) CHECK(curve.csp[t] == doctest::Approx(p[t] + 1.0));
    }
    SUBCASE("dates outside the season are excluded") {
        RegionalPriceTable table;
        table.prices["a"][Date{2009, 5, 31}] = constant_curve(99.0);
        table.prices["a"][Date{2009, 6, 1}] = constant_curve(1.0);
        const auto curve = average_regions(table, june);
        CHECK(curve.region_days == 1);
        CHECK(curve.csp[0] == 1.0);
    }
    SUBCASE("empty selection is an error") {
        RegionalPriceTable table;
        table.prices["a"][Date{2009, 1, 1}] = constant_curve(1.0);
        CHECK_THROWS_AS(average_regions(table, june), DataError);
    }
    SUBCASE("matches the brute-force double mean on a random table") {
        Rng rng(11);
        RegionalPriceTable table;
        double expect[48] = {};
        int included = 0;
        for (int r = 0; r < 3; ++r) {
            for (int d = 0; d < 5; ++d) {
                PeriodVector p{};
                for (double& v : p) v = rng.uniform();
                table.prices["r" + std::to_string(r)][Date{2009, 6, 1 + d}] = p;
                for (int t = 0; t < 48; ++t) expect[t] += p[t];
                ++included;
            }
        }
        const auto curve = average_regions(table, june);
        for (int t = 0; t < 48; ++t) {
            CHECK(std::abs(curve.csp[t] - expect[t] / included) < 1e-12);
        }
    }
    SUBCASE("region insertion order does not matter") {
        Rng rng(12);
        PeriodVector pa{};
        PeriodVector pb{};
        for (double& v : pa) v = rng.uniform();
        for (double& v : pb) v = rng.uniform();
        RegionalPriceTable t1, t2;
        t1.prices["a"][Date{2009, 6, 1}] = pa;
        t1.prices["b"][Date{2009, 6, 1}] = pb;
        t2.prices["b"][Date{2009, 6, 1}] = pb;
        t2.prices["a"][Date{2009, 6, 1}] = pa;
        CHECK(average_regions(t1, june).csp == average_regions(t2, june).csp);
    }
}

TEST_CASE("incentive_weights implements the flat-price-relative form") {
    SpotPriceCurve curve;

    SUBCASE("csp equal to the flat price gives zero weights") {
        curve.csp = constant_curve(0.14);
        const auto w = incentive_weights(curve, 0.14);
        for (double v : w.wsp) CHECK(v == 0.0);
    }
    SUBCASE("a period at twice the flat price weighs 1") {
        curve.csp = constant_curve(0.10);
        curve.csp[7] = 0.20;
        const auto w = incentive_weights(curve, 0.10);
        CHECK(w.wsp[7] == doctest::Approx(1.0));
        CHECK(w.wsp[0] == doctest::Approx(0.0));
    }
    SUBCASE("auto flat price zeroes the mean weight") {
        Rng rng(13);
        for (double& v : curve.csp) v = 0.05 + 0.1 * rng.uniform();
        const auto w = incentive_weights(curve, std::nullopt);
        double sum = 0;
        for (double v : w.wsp) sum += v;
        CHECK(std::abs(sum / 48.0) < 1e-12);
        CHECK(std::abs(sum) < 1e-9);
    }
    SUBCASE("non-positive flat price is rejected") {
        curve.csp = constant_curve(0.10);
        CHECK_THROWS_AS(incentive_weights(curve, 0.0), ConfigError);
        CHECK_THROWS_AS(incentive_weights(curve, -1.0), ConfigError);
        curve.csp = constant_curve(-0.10);  // auto FP would be negative
        CHECK_THROWS_AS(incentive_weights(curve, std::nullopt), ConfigError);
    }
    SUBCASE("uniform currency rescaling leaves wsp unchanged") {
        Rng rng(14);
        for (double& v : curve.csp) v = 0.05 + 0.1 * rng.uniform();
        const double fp = 0.11;
        const auto w1 = incentive_weights(curve, fp);
        SpotPriceCurve scaled = curve;
        const double factor = 37.5;
        for (double& v : scaled.csp) v *= factor;
        const auto w2 = incentive_weights(scaled, fp * factor);
        for (int t = 0; t < 48; ++t) CHECK(w1.wsp[t] == doctest::Approx(w2.wsp[t]).epsilon(1e-12));
    }
}

TEST_CASE("weights JSON carries the curve and provenance") {
    SpotPriceCurve curve;
    curve.csp = constant_curve(0.1);
    curve.regions = {"north"};
    curve.range_start = Date{2009, 6, 1};
    curve.range_end = Date{2009, 6, 30};
    curve.region_days = 30;
    const auto weights = incentive_weights(curve, 0.1);
    const auto j = weights_to_json(weights, curve);
    CHECK(j.at("flat_price") == 0.1);
    CHECK(j.at("provenance").at("region_days") == 30);
    CHECK(j.at("wsp").size() == 48);
}
