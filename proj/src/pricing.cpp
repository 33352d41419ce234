#include "loadshield/pricing.hpp"

#include <charconv>
#include <cmath>
#include <istream>

#include "loadshield/csv.hpp"

namespace loadshield {

PriceParseResult parse_price_csv(std::istream& source) {
    if (!source) throw DataError("unreadable prices stream");

    std::size_t line_no = 0;
    std::vector<std::string> fields;
    if (!csv::read_record(source, fields, line_no)) {
        throw DataError("prices stream has no header");
    }
    if (fields.size() != static_cast<std::size_t>(2 + kPeriodsPerDay) || fields[0] != "region" ||
        fields[1] != "date" || fields[2] != "p01") {
        throw DataError("prices header must be region,date,p01..p48");
    }

    PriceParseResult result;
    while (csv::read_record(source, fields, line_no)) {
        if (fields.size() != static_cast<std::size_t>(2 + kPeriodsPerDay)) {
            result.warnings.push_back("line " + std::to_string(line_no) +
                                      ": wrong field count, skipped");
            continue;
        }
        const std::string& region = fields[0];
        const auto date = Date::parse_iso(fields[1]);
        if (region.empty() || !date) {
            result.warnings.push_back("line " + std::to_string(line_no) +
                                      ": bad region or date, skipped");
            continue;
        }
        PeriodVector prices{};
        bool complete = true;
        for (int t = 0; t < kPeriodsPerDay; ++t) {
            const std::string& cell = fields[2 + t];
            double v = 0;
            const auto* first = cell.data();
            const auto* last = first + cell.size();
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
                complete = false;
                break;
            }
            prices[t] = v;
        }
        if (!complete) {
            result.warnings.push_back("line " + std::to_string(line_no) + ": " + region + " " +
                                      date->to_iso() + " incomplete or non-numeric, skipped");
            continue;
        }
        auto [it, inserted] = result.table.prices[region].try_emplace(*date, prices);
        if (!inserted) {
            result.warnings.push_back("line " + std::to_string(line_no) + ": duplicate " + region +
                                      " " + date->to_iso() + ", keeping first");
        }
    }
    return result;
}

SpotPriceCurve average_regions(const RegionalPriceTable& table, const SeasonRange& season) {
    if (season.end < season.start) {
        throw ConfigError("inverted date range: " + season.start.to_iso() + " > " +
                          season.end.to_iso());
    }
    SpotPriceCurve curve;
    curve.range_start = season.start;
    curve.range_end = season.end;
    PeriodVector sum{};
    for (const auto& [region, days] : table.prices) {
        bool contributed = false;
        for (const auto& [date, prices] : days) {
            if (!season.contains(date)) continue;
            for (int t = 0; t < kPeriodsPerDay; ++t) sum[t] += prices[t];
            ++curve.region_days;
            contributed = true;
        }
        if (contributed) curve.regions.push_back(region);
    }
    if (curve.region_days == 0) {
        throw DataError("average_regions: no price data in " + season.start.to_iso() + ".." +
                        season.end.to_iso());
    }
    for (int t = 0; t < kPeriodsPerDay; ++t) curve.csp[t] = sum[t] / curve.region_days;
    return curve;
}

IncentiveWeights incentive_weights(const SpotPriceCurve& curve, std::optional<double> flat_price) {
    double fp;
    if (flat_price.has_value()) {
        fp = *flat_price;
    } else {
        double sum = 0;
        for (double v : curve.csp) sum += v;
        fp = sum / kPeriodsPerDay;
    }
    if (!(fp > 0)) {
        throw ConfigError("flat price must be positive, got " + std::to_string(fp));
    }
    IncentiveWeights weights;
    weights.flat_price = fp;
    for (int t = 0; t < kPeriodsPerDay; ++t) weights.wsp[t] = (curve.csp[t] - fp) / fp;
    return weights;
}

nlohmann::json weights_to_json(const IncentiveWeights& weights, const SpotPriceCurve& curve) {
    return {{"wsp", weights.wsp},
            {"flat_price", weights.flat_price},
            {"csp", curve.csp},
            {"provenance",
             {{"regions", curve.regions},
              {"range", {{"start", curve.range_start.to_iso()}, {"end", curve.range_end.to_iso()}}},
              {"region_days", curve.region_days}}}};
}

}  // namespace loadshield
