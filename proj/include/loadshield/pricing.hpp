#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loadshield/types.hpp"

namespace loadshield {

// Half-hourly spot prices per region and calendar date, currency/kWh.
// Negative prices are legitimate market data and flow through unchanged.
struct RegionalPriceTable {
    std::map<std::string, std::map<Date, PeriodVector>> prices;
};

struct PriceParseResult {
    RegionalPriceTable table;
    std::vector<std::string> warnings;  // skipped incomplete days etc.
};

// Schema: region,date,p01..p48. Days with any missing or non-finite cell are
// skipped with a warning rather than interpolated.
PriceParseResult parse_price_csv(std::istream& source);

struct SpotPriceCurve {
    PeriodVector csp{};  // per-period mean over all included (region, day) pairs
    std::vector<std::string> regions;
    Date range_start;
    Date range_end;
    int region_days = 0;
};

SpotPriceCurve average_regions(const RegionalPriceTable& table, const SeasonRange& season);

// wsp_t = (csp_t - FP) / FP: the flat-price-relative incentive signal.
struct IncentiveWeights {
    PeriodVector wsp{};
    double flat_price = 0;
};

// flat_price nullopt selects FP = mean(csp), which makes wsp a pure
// intraday-shape signal with zero mean.
IncentiveWeights incentive_weights(const SpotPriceCurve& curve, std::optional<double> flat_price);

nlohmann::json weights_to_json(const IncentiveWeights& weights, const SpotPriceCurve& curve);

}  // namespace loadshield
