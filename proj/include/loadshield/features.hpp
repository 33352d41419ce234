#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "loadshield/types.hpp"

namespace loadshield {

inline constexpr int kFeatureCount = 20;

using FeatureArray = std::array<double, kFeatureCount>;

// The 20-feature statistical descriptor of one representative day profile:
// eight global statistics, four block sums and four block standard
// deviations over the period quarters 1-12/13-24/25-36/37-48, and four
// index-based features.
struct FeatureVector {
    double mean = 0;       // G1
    double stddev = 0;     // G2, population
    double max = 0;        // G3
    double min = 0;        // G4
    double range = 0;      // G5 = G3 - G4
    double sum = 0;        // G6
    double skew = 0;       // G7, population standardized moment; 0 for constant input
    double kurtosis = 0;   // G8, excess; 0 for constant input
    std::array<double, 4> block_sum{};  // Q9..Q12
    std::array<double, 4> block_std{};  // Q13..Q16, population
    int max_period = 1;    // I17, 1-based, lowest index on ties
    int min_period = 1;    // I18
    int count_above_mean = 0;  // I19, strictly greater
    int count_below_mean = 0;  // I20, strictly less

    FeatureArray to_array() const;
    static const std::array<const char*, kFeatureCount>& names();
};

FeatureVector extract_features(const PeriodVector& values);

// Per-business clustering input: the per-period mean of the business's
// normalized profiles across its days.
PeriodVector profile_representative(const ProfileSet& set);

struct Standardization {
    FeatureArray mean{};
    FeatureArray stddev{};  // population; 0 marks a constant column
};

struct FeatureMatrix {
    std::vector<std::string> row_ids;  // business ids, row-aligned
    std::vector<FeatureArray> rows;
    std::optional<Standardization> standardization;  // present once standardized

    int n_rows() const { return static_cast<int>(rows.size()); }
};

// One row per profile set, in input order. Parallel across businesses.
FeatureMatrix build_feature_matrix(const std::vector<ProfileSet>& sets);

// Per-column z-scores (population std). Constant columns are set to 0.
// The parameters used are recorded on the result for reproducibility.
FeatureMatrix standardize(const FeatureMatrix& matrix);

}  // namespace loadshield
