#include "loadshield/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace loadshield {

FeatureArray FeatureVector::to_array() const {
    return {mean,
            stddev,
            max,
            min,
            range,
            sum,
            skew,
            kurtosis,
            block_sum[0],
            block_sum[1],
            block_sum[2],
            block_sum[3],
            block_std[0],
            block_std[1],
            block_std[2],
            block_std[3],
            static_cast<double>(max_period),
            static_cast<double>(min_period),
            static_cast<double>(count_above_mean),
            static_cast<double>(count_below_mean)};
}

const std::array<const char*, kFeatureCount>& FeatureVector::names() {
    static const std::array<const char*, kFeatureCount> n = {
        "mean",        "std",         "max",         "min",         "range",
        "sum",         "skew",        "kurtosis",    "sum_q1",      "sum_q2",
        "sum_q3",      "sum_q4",      "std_q1",      "std_q2",      "std_q3",
        "std_q4",      "max_period",  "min_period",  "count_above_mean",
        "count_below_mean"};
    return n;
}

namespace {

double population_std(const double* v, int n, double mean) {
    double acc = 0;
    for (int i = 0; i < n; ++i) {
        const double d = v[i] - mean;
        acc += d * d;
    }
    return std::sqrt(acc / n);
}

}  // namespace

FeatureVector extract_features(const PeriodVector& values) {
    for (double v : values) {
        if (!std::isfinite(v)) throw DataError("extract_features: non-finite input");
    }

    FeatureVector f;
    f.sum = std::accumulate(values.begin(), values.end(), 0.0);
    f.mean = f.sum / kPeriodsPerDay;

    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    f.min = *lo_it;
    f.max = *hi_it;
    f.range = f.max - f.min;
    // minmax_element returns the last max; the lowest index is wanted on ties.
    f.max_period = static_cast<int>(std::find(values.begin(), values.end(), f.max) -
                                    values.begin()) + 1;
    f.min_period = static_cast<int>(lo_it - values.begin()) + 1;

    double m2 = 0, m3 = 0, m4 = 0;
    for (double v : values) {
        const double d = v - f.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= kPeriodsPerDay;
    m3 /= kPeriodsPerDay;
    m4 /= kPeriodsPerDay;
    f.stddev = std::sqrt(m2);
    if (m2 > 0) {
        f.skew = m3 / (m2 * f.stddev);
        f.kurtosis = m4 / (m2 * m2) - 3.0;
    }

    constexpr int block = kPeriodsPerDay / 4;
    for (int q = 0; q < 4; ++q) {
        const double* begin = values.data() + q * block;
        f.block_sum[q] = std::accumulate(begin, begin + block, 0.0);
        f.block_std[q] = population_std(begin, block, f.block_sum[q] / block);
    }

    for (double v : values) {
        if (v > f.mean) ++f.count_above_mean;
        if (v < f.mean) ++f.count_below_mean;
    }
    return f;
}

PeriodVector profile_representative(const ProfileSet& set) {
    if (set.profiles.empty()) {
        throw DataError("no profiles for business " + set.business_id);
    }
    PeriodVector mean{};
    for (const auto& p : set.profiles) {
        for (int t = 0; t < kPeriodsPerDay; ++t) mean[t] += p.values[t];
    }
    const double n = static_cast<double>(set.profiles.size());
    for (double& v : mean) v /= n;
    return mean;
}

FeatureMatrix build_feature_matrix(const std::vector<ProfileSet>& sets) {
    FeatureMatrix m;
    const int n = static_cast<int>(sets.size());
    m.row_ids.resize(n);
    m.rows.resize(n);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        m.rows[i] = extract_features(profile_representative(sets[i])).to_array();
    }
    for (int i = 0; i < n; ++i) m.row_ids[i] = sets[i].business_id;
    return m;
}

FeatureMatrix standardize(const FeatureMatrix& matrix) {
    const int n = matrix.n_rows();
    if (n < 2) throw DataError("insufficient businesses: standardization needs at least 2 rows");

    Standardization params;
    for (int c = 0; c < kFeatureCount; ++c) {
        double sum = 0;
        for (const auto& row : matrix.rows) sum += row[c];
        const double mean = sum / n;
        double acc = 0;
        for (const auto& row : matrix.rows) {
            const double d = row[c] - mean;
            acc += d * d;
        }
        params.mean[c] = mean;
        params.stddev[c] = std::sqrt(acc / n);
    }

    FeatureMatrix out;
    out.row_ids = matrix.row_ids;
    out.rows.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < kFeatureCount; ++c) {
            out.rows[i][c] = params.stddev[c] == 0.0
                                 ? 0.0
                                 : (matrix.rows[i][c] - params.mean[c]) / params.stddev[c];
        }
    }
    out.standardization = params;
    return out;
}

}  // namespace loadshield
