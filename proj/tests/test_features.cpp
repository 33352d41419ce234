#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "loadshield/features.hpp"
#include "loadshield/redteam.hpp"
#include "reference.hpp"

using namespace loadshield;

namespace {

bool close(double a, double b, double tol = 1e-12) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

ProfileSet one_day_set(const PeriodVector& values) {
    ProfileSet set;
    set.business_id = "b";
    set.profiles.push_back({"b", Date{2009, 6, 1}, values});
    return set;
}

}  // namespace

TEST_CASE("extract_features on a constant vector uses the degenerate conventions") {
    PeriodVector v{};
    v.fill(3.25);
    const FeatureVector f = extract_features(v);
    CHECK(f.mean == 3.25);
    CHECK(f.stddev == 0.0);
    CHECK(f.range == 0.0);
    CHECK(f.sum == doctest::Approx(48 * 3.25));
    CHECK(f.skew == 0.0);
    CHECK(f.kurtosis == 0.0);
    CHECK(f.max_period == 1);
    CHECK(f.min_period == 1);
    CHECK(f.count_above_mean == 0);
    CHECK(f.count_below_mean == 0);
}

TEST_CASE("extract_features on the ramp 0..1") {
    PeriodVector v{};
    for (int t = 0; t < 48; ++t) v[t] = t / 47.0;
    const FeatureVector f = extract_features(v);
    CHECK(f.mean == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(f.max_period == 48);
    CHECK(f.min_period == 1);
    // No ramp value equals the mean exactly, so the counts split 24/24.
    CHECK(f.count_above_mean == 24);
    CHECK(f.count_below_mean == 24);
    CHECK(f.block_sum[0] < f.block_sum[3]);
}

TEST_CASE("extract_features breaks argmax/argmin ties toward the lowest index") {
    PeriodVector v{};
    v.fill(1.0);
    v[10] = 2.0;
    v[20] = 2.0;
    v[30] = 0.5;
    v[40] = 0.5;
    const FeatureVector f = extract_features(v);
    CHECK(f.max_period == 11);
    CHECK(f.min_period == 31);
}

TEST_CASE("extract_features rejects non-finite input") {
    PeriodVector v{};
    v[5] = std::nan("");
    CHECK_THROWS_AS(extract_features(v), DataError);
}

TEST_CASE("all 20 features match the reference implementation on random vectors") {
    Rng rng(1234);
    for (int trial = 0; trial < 500; ++trial) {
        PeriodVector v{};
        for (double& x : v) x = rng.uniform();
        const FeatureArray a = extract_features(v).to_array();
        const FeatureArray b = ref::extract_features(v);
        for (int c = 0; c < kFeatureCount; ++c) {
            INFO("feature ", FeatureVector::names()[c], " trial ", trial);
            CHECK(close(a[c], b[c]));
        }
    }
}

TEST_CASE("feature invariants: g5 = g3 - g4, g6 = 48*g1, index bounds") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        PeriodVector v{};
        for (double& x : v) x = 10.0 * rng.uniform() - 3.0;
        const FeatureVector f = extract_features(v);
        CHECK(close(f.range, f.max - f.min));
        CHECK(close(f.sum, 48.0 * f.mean, 1e-9));
        CHECK(f.max_period >= 1);
        CHECK(f.max_period <= 48);
        CHECK(f.min_period >= 1);
        CHECK(f.min_period <= 48);
        CHECK(f.count_above_mean + f.count_below_mean <= 48);
    }
}

TEST_CASE("global features are permutation invariant, positional ones are not") {
    Rng rng(4242);
    PeriodVector v{};
    for (double& x : v) x = rng.uniform();
    const FeatureArray base = extract_features(v).to_array();

    PeriodVector shuffled = v;
    // Fisher-Yates with the deterministic generator.
    for (int i = 47; i > 0; --i) {
        const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(shuffled[i], shuffled[j]);
    }
    const FeatureArray perm = extract_features(shuffled).to_array();

    // G1..G8 and the I19/I20 counts survive any permutation.
    for (int c : {0, 1, 2, 3, 4, 5, 6, 7, 18, 19}) CHECK(close(base[c], perm[c]));
    // The quartile blocks must react to a reshuffle of this magnitude.
    bool any_positional_changed = false;
    for (int c : {8, 9, 10, 11, 12, 13, 14, 15, 16, 17}) {
        if (!close(base[c], perm[c])) any_positional_changed = true;
    }
    CHECK(any_positional_changed);
}

TEST_CASE("profile_representative averages days") {
    SUBCASE("one day is returned as-is") {
        PeriodVector v{};
        for (int t = 0; t < 48; ++t) v[t] = t / 47.0;
        const auto rep = profile_representative(one_day_set(v));
        CHECK(rep == v);
    }
    SUBCASE("two days of zeros and ones average to one half") {
        ProfileSet set;
        PeriodVector zeros{};
        PeriodVector ones{};
        ones.fill(1.0);
        set.profiles.push_back({"b", Date{2009, 6, 1}, zeros});
        set.profiles.push_back({"b", Date{2009, 6, 2}, ones});
        const auto rep = profile_representative(set);
        for (double v : rep) CHECK(v == 0.5);
    }
    SUBCASE("identical days are a fixed point") {
        PeriodVector v{};
        for (int t = 0; t < 48; ++t) v[t] = 0.25 + 0.5 * ((t * 7) % 5) / 4.0;
        ProfileSet set;
        for (int d = 0; d < 5; ++d) set.profiles.push_back({"b", Date{2009, 6, 1 + d}, v});
        const auto rep = profile_representative(set);
        for (int t = 0; t < 48; ++t) CHECK(rep[t] == doctest::Approx(v[t]).epsilon(1e-14));
    }
    SUBCASE("empty set throws") {
        ProfileSet set;
        set.business_id = "empty";
        CHECK_THROWS_AS(profile_representative(set), DataError);
    }
}

TEST_CASE("standardize: z-scores, constant columns, idempotence") {
    FeatureMatrix m;
    m.row_ids = {"a", "b"};
    FeatureArray r1{};
    FeatureArray r2{};
    r1.fill(7.0);  // constant columns except column 0
    r2.fill(7.0);
    r1[0] = 1.0;
    r2[0] = 3.0;
    m.rows = {r1, r2};

    const FeatureMatrix z = standardize(m);
    CHECK(z.rows[0][0] == doctest::Approx(-1.0));  // population std of {1,3} is 1
    CHECK(z.rows[1][0] == doctest::Approx(1.0));
    for (int c = 1; c < kFeatureCount; ++c) {
        CHECK(z.rows[0][c] == 0.0);
        CHECK(z.rows[1][c] == 0.0);
    }
    REQUIRE(z.standardization.has_value());
    CHECK(z.standardization->mean[0] == doctest::Approx(2.0));
    CHECK(z.standardization->stddev[0] == doctest::Approx(1.0));

    SUBCASE("columns have mean 0 and std 1 after standardization") {
        Rng rng(5);
        FeatureMatrix big;
        for (int i = 0; i < 12; ++i) {
            big.row_ids.push_back("r" + std::to_string(i));
            FeatureArray row{};
            for (double& x : row) x = 100.0 * rng.uniform() - 20.0;
            big.rows.push_back(row);
        }
        const FeatureMatrix zz = standardize(big);
        for (int c = 0; c < kFeatureCount; ++c) {
            double mean = 0;
            for (const auto& row : zz.rows) mean += row[c];
            mean /= zz.n_rows();
            double var = 0;
            for (const auto& row : zz.rows) var += (row[c] - mean) * (row[c] - mean);
            var /= zz.n_rows();
            CHECK(std::abs(mean) < 1e-9);
            CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
        }
        const FeatureMatrix zzz = standardize(zz);
        for (int i = 0; i < zz.n_rows(); ++i) {
            for (int c = 0; c < kFeatureCount; ++c) {
                CHECK(std::abs(zzz.rows[i][c] - zz.rows[i][c]) < 1e-9);
            }
        }
    }
    SUBCASE("fewer than two rows is an error") {
        FeatureMatrix tiny;
        tiny.row_ids = {"only"};
        tiny.rows = {r1};
        CHECK_THROWS_AS(standardize(tiny), DataError);
    }
}

TEST_CASE("build_feature_matrix keeps row order aligned with sets") {
    std::vector<ProfileSet> sets;
    PeriodVector v{};
    for (int i = 0; i < 4; ++i) {
        for (int t = 0; t < 48; ++t) v[t] = (t + i) % 48 / 47.0;
        ProfileSet s = one_day_set(v);
        s.business_id = "b" + std::to_string(i);
        sets.push_back(s);
    }
    const FeatureMatrix m = build_feature_matrix(sets);
    REQUIRE(m.n_rows() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(m.row_ids[i] == sets[i].business_id);
        const FeatureArray expect = extract_features(profile_representative(sets[i])).to_array();
        CHECK(m.rows[i] == expect);
    }
}
