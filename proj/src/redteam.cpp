#include "loadshield/redteam.hpp"

#include <algorithm>
#include <cmath>

#include "loadshield/ingest.hpp"

namespace loadshield {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

Rng Rng::stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (index + 1));
    return Rng(splitmix64(s));
}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

ProfileSet bypass_profile(int n_days, const std::string& business_id, const Date& start_date) {
    if (n_days < 1) throw ConfigError("bypass_profile: n_days must be >= 1");
    ProfileSet set;
    set.business_id = business_id;
    for (int d = 0; d < n_days; ++d) {
        NormalizedProfile p;
        p.business_id = business_id;
        p.date = start_date.plus_days(d);
        p.values = PeriodVector{};  // all zeros; a fixed point of normalization
        set.profiles.push_back(std::move(p));
    }
    return set;
}

PeriodVector rcsa_raw_profile(const IncentiveWeights& weights, const ClusterModel& baseline,
                              const AttackSpec& spec, std::vector<std::string>* warnings) {
    if (spec.beta <= 0) throw ConfigError("rcsa: beta must be > 0");

    const auto [lo, hi] = std::minmax_element(weights.wsp.begin(), weights.wsp.end());
    const bool degenerate = (*hi - *lo) < 1e-12;
    if (degenerate && warnings) {
        warnings->push_back("rcsa: constant incentive weights, emitting a uniform profile");
    }

    PeriodVector shape{};
    if (degenerate) {
        shape.fill(1.0);
    } else {
        // Shift the exponent so the largest weight maps to exp(0).
        for (int t = 0; t < kPeriodsPerDay; ++t) {
            shape[t] = std::exp(-spec.beta * (weights.wsp[t] - *lo));
        }
    }

    double shape_sum = 0;
    for (double v : shape) shape_sum += v;

    PeriodVector profile{};
    if (spec.energy_preservation) {
        double ac_sum = 0;
        for (double v : baseline.ac) ac_sum += v;
        for (int t = 0; t < kPeriodsPerDay; ++t) profile[t] = ac_sum * shape[t] / shape_sum;

        if (!degenerate) {
            // Equal totals make the cost comparison a pure wsp inner product:
            // cost(p) < cost(ac)  <=>  sum p*wsp < sum ac*wsp.
            double p_wsp = 0, ac_wsp = 0;
            for (int t = 0; t < kPeriodsPerDay; ++t) {
                p_wsp += profile[t] * weights.wsp[t];
                ac_wsp += baseline.ac[t] * weights.wsp[t];
            }
            if (!(p_wsp < ac_wsp)) {
                throw DataError(
                    "rcsa: baseline already costs no more than the tilted profile; the attack "
                    "has no financial incentive against this cluster");
            }
        }
    } else {
        const double peak = *std::max_element(shape.begin(), shape.end());
        for (int t = 0; t < kPeriodsPerDay; ++t) profile[t] = shape[t] / peak;
    }
    return profile;
}

ProfileSet rcsa_profile(const IncentiveWeights& weights, const ClusterModel& baseline,
                        const AttackSpec& spec, const std::string& business_id,
                        const Date& start_date, std::vector<std::string>* warnings) {
    if (spec.n_days < 1) throw ConfigError("rcsa: n_days must be >= 1");
    const PeriodVector raw = rcsa_raw_profile(weights, baseline, spec, warnings);
    const PeriodVector normalized = normalize_values(raw);
    ProfileSet set;
    set.business_id = business_id;
    for (int d = 0; d < spec.n_days; ++d) {
        NormalizedProfile p;
        p.business_id = business_id;
        p.date = start_date.plus_days(d);
        p.values = normalized;
        set.profiles.push_back(std::move(p));
    }
    return set;
}

namespace {

double gaussian_bump(double t, double center, double width) {
    const double d = t - center;
    return std::exp(-(d * d) / (2.0 * width * width));
}

double circular_bump(double t, double center, double width) {
    double d = std::abs(t - center);
    d = std::min(d, kPeriodsPerDay - d);
    return std::exp(-(d * d) / (2.0 * width * width));
}

}  // namespace

const std::vector<std::string>& archetype_names() {
    static const std::vector<std::string> names = {"midday_peak", "evening_peak", "nocturnal",
                                                   "double_hump", "flat_daytime"};
    return names;
}

PeriodVector archetype_template(const std::string& name) {
    PeriodVector v{};
    for (int i = 0; i < kPeriodsPerDay; ++i) {
        const double t = i + 1;
        // A gentle intraday ramp keeps the extreme periods unique: real
        // profiles do not have exactly symmetric tails, and index features
        // would otherwise flip between distant ties under noise.
        const double ramp = 0.05 * t / kPeriodsPerDay;
        double y;
        if (name == "midday_peak") {
            y = 0.15 + 0.80 * gaussian_bump(t, 26, 6) + ramp;
        } else if (name == "evening_peak") {
            y = 0.15 + 0.80 * gaussian_bump(t, 39, 5) + ramp;
        } else if (name == "nocturnal") {
            y = 0.10 + 0.85 * circular_bump(t, 46, 7) + ramp;
        } else if (name == "double_hump") {
            y = 0.10 + 0.55 * gaussian_bump(t, 14, 4) + 0.65 * gaussian_bump(t, 36, 5) + ramp;
        } else if (name == "flat_daytime") {
            // Broad working-hours plateau with a mild mid-afternoon peak.
            y = 0.12 +
                0.70 / ((1.0 + std::exp(-(t - 16) / 2.0)) * (1.0 + std::exp((t - 42) / 2.0))) +
                0.12 * gaussian_bump(t, 29, 2.5) + ramp;
        } else {
            throw ConfigError("unknown archetype '" + name + "'");
        }
        v[i] = std::clamp(y, 0.0, 1.0);
    }
    return v;
}

SyntheticPopulation synthesize_population(const SyntheticPopulationSpec& spec) {
    if (spec.noise_std < 0) throw ConfigError("synthesize_population: noise_std must be >= 0");
    if (spec.n_days < 1) throw ConfigError("synthesize_population: n_days must be >= 1");

    struct Business {
        std::string id;
        int group = 0;
        PeriodVector tmpl{};
    };
    std::vector<Business> businesses;
    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
        const auto& group = spec.groups[g];
        if (group.n_businesses < 1) {
            throw ConfigError("synthesize_population: n_businesses must be >= 1");
        }
        const PeriodVector tmpl = archetype_template(group.archetype);
        for (int i = 0; i < group.n_businesses; ++i) {
            char suffix[32];
            std::snprintf(suffix, sizeof(suffix), "_%s_b%03d", group.archetype.c_str(), i);
            businesses.push_back({spec.industry_label + suffix, static_cast<int>(g), tmpl});
        }
    }

    const int n = static_cast<int>(businesses.size());
    SyntheticPopulation population;
    population.sets.resize(n);
    population.raw_profiles.clear();

    std::vector<std::vector<LoadProfile>> raw_by_business(n);
#pragma omp parallel for schedule(static)
    for (int b = 0; b < n; ++b) {
        Rng rng = Rng::stream(spec.seed, static_cast<std::uint64_t>(b));
        const double scale = 5.0 + 495.0 * rng.uniform();  // per-business kWh magnitude

        ProfileSet set;
        set.business_id = businesses[b].id;
        set.industry_label = spec.industry_label;
        for (int d = 0; d < spec.n_days; ++d) {
            LoadProfile raw;
            raw.business_id = businesses[b].id;
            raw.date = spec.start_date.plus_days(d);
            raw.day_class = day_class_of(raw.date);
            for (int t = 0; t < kPeriodsPerDay; ++t) {
                const double v = businesses[b].tmpl[t] + spec.noise_std * rng.gaussian();
                raw.values[t] = scale * std::max(v, 0.0);
            }
            set.profiles.push_back(normalize(raw));
            raw_by_business[b].push_back(std::move(raw));
        }
        population.sets[b] = std::move(set);
    }
    for (int b = 0; b < n; ++b) {
        population.archetype_of[businesses[b].id] = businesses[b].group;
        for (auto& p : raw_by_business[b]) population.raw_profiles.push_back(std::move(p));
    }
    return population;
}

RegionalPriceTable synthesize_prices(const SyntheticPriceSpec& spec) {
    if (spec.n_regions < 1) throw ConfigError("synthesize_prices: n_regions must be >= 1");
    if (spec.season.end < spec.season.start) {
        throw ConfigError("synthesize_prices: inverted season range");
    }
    RegionalPriceTable table;
    const std::int64_t n_days = spec.season.end.to_days() - spec.season.start.to_days() + 1;
    for (int r = 0; r < spec.n_regions; ++r) {
        char name[32];
        std::snprintf(name, sizeof(name), "region%02d", r);
        auto& days = table.prices[name];
        for (std::int64_t d = 0; d < n_days; ++d) {
            Rng rng = Rng::stream(spec.seed, static_cast<std::uint64_t>(r) * 100000 +
                                                 static_cast<std::uint64_t>(d));
            PeriodVector prices{};
            for (int i = 0; i < kPeriodsPerDay; ++i) {
                const double t = i + 1;
                // Morning and evening demand humps over a low overnight base.
                double p = 0.080 + 0.040 * gaussian_bump(t, 16, 4) + 0.060 * gaussian_bump(t, 38, 4.5);
                p += spec.jitter * rng.gaussian();
                prices[i] = p;
            }
            days.emplace(spec.season.start.plus_days(d), prices);
        }
    }
    return table;
}

}  // namespace loadshield
