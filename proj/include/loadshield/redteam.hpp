#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "loadshield/cluster.hpp"
#include "loadshield/pricing.hpp"
#include "loadshield/types.hpp"

namespace loadshield {

// Deterministic, portable generator: splitmix64 uniforms, Box-Muller
// gaussians. Independent of the standard library distributions so the same
// seed reproduces the same bytes everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Derives an independent stream, e.g. one per business.
    static Rng stream(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next_u64();
    double uniform();   // [0, 1)
    double gaussian();  // standard normal

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0;
};

struct AttackSpec {
    enum class Kind { bypass, rcsa };

    Kind kind = Kind::bypass;
    std::string target_business;
    int n_days = 1;
    // RCSA parameters: concentration beta > 0 tilts load toward cheap
    // periods; energy preservation keeps the daily total equal to the
    // baseline's so the bill change comes only from the shape.
    double beta = 3.0;
    bool energy_preservation = true;
};

// Meter bypass: every period of every day reads zero.
ProfileSet bypass_profile(int n_days, const std::string& business_id = "bypass",
                          const Date& start_date = {});

// Reduced-cost spot-attack day shape, pre-normalization (kWh scale):
// p_t proportional to exp(-beta * wsp_t), scaled to the baseline's total
// energy (or to max 1 without preservation). With energy preservation the
// generated day is verified to cost strictly less than the baseline ac
// under the run's price curve; a baseline that is already cheaper than the
// tilted shape is an error.
PeriodVector rcsa_raw_profile(const IncentiveWeights& weights, const ClusterModel& baseline,
                              const AttackSpec& spec, std::vector<std::string>* warnings = nullptr);

ProfileSet rcsa_profile(const IncentiveWeights& weights, const ClusterModel& baseline,
                        const AttackSpec& spec, const std::string& business_id = "rcsa",
                        const Date& start_date = {}, std::vector<std::string>* warnings = nullptr);

// Named day-shape templates in [0, 1] used to synthesize businesses.
const std::vector<std::string>& archetype_names();
PeriodVector archetype_template(const std::string& name);

struct ArchetypeGroup {
    std::string archetype;  // template name
    int n_businesses = 0;
};

struct SyntheticPopulationSpec {
    std::vector<ArchetypeGroup> groups;
    double noise_std = 0.04;  // per-period gaussian noise on the template
    int n_days = 10;
    std::uint64_t seed = 1;
    std::string industry_label = "hotel";
    Date start_date{2009, 6, 1};
};

struct SyntheticPopulation {
    std::vector<ProfileSet> sets;            // normalized, ready for the pipeline
    std::vector<LoadProfile> raw_profiles;   // kWh scale, for CSV fixtures
    std::map<std::string, int> archetype_of; // ground truth: business -> group index
};

// Per business: template + per-period gaussian noise, clipped at zero, under
// a per-business kWh scale, then normalized. Bit-reproducible per seed.
SyntheticPopulation synthesize_population(const SyntheticPopulationSpec& spec);

// Deterministic two-hump intraday spot-price fixture (currency/kWh) with
// per-(region, day) jitter, written in the prices CSV schema.
struct SyntheticPriceSpec {
    int n_regions = 3;
    double jitter = 0.002;
    std::uint64_t seed = 7;
    SeasonRange season{{2009, 6, 1}, {2009, 6, 14}};
};

RegionalPriceTable synthesize_prices(const SyntheticPriceSpec& spec);

}  // namespace loadshield
