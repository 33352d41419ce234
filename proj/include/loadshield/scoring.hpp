#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "loadshield/cluster.hpp"
#include "loadshield/pricing.hpp"
#include "loadshield/types.hpp"

namespace loadshield {

struct ScoringParams {
    // Band half-width multiplier on asd: a period violates when the absolute
    // deviation from ac exceeds confidence * asd.
    double confidence = 2.0;
    // Periods with asd below this floor use the floor, so a singleton
    // cluster's zero-width band does not flag every benign day.
    double asd_floor = 1e-6;
};

enum class AlertLevel : int { none = 0, anomalous = 1, incentive_flagged = 2 };

std::string to_string(AlertLevel level);

struct Thresholds {
    double vsp_anomalous = 0.5;
    double wivs_flag = std::numeric_limits<double>::infinity();
};

// Per-day, per-period slack and violation indicators.
struct ViolationMask {
    int n_days = 0;
    std::vector<std::array<double, kPeriodsPerDay>> vsd;   // confidence*asd - |z - ac|
    std::vector<std::array<std::uint8_t, kPeriodsPerDay>> vsc;  // 1 iff vsd < 0
};

struct ViolationResult {
    ViolationMask mask;
    double vsp = 0;  // violating cells / (48 * n_days)
};

// Nearest baseline by Euclidean distance between the set's representative
// profile and each model's ac; ties go to the lowest cluster id.
const ClusterModel& assign_cluster(const ProfileSet& set, const std::vector<ClusterModel>& models);

ViolationResult violation_score(const ProfileSet& set, const ClusterModel& model,
                                const ScoringParams& params = {});

// Price-weighted departure: per day the signed gain sum_t (ac_t - z_t) * wsp_t,
// positive when consumption moved away from expensive periods; the score is
// the absolute value of the mean daily gain.
double incentive_score(const ProfileSet& set, const ClusterModel& model,
                       const IncentiveWeights& weights);

inline double wivs(double vsp, double isc) { return isc * vsp; }

struct ScoreReport {
    std::string business_id;
    std::string industry_label;
    int cluster_id = 0;
    int n_days = 0;
    double vsp = 0;
    double isc = 0;
    double wivs = 0;
    ViolationMask mask;
    AlertLevel flag = AlertLevel::none;
};

ScoreReport score_business(const ProfileSet& set, const std::vector<ClusterModel>& models,
                           const IncentiveWeights& weights, const ScoringParams& params,
                           const Thresholds& thresholds);

nlohmann::json report_to_json(const ScoreReport& report, bool include_mask = false);

}  // namespace loadshield
