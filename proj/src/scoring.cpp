#include "loadshield/scoring.hpp"

#include <cmath>

#include "loadshield/features.hpp"

namespace loadshield {

std::string to_string(AlertLevel level) {
    switch (level) {
        case AlertLevel::none: return "none";
        case AlertLevel::anomalous: return "anomalous";
        case AlertLevel::incentive_flagged: return "incentive-flagged";
    }
    return "none";
}

const ClusterModel& assign_cluster(const ProfileSet& set, const std::vector<ClusterModel>& models) {
    if (models.empty()) throw DataError("assign_cluster: no models");
    for (const auto& m : models) {
        if (m.industry_label != set.industry_label) {
            throw DataError("assign_cluster: industry mismatch, business " + set.business_id +
                            " is '" + set.industry_label + "' but model cluster " +
                            std::to_string(m.cluster_id) + " is '" + m.industry_label + "'");
        }
    }
    const PeriodVector rep = profile_representative(set);
    const ClusterModel* best = nullptr;
    double best_dist = 0;
    for (const auto& m : models) {
        double acc = 0;
        for (int t = 0; t < kPeriodsPerDay; ++t) {
            const double d = rep[t] - m.ac[t];
            acc += d * d;
        }
        if (!best || acc < best_dist || (acc == best_dist && m.cluster_id < best->cluster_id)) {
            best = &m;
            best_dist = acc;
        }
    }
    return *best;
}

ViolationResult violation_score(const ProfileSet& set, const ClusterModel& model,
                                const ScoringParams& params) {
    if (set.profiles.empty()) throw DataError("violation_score: empty profile set");
    for (double v : model.asd) {
        if (!std::isfinite(v)) throw DataError("violation_score: non-finite asd");
    }

    const int n = set.n_days();
    ViolationResult result;
    result.mask.n_days = n;
    result.mask.vsd.resize(n);
    result.mask.vsc.resize(n);

    long violations = 0;
    for (int d = 0; d < n; ++d) {
        const auto& z = set.profiles[d].values;
        for (int t = 0; t < kPeriodsPerDay; ++t) {
            const double band = params.confidence * std::max(model.asd[t], params.asd_floor);
            const double slack = band - std::abs(z[t] - model.ac[t]);
            result.mask.vsd[d][t] = slack;
            const bool violation = slack < 0;  // zero slack is not a violation
            result.mask.vsc[d][t] = violation ? 1 : 0;
            violations += violation;
        }
    }
    result.vsp = static_cast<double>(violations) / (static_cast<double>(n) * kPeriodsPerDay);
    return result;
}

double incentive_score(const ProfileSet& set, const ClusterModel& model,
                       const IncentiveWeights& weights) {
    if (set.profiles.empty()) throw DataError("incentive_score: empty profile set");
    double total_gain = 0;
    for (const auto& profile : set.profiles) {
        double gain = 0;
        for (int t = 0; t < kPeriodsPerDay; ++t) {
            gain += (model.ac[t] - profile.values[t]) * weights.wsp[t];
        }
        total_gain += gain;
    }
    return std::abs(total_gain / set.n_days());
}

ScoreReport score_business(const ProfileSet& set, const std::vector<ClusterModel>& models,
                           const IncentiveWeights& weights, const ScoringParams& params,
                           const Thresholds& thresholds) {
    const ClusterModel& model = assign_cluster(set, models);
    ViolationResult violation = violation_score(set, model, params);

    ScoreReport report;
    report.business_id = set.business_id;
    report.industry_label = set.industry_label;
    report.cluster_id = model.cluster_id;
    report.n_days = set.n_days();
    report.vsp = violation.vsp;
    report.isc = incentive_score(set, model, weights);
    report.wivs = wivs(report.vsp, report.isc);
    report.mask = std::move(violation.mask);
    if (report.wivs > thresholds.wivs_flag) {
        report.flag = AlertLevel::incentive_flagged;
    } else if (report.vsp > thresholds.vsp_anomalous) {
        report.flag = AlertLevel::anomalous;
    }
    return report;
}

nlohmann::json report_to_json(const ScoreReport& report, bool include_mask) {
    nlohmann::json j{{"business_id", report.business_id},
                     {"industry", report.industry_label},
                     {"cluster_id", report.cluster_id},
                     {"n_days", report.n_days},
                     {"vsp", report.vsp},
                     {"isc", report.isc},
                     {"wivs", report.wivs},
                     {"flag", to_string(report.flag)}};
    if (include_mask) {
        nlohmann::json days = nlohmann::json::array();
        for (int d = 0; d < report.mask.n_days; ++d) {
            days.push_back({{"vsd", report.mask.vsd[d]}, {"vsc", report.mask.vsc[d]}});
        }
        j["mask"] = std::move(days);
    }
    return j;
}

}  // namespace loadshield
