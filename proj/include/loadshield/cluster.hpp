#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "loadshield/features.hpp"
#include "loadshield/types.hpp"

namespace loadshield {

enum class Linkage { single, complete, average, ward };

std::optional<Linkage> linkage_from_string(std::string_view s);
std::string to_string(Linkage l);

// Symmetric pairwise Euclidean distances in standardized feature space.
struct ProximityMatrix {
    int n = 0;
    std::vector<double> d;  // row-major n*n

    double at(int i, int j) const { return d[static_cast<std::size_t>(i) * n + j]; }
    double& at(int i, int j) { return d[static_cast<std::size_t>(i) * n + j]; }
};

ProximityMatrix proximity(const FeatureMatrix& matrix);

// One agglomerative merge. Cluster ids are the smallest original row index
// of each side, a < b.
struct Merge {
    int a = 0;
    int b = 0;
    double distance = 0;
};

struct ClusterAssignment {
    int k = 0;
    std::vector<int> labels;  // per row, in [0, k); ids ordered by smallest member row
    Linkage linkage = Linkage::average;
    std::vector<Merge> merge_trace;  // exactly n - k entries
};

// Bottom-up merging from n singletons: the closest pair of clusters under
// the linkage criterion is merged and distances are updated until k clusters
// remain. Ties break toward the lexicographically smallest id pair.
ClusterAssignment agglomerate(const ProximityMatrix& prox, int k, Linkage linkage);

// Replays a merge trace prefix and reproduces the labels agglomerate would
// report for the corresponding k.
std::vector<int> labels_from_trace(int n, std::span<const Merge> trace, int k);

struct SilhouetteDiagnostics {
    std::vector<double> per_point;      // s(z) in [-1, 1]
    double mean = 0;                    // mean over all points for this assignment
    std::map<int, double> mean_by_k;    // filled by select_k
    int selected_k = 0;                 // filled by select_k
};

// Per-point silhouette against the same proximity matrix the clustering
// used. Singleton clusters score 0 by convention, as do coincident points
// where both cohesion and separation vanish.
SilhouetteDiagnostics silhouette(const ProximityMatrix& prox, const ClusterAssignment& assignment);

// Evaluates k in {2 .. min(k_max, n-1)} and returns the assignment with the
// maximum mean silhouette; ties go to the smaller k.
std::pair<ClusterAssignment, SilhouetteDiagnostics> select_k(const ProximityMatrix& prox,
                                                             int k_max, Linkage linkage);

// Per-cluster baseline: ac is the per-period mean over every member
// business-day, asd the per-period population standard deviation over the
// same day-level pool.
struct ClusterModel {
    std::string industry_label;
    int cluster_id = 0;
    PeriodVector ac{};
    PeriodVector asd{};
    std::vector<std::string> member_ids;

    int n_members() const { return static_cast<int>(member_ids.size()); }
};

std::vector<ClusterModel> build_cluster_models(const std::vector<ProfileSet>& sets,
                                               const ClusterAssignment& assignment,
                                               const std::string& industry_label);

struct ModelProvenance {
    std::string season_start;
    std::string season_end;
    std::string day_class;
    std::string linkage;
    int selected_k = 0;
    double silhouette_mean = 0;
};

nlohmann::json model_to_json(const ClusterModel& model, const ModelProvenance& provenance);
ClusterModel model_from_json(const nlohmann::json& j, ModelProvenance* provenance_out = nullptr);

nlohmann::json merge_trace_to_json(std::span<const Merge> trace);

}  // namespace loadshield
