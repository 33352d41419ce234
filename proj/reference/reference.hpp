#pragma once

// Serial reference implementations, written straight from the definitions
// with plain index loops. They stay independent of the optimized library
// paths: tests compare the two routes and the benchmark uses these as the
// single-threaded baseline.

#include <vector>

#include "loadshield/cluster.hpp"
#include "loadshield/features.hpp"
#include "loadshield/pricing.hpp"
#include "loadshield/scoring.hpp"
#include "loadshield/types.hpp"

namespace loadshield::ref {

PeriodVector normalize_values(const PeriodVector& values);

FeatureArray extract_features(const PeriodVector& values);

ProximityMatrix proximity(const FeatureMatrix& matrix);

std::vector<double> silhouette_values(const ProximityMatrix& prox, const std::vector<int>& labels,
                                      int k);
double mean_silhouette(const ProximityMatrix& prox, const std::vector<int>& labels, int k);

// Greedy agglomeration that recomputes every cluster-pair linkage distance
// from the original point distances at each step, instead of incremental
// updates. Returns labels in [0, k) ordered by smallest member row.
std::vector<int> agglomerate_recompute(const ProximityMatrix& prox, int k, Linkage linkage);

// All partitions of {0..n-1} into exactly k non-empty blocks, as label
// vectors in restricted growth form. Feasible for n <= 10.
std::vector<std::vector<int>> enumerate_partitions(int n, int k);

// Spacing of a partition: the minimum point-to-point distance between any
// two clusters. Single-linkage agglomeration provably maximizes it.
double partition_spacing(const ProximityMatrix& prox, const std::vector<int>& labels);
std::vector<int> max_spacing_partition(const ProximityMatrix& prox, int k);

void pooled_mean_std(const std::vector<const PeriodVector*>& days, PeriodVector& mean_out,
                     PeriodVector& std_out);

double violation_vsp(const ProfileSet& set, const ClusterModel& model, double confidence,
                     double asd_floor);

double incentive_score(const ProfileSet& set, const ClusterModel& model,
                       const IncentiveWeights& weights);

}  // namespace loadshield::ref
